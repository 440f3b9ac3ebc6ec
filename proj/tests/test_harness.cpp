/* Copyright 2026 The DNMS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <string>

#include "doctest.h"
#include "dnms/error.hpp"
#include "dnms/harness.hpp"
#include "json.hpp"

using json = nlohmann::json;

TEST_CASE("relative error and thresholds") {
  dnms::Matrix a(1, 2), b(1, 2);
  a << 1.0, 2.0;
  b << 1.0, 2.5;
  CHECK(dnms::harness::relative_error(a, b) == doctest::Approx(0.2));
  CHECK(dnms::harness::gradcheck_threshold(2.0) == 1e-4);
  CHECK(dnms::harness::gradcheck_threshold(0.5) == 1e-4);
  CHECK(dnms::harness::gradcheck_threshold(0.2) == 1e-3);
  CHECK(dnms::harness::gradcheck_threshold(0.05) == 1e-2);
}

TEST_CASE("finite differences of a quadratic are exact") {
  const dnms::Matrix C = dnms::harness::random_matrix(3, 2, 4);
  const dnms::Matrix g = dnms::harness::finite_difference(C, 1e-3, [](const dnms::Matrix& c) {
    return c.squaredNorm();
  });
  CHECK((g - 2.0 * C).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("gradcheck defaults pass") {
  const auto r = dnms::harness::run_gradcheck({});
  CHECK(r.pass);
  CHECK(r.max_error_unrolled < 1e-4);
  CHECK(r.max_error_matching < 1e-4);
  const auto doc = json::parse(r.json);
  CHECK(doc["pass"] == true);
  CHECK(doc["instances"].size() == 10);
}

TEST_CASE("gradcheck at low temperature uses the relaxed threshold") {
  dnms::harness::GradcheckOptions o;
  o.tau = 0.05;
  const auto r = dnms::harness::run_gradcheck(o);
  CHECK(r.threshold == 1e-2);
  CHECK(json::parse(r.json).contains("max_error_unrolled"));
}

TEST_CASE("gradcheck with an absurd step fails with a note") {
  dnms::harness::GradcheckOptions o;
  o.fd_step = 10.0;
  const auto r = dnms::harness::run_gradcheck(o);
  CHECK_FALSE(r.pass);
  CHECK(json::parse(r.json).contains("note"));
}

TEST_CASE("convergence defaults pass") {
  const auto r = dnms::harness::run_convergence({});
  CHECK(r.pass);
  CHECK(r.contraction_checks == 60);
  CHECK(r.fw_checks == 100);
}

TEST_CASE("convergence argument checks") {
  dnms::harness::ConvergenceOptions o;
  o.trials = 0;
  CHECK_THROWS_AS(dnms::harness::run_convergence(o), dnms::InvalidInput);
  o = {};
  o.taus = {0.001};
  o.domain = dnms::DomainMode::kLinear;
  CHECK_THROWS_AS(dnms::harness::run_convergence(o), dnms::NumericalFailure);
}

TEST_CASE("bench report shape") {
  dnms::harness::BenchOptions o;
  o.m = 32;
  o.k = 4;
  o.repetitions = 3;
  const auto r = dnms::harness::run_bench(o);
  const auto doc = json::parse(r.json);
  CHECK(doc["options"]["repetitions"] == 3);
  CHECK(doc["methods"].size() == 3);
  CHECK(doc["timings_ms"].contains("dnms_median"));
  CHECK(doc["timings_ms"].contains("greedy_nms_median"));
  CHECK(doc["timings_ms"].contains("soft_nms_median"));

  o.m = 1;
  o.repetitions = 1;
  const auto one = json::parse(dnms::harness::run_bench(o).json);
  CHECK(one["scene"]["proposals"] == 1);
  for (const auto& m : one["methods"]) CHECK(m["count"] == 1);
}
