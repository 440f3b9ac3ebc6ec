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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dnms/linalg.hpp"
#include "dnms/pipeline.hpp"
#include "dnms/sinkhorn.hpp"

// Verification and benchmark drivers behind the gradcheck, convergence and
// bench commands. Reports are JSON documents; anything that depends on wall
// clock lives under a top-level "timings_ms" key.
namespace dnms::harness {

// Max-normalized error ||g - fd||_inf / max(||fd||_inf, 1e-12).
double relative_error(const Matrix& analytic, const Matrix& numeric);

// Central differences of a scalar function of C.
template <typename F>
Matrix finite_difference(const Matrix& C, double step, F&& f) {
  Matrix g(C.rows(), C.cols());
  Matrix work = C;
  for (Eigen::Index i = 0; i < C.size(); ++i) {
    const double orig = work.data()[i];
    work.data()[i] = orig + step;
    const double up = f(work);
    work.data()[i] = orig - step;
    const double down = f(work);
    work.data()[i] = orig;
    g.data()[i] = (up - down) / (2.0 * step);
  }
  return g;
}

// Pass threshold for the gradient check as a function of temperature:
//   tau >= 0.5        -> 1e-4
//   0.1 <= tau < 0.5  -> 1e-3
//   tau < 0.1         -> 1e-2
double gradcheck_threshold(double tau);

struct GradcheckOptions {
  int m = 4;
  int k = 3;
  double tau = 1.0;
  int iters = 10;
  std::uint64_t seed = 0;
  double fd_step = 1e-5;
  int instances = 10;
  double lambda_kl = 0.5;
  DomainMode domain = DomainMode::kAuto;
};

struct GradcheckReport {
  double threshold = 0.0;
  double max_error_unrolled = 0.0;
  double max_error_matching = 0.0;
  bool pass = false;
  std::string json;
};

GradcheckReport run_gradcheck(const GradcheckOptions& opt);

struct ConvergenceOptions {
  int max_m = 10;
  int max_k = 6;
  std::vector<double> taus{0.5, 1.0, 2.0};
  int trials = 20;
  int iters = 200;
  std::uint64_t seed = 0;
  DomainMode domain = DomainMode::kAuto;
  int fw_trials = 100;
};

struct ConvergenceReport {
  int contraction_checks = 0;
  int contraction_failures = 0;
  int fw_checks = 0;
  int fw_failures = 0;
  bool pass = false;
  std::string json;
};

// Throws NumericalFailure when a kernel cannot be formed in the requested
// domain.
ConvergenceReport run_convergence(const ConvergenceOptions& opt);

struct BenchOptions {
  int m = 256;
  int k = 16;
  int iters = 10;
  int repetitions = 11;
  std::uint64_t seed = 0;
  PipelineConfig pipeline;
};

struct BenchReport {
  double dnms_median_ms = 0.0;
  double greedy_median_ms = 0.0;
  double soft_median_ms = 0.0;
  std::string json;
};

BenchReport run_bench(const BenchOptions& opt);

// Uniform [lo, hi) entries from the repository generator.
Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = 0.0,
                     double hi = 1.0);

}  // namespace dnms::harness
