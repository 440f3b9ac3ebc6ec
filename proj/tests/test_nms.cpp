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

#include <cmath>

#include "doctest.h"
#include "dnms/nms.hpp"
#include "dnms/rng.hpp"
#include "test_util.hpp"

using dnms::test::abc_fixture;
using dnms::test::ids;

TEST_CASE("greedy nms fixture") {
  const auto set = abc_fixture();
  CHECK(ids(dnms::greedy_nms(set, 0.5)) == std::vector<std::int64_t>{0, 2});
  CHECK(ids(dnms::greedy_nms(set, 0.7)) == std::vector<std::int64_t>{0, 1, 2});
  auto one = set;
  one.proposals.resize(1);
  CHECK(dnms::greedy_nms(one, 0.5) == one);
}

TEST_CASE("greedy nms breaks score ties by lower id") {
  auto set = abc_fixture();
  set.proposals[0].score = 0.8;  // tie with B
  set.proposals[0].id = 5;
  CHECK(ids(dnms::greedy_nms(set, 0.5)) == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("soft nms fixture") {
  const auto set = abc_fixture();
  const auto out = dnms::soft_nms(set, 0.5, 0.0);
  REQUIRE(out.size() == 3);
  CHECK(out.proposals[0].score == 0.9);
  // 0.8 * exp(-0.6^2 / 0.5)
  CHECK(out.proposals[1].score == doctest::Approx(0.38940180476797737).epsilon(1e-10));
  CHECK(out.proposals[2].score == 0.7);

  const auto top = dnms::soft_nms(set, 0.5, 1.0);
  CHECK(ids(top) == std::vector<std::int64_t>{0});
}

TEST_CASE("soft nms leaves disjoint proposals alone") {
  auto set = abc_fixture();
  set.proposals[1].box = {20, 20, 30, 30};
  const auto out = dnms::soft_nms(set, 0.5, 0.01);
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(out.proposals[i].score == set.proposals[i].score);
}

TEST_CASE("baseline properties") {
  dnms::Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    dnms::SynthConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(t);
    cfg.jitter = 10.0;
    const auto set = dnms::synth_generate(cfg).first;
    const auto greedy = dnms::greedy_nms(set, rng.uniform(0.1, 0.9));
    for (const auto& p : greedy.proposals) {
      bool found = false;
      for (const auto& q : set.proposals) found = found || p == q;
      CHECK(found);
    }
    const auto soft = dnms::soft_nms(set, rng.uniform(0.1, 1.0), 0.05);
    for (const auto& p : soft.proposals) {
      for (const auto& q : set.proposals) {
        if (q.id == p.id) CHECK(p.score <= q.score);
      }
    }
  }
}
