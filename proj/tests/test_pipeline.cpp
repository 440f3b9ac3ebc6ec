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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dnms/error.hpp"
#include "dnms/hungarian.hpp"
#include "dnms/pipeline.hpp"
#include "test_util.hpp"

using dnms::Matrix;

namespace {

dnms::ProposalSet two_boxes() {
  dnms::ProposalSet s;
  s.image_width = s.image_height = 10;
  s.feature_dim = 1;
  s.proposals = {{0, 0.8, {0, 0, 2, 2}, {1.0}, dnms::Mask(2, 1, {1, 0})},
                 {1, 0.6, {2, 0, 4, 2}, {3.0}, dnms::Mask(2, 1, {0, 0})}};
  return s;
}

}  // namespace

TEST_CASE("aggregate examples") {
  const auto set = two_boxes();
  Matrix S(2, 1);
  S << 0.2, 0.2;
  auto r = dnms::aggregate(S, set);
  REQUIRE(r.size() == 1);
  CHECK(r[0].box.x1 == doctest::Approx(1));
  CHECK(r[0].box.x2 == doctest::Approx(3));
  CHECK(r[0].box.y2 == doctest::Approx(2));
  CHECK(r[0].score == doctest::Approx(0.7));
  CHECK(r[0].feature[0] == doctest::Approx(2.0));
  REQUIRE(r[0].mask.has_value());
  CHECK(r[0].mask->at(0, 0) == doctest::Approx(0.5));
  CHECK(r[0].source_weights == std::vector<double>{0.5, 0.5});

  S << 0.75, 0.25;
  auto s = set;
  s.proposals[0].score = 1.0;
  s.proposals[1].score = 0.0;
  CHECK(dnms::aggregate(S, s)[0].score == doctest::Approx(0.75));

  Matrix hot(2, 2);
  hot << 0, 0.5, 0.5, 0;
  r = dnms::aggregate(hot, set);
  CHECK(r[0].box == set.proposals[1].box);
  CHECK(r[1].box == set.proposals[0].box);
  CHECK(r[1].mask == set.proposals[0].mask);

  Matrix zero = Matrix::Zero(2, 1);
  CHECK_THROWS_WITH_AS(dnms::aggregate(zero, set), "empty latent region", dnms::NumericalFailure);
}

TEST_CASE("aggregate masks only over proposals that carry one") {
  auto set = two_boxes();
  set.proposals[1].mask.reset();
  Matrix S(2, 1);
  S << 0.3, 0.7;
  auto r = dnms::aggregate(S, set);
  CHECK(r[0].mask == set.proposals[0].mask);
  set.proposals[0].mask.reset();
  r = dnms::aggregate(S, set);
  CHECK_FALSE(r[0].mask.has_value());
}

namespace {

// Largest coordinate error between each gt box and its nearest refined box.
double recovery_error(double tau, std::uint64_t seed) {
  dnms::SynthConfig sc;
  sc.jitter = 0.0;
  sc.score_noise = 0.0;
  sc.seed = seed;
  const auto [set, gt] = dnms::synth_generate(sc);
  dnms::PipelineConfig cfg;
  cfg.k = dnms::KMode::fixed(3);
  cfg.sinkhorn.tau = tau;
  const auto res = dnms::dnms(set, &gt, cfg);
  REQUIRE(res.refined.size() == 3);
  CHECK_FALSE(res.diagnostics.inference_mode);
  double worst = 0.0;
  for (const auto& b : gt.boxes) {
    double best = 1e300;
    for (const auto& r : res.refined) {
      best = std::min(best, std::max({std::abs(r.box.x1 - b.x1), std::abs(r.box.y1 - b.y1),
                                      std::abs(r.box.x2 - b.x2), std::abs(r.box.y2 - b.y2)}));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("dnms recovers zero-jitter scenes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(recovery_error(0.01, seed) < 1e-4);
}

TEST_CASE("entropic leakage at the default temperature") {
  // Cross-region costs are O(1), so at tau = 0.1 a fraction ~e^-10 of each
  // column's mass sits on other regions and pulls boxes by a few hundredths of
  // a pixel. The error is bounded but not 1e-4.
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) worst = std::max(worst, recovery_error(0.1, seed));
  CHECK(worst > 1e-4);
  CHECK(worst < 0.1);
}

TEST_CASE("dnms single proposal") {
  auto set = two_boxes();
  set.proposals.resize(1);
  dnms::PipelineConfig cfg;
  cfg.k = dnms::KMode::fixed(1);
  const auto res = dnms::dnms(set, nullptr, cfg);
  REQUIRE(res.refined.size() == 1);
  const auto& r = res.refined[0];
  const auto& p = set.proposals[0];
  CHECK(r.box == p.box);
  CHECK(r.score == p.score);
  CHECK(r.feature == p.feature);
  CHECK(r.mask == p.mask);
  CHECK(r.probability == 1.0);
  CHECK(res.diagnostics.entropy_threshold == 0.0);
  CHECK(res.diagnostics.inference_mode);
}

TEST_CASE("dnms invariants") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    dnms::SynthConfig sc;
    sc.seed = seed;
    sc.jitter = 12.0;
    sc.num_regions = 2 + static_cast<int>(seed % 3);
    const auto [set, gt] = dnms::synth_generate(sc);
    dnms::PipelineConfig cfg;
    cfg.seed = seed;
    const auto a = dnms::dnms(set, seed % 2 ? &gt : nullptr, cfg);
    const auto b = dnms::dnms(set, seed % 2 ? &gt : nullptr, cfg);
    CHECK(a.refined == b.refined);
    CHECK(a.refined.size() == a.diagnostics.K);
    CHECK(a.diagnostics.K == dnms::estimate_k(set));

    double smin = 1, smax = 0;
    for (const auto& p : set.proposals) {
      smin = std::min(smin, p.score);
      smax = std::max(smax, p.score);
    }
    double psum = 0.0;
    for (const auto& r : a.refined) {
      CHECK(r.score >= smin - 1e-12);
      CHECK(r.score <= smax + 1e-12);
      double wsum = 0.0;
      double lo = 1e300, hi = -1e300;
      for (std::size_t j = 0; j < set.size(); ++j) {
        CHECK(r.source_weights[j] >= 0.0);
        wsum += r.source_weights[j];
        if (r.source_weights[j] > 0) {
          lo = std::min(lo, set.proposals[j].box.x1);
          hi = std::max(hi, set.proposals[j].box.x1);
        }
      }
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.box.x1 >= lo - 1e-9);
      CHECK(r.box.x1 <= hi + 1e-9);
      psum += r.probability;
    }
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-10));
    for (std::size_t t = 1; t < a.diagnostics.marginal_trace.size(); ++t) {
      CHECK(a.diagnostics.marginal_trace[t] <= a.diagnostics.marginal_trace[t - 1] + 1e-15);
    }
    CHECK(a.diagnostics.rho == doctest::Approx(std::tanh(a.diagnostics.kappa / (4 * cfg.sinkhorn.tau))));
  }
}

TEST_CASE("low temperature concentrates columns on the Hungarian match") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 10 && seed < 200; ++seed) {
    dnms::SynthConfig sc;
    sc.seed = seed;
    sc.num_regions = 4;
    sc.proposals_per_region = 1;
    sc.jitter = 0.0;
    const auto set = dnms::synth_generate(sc).first;
    const auto cents = dnms::init_centroids(set, 4, seed);
    const Matrix C = dnms::build_cost(set, cents, {});
    const auto hung = dnms::hungarian_solve(C);
    // Require a clear second-best so the limit is unambiguous.
    double second = 1e300;
    std::vector<int> perm{0, 1, 2, 3};
    do {
      double s = 0;
      bool same = true;
      for (int i = 0; i < 4; ++i) {
        s += C(i, perm[static_cast<std::size_t>(i)]);
        same = same && hung.pairs[static_cast<std::size_t>(i)].second == perm[static_cast<std::size_t>(i)];
      }
      if (!same) second = std::min(second, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (second - hung.total_cost < 0.05) continue;
    ++checked;
    const auto s = dnms::solve(C, {0.01, 500, 1e-12, dnms::DomainMode::kAuto});
    const auto refined = dnms::aggregate(s.S, set);
    for (const auto& [j, k] : hung.pairs) {
      CHECK(refined[static_cast<std::size_t>(k)].source_weights[static_cast<std::size_t>(j)] >= 0.99);
    }
  }
  CHECK(checked == 10);
}

TEST_CASE("compare") {
  dnms::SynthConfig sc;
  sc.jitter = 0.0;
  sc.score_noise = 0.0;
  const auto [set, gt] = dnms::synth_generate(sc);
  dnms::PipelineConfig cfg;
  cfg.k = dnms::KMode::fixed(3);
  cfg.sinkhorn.tau = 0.01;
  const auto m = dnms::compare(set, gt, cfg);
  REQUIRE(m.size() == 3);
  CHECK(m[0].method == "dnms");
  CHECK(m[1].method == "greedy_nms");
  CHECK(m[2].method == "soft_nms");
  CHECK(m[0].mean_quality >= m[1].mean_quality);

  // All disjoint, K = M: everyone keeps everything.
  dnms::ProposalSet disjoint;
  disjoint.image_width = disjoint.image_height = 100;
  disjoint.feature_dim = 2;
  dnms::GroundTruth dgt;
  for (int i = 0; i < 4; ++i) {
    const double x = 20.0 * i;
    disjoint.proposals.push_back({i, 0.9, {x, 0, x + 10, 10}, {std::cos(i), std::sin(i)}, {}});
    dgt.boxes.push_back({x, 0, x + 10, 10});
    dgt.labels.push_back(0);
  }
  cfg.k = dnms::KMode::fixed(4);
  for (const auto& row : dnms::compare(disjoint, dgt, cfg)) CHECK(row.count == 4);

  CHECK_THROWS_AS(dnms::compare(set, dnms::GroundTruth{}, cfg), dnms::InvalidInput);
}

TEST_CASE("dnms rejects bad input") {
  dnms::PipelineConfig cfg;
  CHECK_THROWS_AS(dnms::dnms(dnms::ProposalSet{}, nullptr, cfg), dnms::InvalidInput);
  auto set = dnms::test::abc_fixture();
  cfg.k = dnms::KMode::fixed(4);
  CHECK_THROWS_AS(dnms::dnms(set, nullptr, cfg), dnms::InvalidInput);
}
