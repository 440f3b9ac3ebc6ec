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
#include <vector>

#include "doctest.h"
#include "dnms/cost.hpp"
#include "dnms/error.hpp"
#include "test_util.hpp"

TEST_CASE("feature distance") {
  const std::vector<double> mu{0.3, -1.2, 2.0};
  std::vector<double> neg = mu;
  for (double& x : neg) x = -x;
  CHECK(dnms::feature_distance(mu, mu) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dnms::feature_distance(neg, mu) == doctest::Approx(2.0));
  CHECK(dnms::feature_distance(std::vector<double>{1, 0}, std::vector<double>{1, 1}) ==
        doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(dnms::feature_distance(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 1.0);
}

TEST_CASE("spatial distance") {
  CHECK(dnms::spatial_distance({0, 0, 4, 4}, {2, 2}, 10) == 0.0);
  CHECK(dnms::spatial_distance({-1, -1, 1, 1}, {3, 4}, 10) == doctest::Approx(0.5));
  const double diag = std::hypot(640.0, 480.0);
  CHECK(dnms::spatial_distance({0, 0, 0, 0}, {640, 480}, diag) <= 1.0);
}

TEST_CASE("build_cost examples") {
  auto set = dnms::test::abc_fixture();
  for (auto& p : set.proposals) p.score = 1.0;
  const auto cents = dnms::init_centroids(set, 2, 0);
  CHECK(dnms::build_cost(set, cents, {1, 0, 0}).isZero());

  dnms::ProposalSet single;
  single.image_width = single.image_height = 10;
  single.feature_dim = 2;
  single.proposals = {{0, 1.0, {2, 2, 4, 4}, {0.6, 0.8}, {}}};
  dnms::Centroids c1;
  c1.features = dnms::Matrix(1, 2);
  c1.features << 0.6, 0.8;
  c1.spatial = {{3, 3}};
  const dnms::Matrix C1 = dnms::build_cost(single, c1, {});
  CHECK(C1.rows() == 1);
  CHECK(std::abs(C1(0, 0)) < 1e-12);

  auto two = set;
  two.proposals.resize(2);
  two.proposals[1].score = 0.5;
  const dnms::Matrix C2 = dnms::build_cost(two, dnms::init_centroids(two, 2, 0), {1, 0, 0});
  CHECK(C2(0, 0) == 0.0);
  CHECK(C2(0, 1) == 0.0);
  CHECK(C2(1, 0) == 0.5);
  CHECK(C2(1, 1) == 0.5);
}

TEST_CASE("build_cost checks inputs") {
  const auto set = dnms::test::abc_fixture();
  auto cents = dnms::init_centroids(set, 2, 0);
  CHECK_THROWS_AS(dnms::build_cost(set, cents, {0, 0, 0}), dnms::InvalidInput);
  CHECK_THROWS_AS(dnms::build_cost(set, cents, {-1, 1, 1}), dnms::InvalidInput);
  cents.features = dnms::Matrix::Zero(2, 5);
  CHECK_THROWS_AS(dnms::build_cost(set, cents, {}), dnms::InvalidInput);
}

TEST_CASE("build_cost is nonnegative and permutation-equivariant") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    dnms::SynthConfig cfg;
    cfg.seed = seed;
    cfg.jitter = 8.0;
    const auto set = dnms::synth_generate(cfg).first;
    const auto cents = dnms::init_centroids(set, 3, seed);
    const dnms::CostWeights w{0.5, 2.0, 1.5};
    const dnms::Matrix C = dnms::build_cost(set, cents, w);
    CHECK(C.minCoeff() >= 0.0);

    auto perm = set;
    std::reverse(perm.proposals.begin(), perm.proposals.end());
    const dnms::Matrix P = dnms::build_cost(perm, cents, w);
    CHECK(P == C.colwise().reverse());
  }
}

TEST_CASE("kappa examples") {
  CHECK(dnms::kappa(dnms::Matrix::Constant(3, 4, 2.5)) == 0.0);
  dnms::Matrix C(2, 2);
  C << 0, 1, 1, 0;
  CHECK(dnms::kappa(C) == 2.0);
  const dnms::Matrix R = dnms::test::random_matrix(5, 4, 77);
  CHECK(dnms::kappa(R) == doctest::Approx(dnms::test::kappa_brute(R)).epsilon(1e-14));
}

TEST_CASE("kappa matches the quadruple loop") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    dnms::Rng rng(seed);
    const auto M = static_cast<Eigen::Index>(1 + rng.index(7));
    const auto K = static_cast<Eigen::Index>(1 + rng.index(7));
    const dnms::Matrix C = dnms::test::random_matrix(M, K, seed, -3, 3);
    CHECK(std::abs(dnms::kappa(C) - dnms::test::kappa_brute(C)) <= 1e-12);
  }
}

TEST_CASE("kappa invariances") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const dnms::Matrix C = dnms::test::random_matrix(5, 4, seed);
    const double k = dnms::kappa(C);
    dnms::Matrix shifted = C;
    shifted.row(2).array() += 3.7;
    shifted.col(1).array() -= 1.3;
    CHECK(dnms::kappa(shifted) == doctest::Approx(k).epsilon(1e-12));
    CHECK(dnms::kappa(-2.5 * C) == doctest::Approx(2.5 * k).epsilon(1e-12));
  }
}
