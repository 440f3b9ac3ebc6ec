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

#include "dnms/cost.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "dnms/error.hpp"

namespace dnms {

double feature_distance(std::span<const double> f, std::span<const double> mu) {
  if (f.size() != mu.size()) throw InvalidInput("feature dimension mismatch");
  const double dot = std::inner_product(f.begin(), f.end(), mu.begin(), 0.0);
  const double nf = std::sqrt(std::inner_product(f.begin(), f.end(), f.begin(), 0.0));
  const double nm = std::sqrt(std::inner_product(mu.begin(), mu.end(), mu.begin(), 0.0));
  if (nf == 0.0 || nm == 0.0) {
    std::clog << "dnms: zero feature vector in cosine distance, using 1.0\n";
    return 1.0;
  }
  return std::clamp(1.0 - dot / (nf * nm), 0.0, 2.0);
}

double spatial_distance(const Box& box, const Point2& nu, double image_diag) {
  if (!(image_diag > 0.0)) throw InvalidInput("image diagonal must be positive");
  return std::hypot(box.center_x() - nu.x, box.center_y() - nu.y) / image_diag;
}

Matrix build_cost(const ProposalSet& set, const Centroids& cents, const CostWeights& w) {
  if (!(w.alpha >= 0.0 && w.beta >= 0.0 && w.gamma >= 0.0)) {
    throw InvalidInput("cost weights must be nonnegative");
  }
  if (w.alpha == 0.0 && w.beta == 0.0 && w.gamma == 0.0) {
    throw InvalidInput("cost weights must not all be zero");
  }
  const auto M = static_cast<Eigen::Index>(set.size());
  const auto K = static_cast<Eigen::Index>(cents.K());
  if (cents.features.rows() != K) throw InvalidInput("centroid count mismatch");
  if (cents.features.cols() != static_cast<Eigen::Index>(set.feature_dim)) {
    throw InvalidInput("centroid feature dimension does not match proposals");
  }
  const double diag = set.image_diagonal();

  Matrix C(M, K);
  std::vector<double> mu(set.feature_dim);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index f = 0; f < cents.features.cols(); ++f) mu[f] = cents.features(k, f);
    for (Eigen::Index j = 0; j < M; ++j) {
      const Proposal& p = set.proposals[j];
      if (p.feature.size() != set.feature_dim) {
        throw InvalidInput("feature dimension mismatch in proposal " + std::to_string(p.id));
      }
      C(j, k) = w.alpha * (1.0 - p.score) + w.beta * feature_distance(p.feature, mu) +
                w.gamma * spatial_distance(p.box, cents.spatial[k], diag);
    }
  }
  return C;
}

double kappa(const Matrix& C) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    for (Eigen::Index l = j + 1; l < C.cols(); ++l) {
      const Vector d = C.col(j) - C.col(l);
      best = std::max(best, d.maxCoeff() - d.minCoeff());
    }
  }
  return best;
}

}  // namespace dnms
