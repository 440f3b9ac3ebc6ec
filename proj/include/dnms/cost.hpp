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

#include <span>

#include "dnms/clustering.hpp"
#include "dnms/linalg.hpp"
#include "dnms/proposals.hpp"

namespace dnms {

// Weights on the score, feature and spatial terms of the assignment cost.
struct CostWeights {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
};

// Cosine distance in [0, 2]. A zero vector on either side yields 1.
double feature_distance(std::span<const double> f, std::span<const double> mu);

// Distance from the box centre to `nu`, divided by the image diagonal.
double spatial_distance(const Box& box, const Point2& nu, double image_diag);

// M x K cost: alpha (1 - s_j) + beta d_feat(f_j, mu_k) + gamma d_spatial(b_j, nu_k).
Matrix build_cost(const ProposalSet& set, const Centroids& cents, const CostWeights& w);

// Cost diameter: max over (i, j, k, l) of |C_ij - C_il - C_kj + C_kl|.
//
// For a fixed column pair (j, l) the inner maximum over rows is the range of
// D_i = C_ij - C_il, so the exact value is found in O(M K^2).
double kappa(const Matrix& C);

}  // namespace dnms
