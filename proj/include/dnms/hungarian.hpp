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

#include <utility>
#include <vector>

#include "dnms/linalg.hpp"
#include "dnms/sinkhorn.hpp"

namespace dnms {

struct Assignment {
  // (row, column) pairs sorted by row, zero-based.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  double total_cost = 0.0;
  Matrix indicator;  // M x K, 1 on matched pairs
};

// Minimum-cost matching of cardinality min(M, K). Rectangular inputs are
// padded to square; padded pairs are dropped. Among optimal matchings the
// lexicographically smallest pair list is returned. Costs within
// kTieTolerance * max(1, sum |C|) of the optimum count as optimal.
Assignment hungarian_solve(const Matrix& C);

inline constexpr double kTieTolerance = 1e-12;

// KL(S_bar || P_bar) with S_bar = S / sum(S), P_bar = (P + eps) / sum(P + eps).
// Entries with S_bar = 0 contribute nothing.
double kl_divergence(const Matrix& S, const Matrix& indicator, double eps = 1e-6);

// Gradient of kl_divergence with respect to S (indicator held fixed).
Matrix kl_divergence_grad(const Matrix& S, const Matrix& indicator, double eps = 1e-6);

}  // namespace dnms
