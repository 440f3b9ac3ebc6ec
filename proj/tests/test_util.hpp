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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "dnms/geometry.hpp"
#include "dnms/linalg.hpp"
#include "dnms/proposals.hpp"
#include "dnms/rng.hpp"

namespace dnms::test {

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed,
                            double lo = 0.0, double hi = 1.0) {
  Rng rng(seed ^ 0x5eedULL);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

// Brute-force kappa, kept separate from the library's range-based version.
inline double kappa_brute(const Matrix& C) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < C.rows(); ++i)
    for (Eigen::Index k = 0; k < C.rows(); ++k)
      for (Eigen::Index j = 0; j < C.cols(); ++j)
        for (Eigen::Index l = 0; l < C.cols(); ++l)
          best = std::max(best, std::abs(C(i, j) - C(i, l) - C(k, j) + C(k, l)));
  return best;
}

// Exhaustive min-cost matching of cardinality min(M, K).
inline double brute_assignment_cost(const Matrix& C) {
  const bool tall = C.rows() > C.cols();
  const Matrix A = tall ? Matrix(C.transpose()) : C;  // rows <= cols
  std::vector<int> cols(static_cast<std::size_t>(A.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) s += A(i, cols[static_cast<std::size_t>(i)]);
    best = std::min(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

// A, B (IoU 0.6 with A) and a disjoint C.
inline ProposalSet abc_fixture() {
  ProposalSet s;
  s.image_width = 100.0;
  s.image_height = 100.0;
  s.feature_dim = 2;
  s.proposals = {
      {0, 0.9, {0, 0, 10, 10}, {1.0, 0.0}, {}},
      {1, 0.8, {2.5, 0, 12.5, 10}, {0.9, 0.1}, {}},
      {2, 0.7, {50, 50, 60, 60}, {0.0, 1.0}, {}},
  };
  return s;
}

inline std::vector<std::int64_t> ids(const ProposalSet& s) {
  std::vector<std::int64_t> out;
  for (const auto& p : s.proposals) out.push_back(p.id);
  return out;
}

}  // namespace dnms::test
