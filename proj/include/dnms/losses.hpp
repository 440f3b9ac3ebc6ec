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
#include <vector>

#include "dnms/geometry.hpp"
#include "dnms/hungarian.hpp"
#include "dnms/linalg.hpp"
#include "dnms/sinkhorn.hpp"

namespace dnms {

struct LossWeights {
  double lambda_kl = 0.0;  // KL regularizer inside the matching loss
  double lambda1 = 1.0;    // matching term
  double lambda2 = 1.0;    // TV term
  double lambda3 = 0.0;    // accepted for parity with the training recipe; unused
};

struct LossReport {
  double l_cls = 0.0;
  double l_match = 0.0;
  double l_reg = 0.0;
  double total = 0.0;
};

inline constexpr double kBceEps = 1e-7;
inline constexpr double kKlEps = 1e-6;

// <C, S> + lambda_kl * KL(S || P*), with P* smoothed by kKlEps.
double matching_loss(const Matrix& C, const Matrix& S, const Assignment& pstar,
                     double lambda_kl);

// Binary cross-entropy with p clamped to [kBceEps, 1 - kBceEps].
double bce(double p, int y);
double bce_mean(std::span<const double> p, std::span<const int> y);

// Sum of total variation over the masks.
double tv_loss(std::span<const Mask> masks);

LossReport total_loss(double l_cls, double l_match, double l_reg, const LossWeights& w);

// d matching_loss / dC where S = solve(C, params, marg) and P* is held
// constant: S + grad_unrolled(upstream = C + lambda_kl dKL/dS).
Matrix grad_matching_wrt_cost(const Matrix& C, const SinkhornParams& params,
                              const Marginals& marg, const Assignment& pstar,
                              double lambda_kl);

// Classification targets for refined boxes: 1 iff quality_score >= 0.5.
std::vector<int> refined_labels(std::span<const Box> refined, std::span<const Box> gt);

}  // namespace dnms
