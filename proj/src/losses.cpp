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

#include "dnms/losses.hpp"

#include <algorithm>
#include <cmath>

#include "dnms/error.hpp"

namespace dnms {

double matching_loss(const Matrix& C, const Matrix& S, const Assignment& pstar,
                     double lambda_kl) {
  if (C.rows() != S.rows() || C.cols() != S.cols()) {
    throw InvalidInput("matching_loss: shape mismatch");
  }
  double loss = C.cwiseProduct(S).sum();
  if (lambda_kl != 0.0) loss += lambda_kl * kl_divergence(S, pstar.indicator, kKlEps);
  return loss;
}

double bce(double p, int y) {
  const double q = std::clamp(p, kBceEps, 1.0 - kBceEps);
  return y != 0 ? -std::log(q) : -std::log(1.0 - q);
}

double bce_mean(std::span<const double> p, std::span<const int> y) {
  if (p.size() != y.size()) throw InvalidInput("bce_mean: size mismatch");
  if (p.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += bce(p[i], y[i]);
  return sum / static_cast<double>(p.size());
}

double tv_loss(std::span<const Mask> masks) {
  double sum = 0.0;
  for (const Mask& m : masks) sum += total_variation(m);
  return sum;
}

LossReport total_loss(double l_cls, double l_match, double l_reg, const LossWeights& w) {
  LossReport r{l_cls, l_match, l_reg, 0.0};
  r.total = l_cls + w.lambda1 * l_match + w.lambda2 * l_reg;
  return r;
}

Matrix grad_matching_wrt_cost(const Matrix& C, const SinkhornParams& params,
                              const Marginals& marg, const Assignment& pstar,
                              double lambda_kl) {
  const SoftAssignment sa = solve(C, params, marg);
  Matrix upstream = C;
  if (lambda_kl != 0.0) {
    upstream += lambda_kl * kl_divergence_grad(sa.S, pstar.indicator, kKlEps);
  }
  return sa.S + grad_unrolled(C, params, marg, upstream);
}

std::vector<int> refined_labels(std::span<const Box> refined, std::span<const Box> gt) {
  std::vector<int> y;
  y.reserve(refined.size());
  for (const Box& b : refined) y.push_back(quality_score(b, gt) >= 0.5 ? 1 : 0);
  return y;
}

}  // namespace dnms
