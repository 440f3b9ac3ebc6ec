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

#include "dnms/refine.hpp"

#include <cmath>
#include <iostream>

#include "dnms/error.hpp"

namespace dnms {
namespace {

void check(const Vector& q, const RefineParams& params) {
  if (q.size() < 1) throw InvalidInput("quality vector is empty");
  if (!q.allFinite()) throw InvalidInput("quality vector has non-finite entries");
  if (!(params.lambda_min > 0.0 && params.lambda_min < params.lambda_max)) {
    throw InvalidInput("need 0 < lambda_min < lambda_max");
  }
  if (!(params.bisect_eps > 0.0)) throw InvalidInput("bisect_eps must be positive");
  if (!(params.tau_h >= 0.0)) throw InvalidInput("entropy threshold must be nonnegative");
  // Rounding slack so that tau_h = ln K computed elsewhere is accepted.
  if (params.tau_h > std::log(static_cast<double>(q.size())) + 1e-12) {
    throw InvalidInput("infeasible entropy threshold");
  }
}

}  // namespace

double entropy(const Vector& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

Vector tempered_softmax(const Vector& q, double lambda) {
  const Vector z = q / lambda;
  const Vector e = (z.array() - z.maxCoeff()).exp().matrix();
  return e / e.sum();
}

LmoResult lmo_entropy(const Vector& q, const RefineParams& params) {
  check(q, params);
  const auto K = q.size();
  LmoResult out;

  out.s = tempered_softmax(q, params.lambda_min);
  out.lambda = params.lambda_min;
  if (entropy(out.s) >= params.tau_h) return out;

  const Vector at_max = tempered_softmax(q, params.lambda_max);
  if (entropy(at_max) < params.tau_h) {
    std::clog << "dnms: entropy threshold unreachable at lambda_max, using uniform\n";
    out.s = Vector::Constant(K, 1.0 / static_cast<double>(K));
    out.lambda = params.lambda_max;
    out.fallback_uniform = true;
    return out;
  }

  double lo = params.lambda_min;
  double hi = params.lambda_max;
  while (hi - lo > params.bisect_eps) {
    const double mid = 0.5 * (lo + hi);
    if (entropy(tempered_softmax(q, mid)) < params.tau_h) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.s = tempered_softmax(q, hi);
  out.lambda = hi;
  return out;
}

double line_search(const Vector& p, const Vector& s, const Vector& q) {
  return q.dot(s) > q.dot(p) ? 1.0 : 0.0;
}

FrankWolfeResult frank_wolfe(const Vector& q, const RefineParams& params) {
  check(q, params);
  if (params.max_iters < 1) throw InvalidInput("max_iters must be positive");
  if (!(params.delta > 0.0)) throw InvalidInput("delta must be positive");

  const auto K = q.size();
  FrankWolfeResult out;
  out.p = Vector::Constant(K, 1.0 / static_cast<double>(K));
  double f = q.dot(out.p);
  out.objective_trace.push_back(f);

  for (int t = 0; t < params.max_iters; ++t) {
    // The gradient of a linear objective is q at every iterate, so the
    // oracle answer does not change between iterations.
    const LmoResult lmo = lmo_entropy(q, params);
    out.fallback_uniform = lmo.fallback_uniform;
    const double gamma = line_search(out.p, lmo.s, q);
    out.p = (1.0 - gamma) * out.p + gamma * lmo.s;
    const double next = q.dot(out.p);
    out.objective_trace.push_back(next);
    ++out.iterations;
    const bool converged = std::abs(next - f) < params.delta;
    f = next;
    if (converged) break;
  }
  return out;
}

double duality_gap(const Vector& p, const Vector& q, const RefineParams& params) {
  const LmoResult lmo = lmo_entropy(q, params);
  return std::max(0.0, q.dot(lmo.s - p));
}

}  // namespace dnms
