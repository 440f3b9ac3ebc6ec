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

#include <vector>

#include "dnms/linalg.hpp"

namespace dnms {

struct RefineParams {
  double tau_h = 0.6;  // entropy threshold, nats
  int max_iters = 50;
  double delta = 1e-8;
  double lambda_min = 0.001;
  double lambda_max = 100.0;
  double bisect_eps = 1e-6;
};

// Shannon entropy in nats, 0 log 0 = 0.
double entropy(const Vector& p);

// softmax(q / lambda).
Vector tempered_softmax(const Vector& q, double lambda);

struct LmoResult {
  Vector s;
  double lambda = 0.0;
  bool fallback_uniform = false;  // threshold unreachable at lambda_max
};

// Maximizer of <q, s> over the simplex intersected with {H(s) >= tau_h},
// through the dual softmax family s(lambda) = softmax(q / lambda).
// Bisection keeps the larger-lambda endpoint so the returned point is
// always feasible. Throws InvalidInput when tau_h > ln K.
LmoResult lmo_entropy(const Vector& q, const RefineParams& params);

// Exact line search for a linear objective: 1 if <q, s> > <q, p>, else 0.
double line_search(const Vector& p, const Vector& s, const Vector& q);

struct FrankWolfeResult {
  Vector p;
  int iterations = 0;
  std::vector<double> objective_trace;  // f(p^t) for t = 0 .. iterations
  bool fallback_uniform = false;
};

// Conditional gradient from the uniform distribution, stopping when the
// objective changes by less than delta or after max_iters iterations.
FrankWolfeResult frank_wolfe(const Vector& q, const RefineParams& params);

// <q, lmo(q) - p>, clamped at zero.
double duality_gap(const Vector& p, const Vector& q, const RefineParams& params);

}  // namespace dnms
