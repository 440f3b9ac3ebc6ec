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

enum class DomainMode { kAuto, kLog, kLinear };

struct SinkhornParams {
  double tau = 0.1;
  int iters = 10;
  double tol = 1e-9;
  DomainMode domain = DomainMode::kAuto;

  // Auto selects log-domain below this temperature.
  static constexpr double kLogDomainBelow = 0.5;
  bool log_domain() const {
    return domain == DomainMode::kLog ||
           (domain == DomainMode::kAuto && tau < kLogDomainBelow);
  }
};

// Row marginal a (length M) and column marginal b (length K), each strictly
// positive and summing to one.
struct Marginals {
  Vector a;
  Vector b;

  static Marginals uniform(Eigen::Index M, Eigen::Index K);
};

struct SoftAssignment {
  Matrix S;
  Marginals marginals;
  Vector u;  // row potentials, S = diag(e^{u/tau}) e^{-C/tau} diag(e^{v/tau})
  Vector v;  // column potentials
  std::vector<double> trace;  // L1 marginal violation after each iteration
  int iterations = 0;
  bool log_domain = false;
};

// exp(-C / tau), elementwise.
Matrix gibbs_kernel(const Matrix& C, double tau);

// Alternating row/column scaling of exp(-C/tau) towards (a, b). Runs
// params.iters full iterations, stopping early once the violation drops below
// params.tol. The column scaling is applied last, so column sums match b to
// rounding. Throws NumericalFailure on non-finite intermediates.
SoftAssignment solve(const Matrix& C, const SinkhornParams& params, const Marginals& marg);
SoftAssignment solve(const Matrix& C, const SinkhornParams& params);

// log(max P/Q * max Q/P); both matrices strictly positive.
double hilbert_distance(const Matrix& P, const Matrix& Q);

// Birkhoff rate tanh(kappa(C) / (4 tau)).
double contraction_rate(const Matrix& C, double tau);

struct ContractionReport {
  double kappa = 0.0;
  double rho = 0.0;
  std::vector<double> distances;  // d_H(P^t, P*) for t = 1, 2, ...
  std::vector<double> ratios;     // d_H(P^{t+1}, P*) / d_H(P^t, P*)
  double max_ratio = 0.0;
  int reference_iterations = 0;
  bool pass = true;
};

inline constexpr int kReferenceIters = 10000;
inline constexpr double kReferenceTol = 1e-14;
// Ratios are only formed while d_H(P^t, P*) exceeds this; below it the
// reference plan's own rounding dominates.
inline constexpr double kHilbertFloor = 1e-10;
inline constexpr double kContractionSlack = 1e-9;

// Runs params.iters iterations and checks each Hilbert-metric contraction
// ratio against contraction_rate(C, tau) + kContractionSlack. P^t is the
// coupling after the t-th full iteration, t >= 1.
ContractionReport verify_contraction(const Matrix& C, const SinkhornParams& params,
                                     const Marginals& marg);

// Reverse-mode derivative of <upstream, S> with respect to C, where S is the
// output of solve(C, params, marg) including early stopping.
Matrix grad_unrolled(const Matrix& C, const SinkhornParams& params, const Marginals& marg,
                     const Matrix& upstream);

// Contracts upstream with the closed form
//   dP_ij / dC_kl = -(1/tau) P_ij (delta_ik delta_jl - P_kl),
// i.e. out_kl = -(1/tau) (G_kl S_kl - S_kl <G, S>).
Matrix grad_analytic(const Matrix& S, double tau, const Matrix& upstream);

// Single global normalization of exp(-C/tau) over all entries. This is the
// map for which grad_analytic is the exact Jacobian.
Matrix global_softmax(const Matrix& C, double tau);

}  // namespace dnms
