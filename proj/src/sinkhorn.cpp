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

#include "dnms/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dnms/cost.hpp"
#include "dnms/error.hpp"

namespace dnms {
namespace {

constexpr const char* kNumericalFailure = "numerical failure; retry with log_domain";

void check_inputs(const Matrix& C, const SinkhornParams& params, const Marginals& marg) {
  if (!(params.tau > 0.0) || !std::isfinite(params.tau)) {
    throw InvalidInput("tau must be positive");
  }
  if (params.iters < 1) throw InvalidInput("iters must be at least 1");
  if (!(params.tol > 0.0)) throw InvalidInput("tol must be positive");
  if (C.rows() < 1 || C.cols() < 1) throw InvalidInput("cost matrix is empty");
  if (!C.allFinite()) throw InvalidInput("cost matrix has non-finite entries");
  if (marg.a.size() != C.rows() || marg.b.size() != C.cols()) {
    throw InvalidInput("marginal sizes do not match the cost matrix");
  }
  for (const Vector* m : {&marg.a, &marg.b}) {
    if (!((m->array() > 0.0).all()) || !m->allFinite() || std::abs(m->sum() - 1.0) > 1e-12) {
      throw InvalidInput("marginals must be strictly positive and sum to 1");
    }
  }
}

// log sum_k exp(x_k), stable.
double log_sum_exp(const auto& x) {
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((x.array() - m).exp().sum());
}

// One Sinkhorn run, advanced a full iteration (row then column scaling) at a
// time. Potentials are exposed in log form in both domains.
class SinkhornIterator {
 public:
  SinkhornIterator(const Matrix& C, double tau, bool log_domain, const Marginals& marg)
      : tau_(tau), log_domain_(log_domain), marg_(marg) {
    const Eigen::Index M = C.rows(), K = C.cols();
    if (log_domain_) {
      logK_ = -C / tau_;
      u_ = Vector::Zero(M);
      v_ = Vector::Zero(K);
    } else {
      kernel_ = gibbs_kernel(C, tau_);
      r_ = Vector::Ones(M);
      c_ = Vector::Ones(K);
    }
  }

  void step() {
    if (log_domain_) {
      const Vector log_a = marg_.a.array().log();
      const Vector log_b = marg_.b.array().log();
      for (Eigen::Index i = 0; i < logK_.rows(); ++i) {
        u_(i) = tau_ * (log_a(i) - log_sum_exp(logK_.row(i).transpose() + v_ / tau_));
      }
      for (Eigen::Index j = 0; j < logK_.cols(); ++j) {
        v_(j) = tau_ * (log_b(j) - log_sum_exp(logK_.col(j) + u_ / tau_));
      }
      if (!u_.allFinite() || !v_.allFinite()) throw NumericalFailure(kNumericalFailure);
    } else {
      const Vector row = kernel_ * c_;
      if (!((row.array() > 0.0).all()) || !row.allFinite()) {
        throw NumericalFailure(kNumericalFailure);
      }
      r_ = marg_.a.cwiseQuotient(row);
      const Vector col = kernel_.transpose() * r_;
      if (!((col.array() > 0.0).all()) || !col.allFinite()) {
        throw NumericalFailure(kNumericalFailure);
      }
      c_ = marg_.b.cwiseQuotient(col);
      if (!r_.allFinite() || !c_.allFinite()) throw NumericalFailure(kNumericalFailure);
    }
  }

  Matrix coupling() const {
    if (log_domain_) {
      Matrix S = logK_;
      S.colwise() += u_ / tau_;
      S.rowwise() += (v_ / tau_).transpose();
      return S.array().exp().matrix();
    }
    return r_.asDiagonal() * kernel_ * c_.asDiagonal();
  }

  Vector u() const { return log_domain_ ? u_ : Vector(tau_ * r_.array().log()); }
  Vector v() const { return log_domain_ ? v_ : Vector(tau_ * c_.array().log()); }

 private:
  double tau_;
  bool log_domain_;
  const Marginals& marg_;
  Matrix logK_;
  Matrix kernel_;
  Vector u_, v_;
  Vector r_, c_;
};

double marginal_violation(const Matrix& S, const Marginals& marg) {
  return (S.rowwise().sum() - marg.a).lpNorm<1>() +
         (S.colwise().sum().transpose() - marg.b).lpNorm<1>();
}

// Runs the solver, optionally recording the potentials after every
// iteration for the backward pass.
SoftAssignment run(const Matrix& C, const SinkhornParams& params, const Marginals& marg,
                   std::vector<Vector>* us, std::vector<Vector>* vs) {
  check_inputs(C, params, marg);
  SoftAssignment out;
  out.marginals = marg;
  out.log_domain = params.log_domain();
  SinkhornIterator it(C, params.tau, out.log_domain, marg);
  for (int t = 0; t < params.iters; ++t) {
    it.step();
    out.S = it.coupling();
    if (!out.S.allFinite()) throw NumericalFailure(kNumericalFailure);
    out.trace.push_back(marginal_violation(out.S, marg));
    ++out.iterations;
    if (us != nullptr) {
      us->push_back(it.u());
      vs->push_back(it.v());
    }
    if (out.trace.back() < params.tol) break;
  }
  out.u = it.u();
  out.v = it.v();
  return out;
}

}  // namespace

Marginals Marginals::uniform(Eigen::Index M, Eigen::Index K) {
  return {Vector::Constant(M, 1.0 / static_cast<double>(M)),
          Vector::Constant(K, 1.0 / static_cast<double>(K))};
}

Matrix gibbs_kernel(const Matrix& C, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("tau must be positive");
  // std::exp rather than Eigen's packet exp, which clamps its argument and so
  // never underflows to zero.
  return C.unaryExpr([tau](double c) { return std::exp(-c / tau); });
}

SoftAssignment solve(const Matrix& C, const SinkhornParams& params, const Marginals& marg) {
  return run(C, params, marg, nullptr, nullptr);
}

SoftAssignment solve(const Matrix& C, const SinkhornParams& params) {
  return solve(C, params, Marginals::uniform(C.rows(), C.cols()));
}

double hilbert_distance(const Matrix& P, const Matrix& Q) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols()) {
    throw InvalidInput("hilbert_distance: shape mismatch");
  }
  if (!((P.array() > 0.0).all()) || !((Q.array() > 0.0).all())) {
    throw InvalidInput("hilbert_distance: entries must be strictly positive");
  }
  // Log form avoids overflow in the product of the two maxima.
  const Matrix log_ratio = (P.array().log() - Q.array().log()).matrix();
  return std::max(0.0, log_ratio.maxCoeff() - log_ratio.minCoeff());
}

double contraction_rate(const Matrix& C, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("tau must be positive");
  return std::tanh(kappa(C) / (4.0 * tau));
}

ContractionReport verify_contraction(const Matrix& C, const SinkhornParams& params,
                                     const Marginals& marg) {
  check_inputs(C, params, marg);
  ContractionReport rep;
  rep.kappa = kappa(C);
  rep.rho = std::tanh(rep.kappa / (4.0 * params.tau));

  if (!params.log_domain() && !((gibbs_kernel(C, params.tau).array() > 0.0).all())) {
    throw NumericalFailure(kNumericalFailure);
  }

  SinkhornParams ref_params = params;
  ref_params.iters = kReferenceIters;
  ref_params.tol = kReferenceTol;
  const SoftAssignment ref = solve(C, ref_params, marg);
  rep.reference_iterations = ref.iterations;
  if (ref.trace.back() >= kReferenceTol) {
    throw NumericalFailure("reference plan did not converge within " +
                           std::to_string(kReferenceIters) + " iterations");
  }
  if (!((ref.S.array() > 0.0).all())) throw NumericalFailure(kNumericalFailure);

  SinkhornIterator it(C, params.tau, params.log_domain(), marg);
  for (int t = 0; t < params.iters; ++t) {
    it.step();
    const Matrix P = it.coupling();
    if (!((P.array() > 0.0).all()) || !P.allFinite()) throw NumericalFailure(kNumericalFailure);
    const double d = hilbert_distance(P, ref.S);
    if (!rep.distances.empty()) {
      const double prev = rep.distances.back();
      if (prev > kHilbertFloor) rep.ratios.push_back(d / prev);
    }
    rep.distances.push_back(d);
    if (d <= kHilbertFloor) break;
  }
  for (double r : rep.ratios) rep.max_ratio = std::max(rep.max_ratio, r);
  rep.pass = rep.max_ratio <= rep.rho + kContractionSlack;
  return rep;
}

Matrix grad_unrolled(const Matrix& C, const SinkhornParams& params, const Marginals& marg,
                     const Matrix& upstream) {
  if (upstream.rows() != C.rows() || upstream.cols() != C.cols()) {
    throw InvalidInput("upstream gradient shape mismatch");
  }
  std::vector<Vector> us, vs;
  const SoftAssignment sa = run(C, params, marg, &us, &vs);
  const double tau = params.tau;
  const Eigen::Index M = C.rows(), K = C.cols();

  // Output S_ij = exp((u_i + v_j - C_ij) / tau).
  const Matrix g = upstream.cwiseProduct(sa.S) / tau;
  Matrix grad = -g;
  Vector u_bar = g.rowwise().sum();
  Vector v_bar = g.colwise().sum().transpose();

  Matrix R(M, K), Q(M, K);
  for (int t = sa.iterations - 1; t >= 0; --t) {
    const Vector& u = us[t];
    const Vector v_prev = t > 0 ? vs[t - 1] : Vector::Zero(K);

    // Column step: v_j = tau log b_j - tau LSE_i((u_i - C_ij)/tau).
    for (Eigen::Index j = 0; j < K; ++j) {
      const Vector z = (u - C.col(j)) / tau;
      const double lse = log_sum_exp(z);
      Q.col(j) = (z.array() - lse).exp().matrix();
    }
    grad += Q * v_bar.asDiagonal();
    u_bar -= Q * v_bar;

    // Row step: u_i = tau log a_i - tau LSE_j((v_j - C_ij)/tau).
    for (Eigen::Index i = 0; i < M; ++i) {
      const Vector z = (v_prev - C.row(i).transpose()) / tau;
      const double lse = log_sum_exp(z);
      R.row(i) = (z.array() - lse).exp().matrix().transpose();
    }
    grad += u_bar.asDiagonal() * R;
    v_bar = -(R.transpose() * u_bar);
    u_bar.setZero();
  }
  return grad;
}

Matrix grad_analytic(const Matrix& S, double tau, const Matrix& upstream) {
  if (!(tau > 0.0)) throw InvalidInput("tau must be positive");
  if (upstream.rows() != S.rows() || upstream.cols() != S.cols()) {
    throw InvalidInput("upstream gradient shape mismatch");
  }
  const double inner = upstream.cwiseProduct(S).sum();
  return -(upstream.cwiseProduct(S) - inner * S) / tau;
}

Matrix global_softmax(const Matrix& C, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("tau must be positive");
  const Matrix z = -C / tau;
  const Matrix e = (z.array() - z.maxCoeff()).exp().matrix();
  return e / e.sum();
}

}  // namespace dnms
