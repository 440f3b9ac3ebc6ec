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

#include "dnms/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "dnms/error.hpp"

namespace dnms {
namespace {

struct SquareSolution {
  std::vector<Eigen::Index> col_of_row;
  Vector row_potential;
  Vector col_potential;
};

// Kuhn-Munkres with potentials on an n x n matrix, O(n^3).
SquareSolution solve_square(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Eigen::Index> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const Eigen::Index i0 = p[j0];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  SquareSolution sol;
  sol.col_of_row.assign(n, -1);
  for (Eigen::Index j = 1; j <= n; ++j) sol.col_of_row[p[j] - 1] = j - 1;
  sol.row_potential = Eigen::Map<Vector>(u.data() + 1, n);
  sol.col_potential = Eigen::Map<Vector>(v.data() + 1, n);
  return sol;
}

// Matching restricted to the real block; -1 marks an unmatched row.
struct Choice {
  std::vector<Eigen::Index> col_of_row;
  double cost = 0.0;
};

class TieBreaker {
 public:
  explicit TieBreaker(const Matrix& C) : C_(C), M_(C.rows()), K_(C.cols()) {
    n_ = std::max(M_, K_);
    const double max_abs = C.cwiseAbs().maxCoeff();
    const double pad = max_abs * static_cast<double>(std::min(M_, K_)) + 1.0;
    padded_ = Matrix::Constant(n_, n_, pad);
    padded_.topLeftCorner(M_, K_) = C;
    forbidden_ = (C.cwiseAbs().sum() + pad * static_cast<double>(n_) + 1.0) *
                 static_cast<double>(n_ + 1);
    tol_ = kTieTolerance * std::max(1.0, C.cwiseAbs().sum());
  }

  Assignment run() {
    const SquareSolution base = solve_square(padded_);
    Choice best = extract(base, padded_);
    const double optimum = best.cost;

    // Lower bound on any matching containing (r, c): optimum + reduced cost.
    auto reduced = [&](Eigen::Index r, Eigen::Index c) {
      return padded_(r, c) - base.row_potential(r) - base.col_potential(c);
    };

    Matrix constrained = padded_;
    for (Eigen::Index r = 0; r < M_; ++r) {
      const Eigen::Index current = best.col_of_row[r];
      const Eigen::Index limit = current < 0 ? K_ : current;
      for (Eigen::Index c = 0; c < limit; ++c) {
        if (constrained(r, c) >= forbidden_ || reduced(r, c) > tol_) continue;
        Matrix trial = constrained;
        force(trial, r, c);
        const SquareSolution sol = solve_square(trial);
        std::optional<Choice> cand = extract_if_allowed(sol, trial);
        if (cand && cand->cost <= optimum + tol_) {
          best = std::move(*cand);
          break;
        }
      }
      const Eigen::Index chosen = best.col_of_row[r];
      if (chosen >= 0) {
        force(constrained, r, chosen);
      } else {
        constrained.row(r).head(K_).setConstant(forbidden_);
      }
    }

    Assignment out;
    out.indicator = Matrix::Zero(M_, K_);
    for (Eigen::Index r = 0; r < M_; ++r) {
      const Eigen::Index c = best.col_of_row[r];
      if (c < 0) continue;
      out.pairs.emplace_back(r, c);
      out.indicator(r, c) = 1.0;
    }
    out.total_cost = best.cost;
    return out;
  }

 private:
  void force(Matrix& m, Eigen::Index r, Eigen::Index c) const {
    const double keep = m(r, c);
    m.row(r).setConstant(forbidden_);
    m.col(c).setConstant(forbidden_);
    m(r, c) = keep;
  }

  Choice extract(const SquareSolution& sol, const Matrix&) const {
    Choice ch;
    ch.col_of_row.assign(M_, -1);
    for (Eigen::Index r = 0; r < M_; ++r) {
      const Eigen::Index c = sol.col_of_row[r];
      if (c < K_) {
        ch.col_of_row[r] = c;
        ch.cost += C_(r, c);
      }
    }
    return ch;
  }

  std::optional<Choice> extract_if_allowed(const SquareSolution& sol, const Matrix& m) const {
    for (Eigen::Index r = 0; r < n_; ++r) {
      if (m(r, sol.col_of_row[r]) >= forbidden_) return std::nullopt;
    }
    return extract(sol, m);
  }

  const Matrix& C_;
  Eigen::Index M_, K_, n_;
  Matrix padded_;
  double forbidden_ = 0.0;
  double tol_ = 0.0;
};

}  // namespace

Assignment hungarian_solve(const Matrix& C) {
  if (C.rows() < 1 || C.cols() < 1) throw InvalidInput("cost matrix is empty");
  if (!C.allFinite()) throw InvalidInput("cost matrix has non-finite entries");
  return TieBreaker(C).run();
}

double kl_divergence(const Matrix& S, const Matrix& indicator, double eps) {
  if (S.rows() != indicator.rows() || S.cols() != indicator.cols()) {
    throw InvalidInput("kl_divergence: shape mismatch");
  }
  if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
  const Matrix s = S / S.sum();
  const Matrix p = (indicator.array() + eps).matrix() / (indicator.array() + eps).sum();
  double kl = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double si = s.data()[i];
    if (si > 0.0) kl += si * std::log(si / p.data()[i]);
  }
  return std::max(0.0, kl);
}

Matrix kl_divergence_grad(const Matrix& S, const Matrix& indicator, double eps) {
  const double total = S.sum();
  const double kl = kl_divergence(S, indicator, eps);
  const Matrix s = S / total;
  const Matrix p = (indicator.array() + eps).matrix() / (indicator.array() + eps).sum();
  Matrix g(S.rows(), S.cols());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double si = std::max(s.data()[i], std::numeric_limits<double>::min());
    g.data()[i] = (std::log(si / p.data()[i]) - kl) / total;
  }
  return g;
}

}  // namespace dnms
