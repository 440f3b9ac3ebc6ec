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

#include "dnms/clustering.hpp"

#include <algorithm>
#include <limits>

#include "dnms/error.hpp"
#include "dnms/nms.hpp"

namespace dnms {
namespace {

std::vector<std::size_t> assign(const Matrix& points, const Matrix& centroids) {
  std::vector<std::size_t> labels(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<std::size_t>(c);
      }
    }
    labels[i] = arg;
  }
  return labels;
}

// Means of the labelled points; empty clusters take the point farthest from
// its own centroid, drawn from clusters that can spare one.
Matrix update(const Matrix& points, std::vector<std::size_t>& labels, std::size_t K) {
  const Eigen::Index d = points.cols();
  Matrix centroids = Matrix::Zero(static_cast<Eigen::Index>(K), d);
  std::vector<std::size_t> counts(K, 0);
  auto recompute = [&] {
    centroids.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      centroids.row(labels[i]) += points.row(i);
      ++counts[labels[i]];
    }
    for (std::size_t c = 0; c < K; ++c) {
      if (counts[c] > 0) centroids.row(c) /= static_cast<double>(counts[c]);
    }
  };
  recompute();
  for (std::size_t c = 0; c < K; ++c) {
    if (counts[c] > 0) continue;
    double far = -1.0;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (counts[labels[i]] < 2) continue;
      const double dist = (points.row(i) - centroids.row(labels[i])).squaredNorm();
      if (dist > far) {
        far = dist;
        pick = i;
      }
    }
    labels[pick] = c;
    recompute();
  }
  return centroids;
}

}  // namespace

double within_cluster_ss(const Matrix& points, const Matrix& centroids,
                         const std::vector<std::size_t>& labels) {
  double ss = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    ss += (points.row(i) - centroids.row(labels[i])).squaredNorm();
  }
  return ss;
}

KMeansResult kmeans(const Matrix& points, std::size_t K, std::uint64_t seed,
                    int max_iters) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (K == 0) throw InvalidInput("K must be positive");
  if (K > n) throw InvalidInput("insufficient points");
  if (max_iters < 1) throw InvalidInput("max_iters must be positive");

  // Seeded farthest-point initialization over distinct rows.
  Matrix centroids(static_cast<Eigen::Index>(K), points.cols());
  std::vector<bool> chosen(n, false);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t pick = static_cast<std::size_t>(seed % n);
  for (std::size_t c = 0; c < K; ++c) {
    chosen[pick] = true;
    centroids.row(c) = points.row(pick);
    double far = -1.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], (points.row(i) - centroids.row(c)).squaredNorm());
      if (!chosen[i] && nearest[i] > far) {
        far = nearest[i];
        next = i;
      }
    }
    pick = next;
  }

  KMeansResult result;
  result.labels = assign(points, centroids);
  while (true) {
    centroids = update(points, result.labels, K);
    result.wcss_trace.push_back(within_cluster_ss(points, centroids, result.labels));
    ++result.iterations;
    if (result.iterations >= max_iters) break;
    auto next = assign(points, centroids);
    if (next == result.labels) break;
    result.labels = std::move(next);
  }
  result.centroids = std::move(centroids);
  return result;
}

Centroids init_centroids(const ProposalSet& set, std::size_t K, std::uint64_t seed,
                         int max_iters) {
  const auto M = static_cast<Eigen::Index>(set.size());
  const auto F = static_cast<Eigen::Index>(set.feature_dim);
  const double diag = set.image_diagonal();
  if (!(diag > 0.0)) throw InvalidInput("image size must be positive");

  Matrix rows(M, 2 + F);
  for (Eigen::Index j = 0; j < M; ++j) {
    const Proposal& p = set.proposals[j];
    if (static_cast<Eigen::Index>(p.feature.size()) != F) {
      throw InvalidInput("feature dimension mismatch in proposal " + std::to_string(p.id));
    }
    rows(j, 0) = p.box.center_x() / diag;
    rows(j, 1) = p.box.center_y() / diag;
    for (Eigen::Index f = 0; f < F; ++f) rows(j, 2 + f) = p.feature[f];
  }

  const KMeansResult km = kmeans(rows, K, seed, max_iters);
  Centroids out;
  out.features = km.centroids.rightCols(F);
  out.spatial.reserve(K);
  for (Eigen::Index k = 0; k < km.centroids.rows(); ++k) {
    out.spatial.push_back({km.centroids(k, 0) * diag, km.centroids(k, 1) * diag});
  }
  return out;
}

std::size_t estimate_k(const ProposalSet& set, const AdaptiveK& rule) {
  if (set.empty()) throw InvalidInput("no proposals");
  if (!(rule.iou_thresh > 0.0 && rule.iou_thresh < 1.0)) {
    throw InvalidInput("iou threshold must be in (0, 1)");
  }
  if (rule.k_max < 1) throw InvalidInput("k_max must be positive");
  ProposalSet confident = set;
  std::erase_if(confident.proposals,
                [&](const Proposal& p) { return p.score < rule.score_floor; });
  const std::size_t survivors = greedy_nms(confident, rule.iou_thresh).size();
  const std::size_t hi = std::min(set.size(), rule.k_max);
  return std::clamp<std::size_t>(survivors, 1, hi);
}

}  // namespace dnms
