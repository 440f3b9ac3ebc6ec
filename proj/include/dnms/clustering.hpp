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

#include <cstdint>
#include <vector>

#include "dnms/linalg.hpp"
#include "dnms/proposals.hpp"

namespace dnms {

struct KMeansResult {
  Matrix centroids;                 // K x d
  std::vector<std::size_t> labels;  // one cluster index per point
  std::vector<double> wcss_trace;   // within-cluster SS after each update
  int iterations = 0;
};

// Lloyd's algorithm over the rows of `points`. Initialization is seeded
// farthest-point: the first centre is row seed % n, each following centre is
// the row farthest from its nearest chosen centre (ties to the lower index).
// A cluster that empties is re-seeded with the point farthest from its own
// centroid. Throws InvalidInput("insufficient points") when K > n.
KMeansResult kmeans(const Matrix& points, std::size_t K, std::uint64_t seed,
                    int max_iters = 100);

double within_cluster_ss(const Matrix& points, const Matrix& centroids,
                         const std::vector<std::size_t>& labels);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Latent region centroids: feature part and spatial part.
struct Centroids {
  Matrix features;              // K x F
  std::vector<Point2> spatial;  // K image-space points

  std::size_t K() const { return spatial.size(); }
};

// Joint k-means on [center / diag ; feature] rows, split back into spatial
// centres (in pixels) and feature centroids.
Centroids init_centroids(const ProposalSet& set, std::size_t K, std::uint64_t seed,
                         int max_iters = 100);

struct AdaptiveK {
  double iou_thresh = 0.5;
  double score_floor = 0.05;
  std::size_t k_max = 32;
};

// Stand-in rule for the adaptive region count: greedy-NMS survivors among
// proposals scoring at least score_floor, clamped to [1, min(M, k_max)].
std::size_t estimate_k(const ProposalSet& set, const AdaptiveK& rule = {});

}  // namespace dnms
