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
#include <optional>
#include <string>
#include <vector>

#include "dnms/clustering.hpp"
#include "dnms/cost.hpp"
#include "dnms/nms.hpp"
#include "dnms/proposals.hpp"
#include "dnms/refine.hpp"
#include "dnms/sinkhorn.hpp"

namespace dnms {

struct RefinedProposal {
  Box box;
  double score = 0.0;
  std::vector<double> feature;
  std::optional<Mask> mask;
  double probability = 0.0;
  std::vector<double> source_weights;  // column of the normalized assignment

  friend bool operator==(const RefinedProposal&, const RefinedProposal&) = default;
};

struct KMode {
  bool adaptive = true;
  std::size_t fixed_k = 1;
  AdaptiveK rule;

  static KMode fixed(std::size_t k) { return {false, k, {}}; }
};

struct PipelineConfig {
  SinkhornParams sinkhorn;
  CostWeights weights;
  RefineParams refine;
  KMode k;
  std::uint64_t seed = 0;
  int kmeans_iters = 100;
};

struct Diagnostics {
  std::size_t K = 0;
  double kappa = 0.0;
  double rho = 0.0;
  std::vector<double> marginal_trace;
  int sinkhorn_iterations = 0;
  bool log_domain = false;
  int fw_iterations = 0;
  std::vector<double> objective_trace;
  double entropy_threshold = 0.0;  // after clamping to ln K
  bool fw_fallback_uniform = false;
  bool inference_mode = false;  // no ground truth, q taken from refined scores
};

struct DnmsResult {
  std::vector<RefinedProposal> refined;
  Diagnostics diagnostics;
  Matrix cost;
  SoftAssignment assignment;
};

// Column-normalized weighted means of every proposal field, one refined
// proposal per column of S. Masks average over the proposals that carry one.
std::vector<RefinedProposal> aggregate(const Matrix& S, const ProposalSet& set);

// Centroids, cost, Sinkhorn, aggregation and entropy-constrained refinement.
// With ground truth, refinement maximizes agreement with quality scores;
// without it, the refined scores stand in for them.
DnmsResult dnms(const ProposalSet& set, const GroundTruth* gt, const PipelineConfig& cfg);

struct MethodMetrics {
  std::string method;
  double mean_quality = 0.0;
  std::size_t count = 0;
  double wall_ms = 0.0;
};

struct BaselineParams {
  double greedy_iou = 0.5;
  double soft_sigma = 0.5;
  double soft_floor = 0.05;
};

// dnms, greedy NMS and soft-NMS on one scene, in that order.
std::vector<MethodMetrics> compare(const ProposalSet& set, const GroundTruth& gt,
                                   const PipelineConfig& cfg, const BaselineParams& base = {});

}  // namespace dnms
