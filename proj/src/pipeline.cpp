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

#include "dnms/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "dnms/error.hpp"

namespace dnms {

std::vector<RefinedProposal> aggregate(const Matrix& S, const ProposalSet& set) {
  const auto M = static_cast<Eigen::Index>(set.size());
  if (S.rows() != M) throw InvalidInput("assignment rows do not match proposal count");
  const std::size_t F = set.feature_dim;

  std::vector<RefinedProposal> out;
  out.reserve(static_cast<std::size_t>(S.cols()));
  for (Eigen::Index k = 0; k < S.cols(); ++k) {
    const double mass = S.col(k).sum();
    if (!(mass > 0.0) || !std::isfinite(mass)) throw NumericalFailure("empty latent region");

    // Means are accumulated as offsets from the heaviest proposal, so a column
    // of identical proposals reproduces them exactly.
    Eigen::Index ref = 0;
    S.col(k).maxCoeff(&ref);
    const Proposal& base = set.proposals[static_cast<std::size_t>(ref)];

    RefinedProposal r;
    r.feature.assign(F, 0.0);
    r.source_weights.resize(static_cast<std::size_t>(M));
    double mask_mass = 0.0;
    std::optional<Mask> mask_sum;
    for (Eigen::Index j = 0; j < M; ++j) {
      const Proposal& p = set.proposals[static_cast<std::size_t>(j)];
      const double w = S(j, k) / mass;
      r.source_weights[static_cast<std::size_t>(j)] = w;
      r.box.x1 += w * (p.box.x1 - base.box.x1);
      r.box.y1 += w * (p.box.y1 - base.box.y1);
      r.box.x2 += w * (p.box.x2 - base.box.x2);
      r.box.y2 += w * (p.box.y2 - base.box.y2);
      r.score += w * (p.score - base.score);
      for (std::size_t f = 0; f < F; ++f) r.feature[f] += w * (p.feature[f] - base.feature[f]);
      if (p.mask) {
        if (!mask_sum) mask_sum.emplace(p.mask->width(), p.mask->height(), 0.0);
        if (mask_sum->size() != p.mask->size()) {
          throw InvalidInput("masks must share one grid size");
        }
        auto dst = mask_sum->values();
        auto src = p.mask->values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
        mask_mass += w;
      }
    }
    r.box.x1 += base.box.x1;
    r.box.y1 += base.box.y1;
    r.box.x2 += base.box.x2;
    r.box.y2 += base.box.y2;
    r.score += base.score;
    for (std::size_t f = 0; f < F; ++f) r.feature[f] += base.feature[f];
    if (mask_sum && mask_mass > 0.0) {
      for (double& v : mask_sum->values()) v = std::clamp(v / mask_mass, 0.0, 1.0);
      r.mask = std::move(mask_sum);
    }
    r.score = std::clamp(r.score, 0.0, 1.0);
    out.push_back(std::move(r));
  }
  return out;
}

DnmsResult dnms(const ProposalSet& set, const GroundTruth* gt, const PipelineConfig& cfg) {
  if (set.empty()) throw InvalidInput("no proposals");

  DnmsResult res;
  Diagnostics& diag = res.diagnostics;
  diag.K = cfg.k.adaptive ? estimate_k(set, cfg.k.rule) : cfg.k.fixed_k;
  if (diag.K < 1) throw InvalidInput("K must be positive");
  if (diag.K > set.size()) throw InvalidInput("K exceeds the number of proposals");

  const Centroids cents = init_centroids(set, diag.K, cfg.seed, cfg.kmeans_iters);
  res.cost = build_cost(set, cents, cfg.weights);
  diag.kappa = kappa(res.cost);
  diag.rho = std::tanh(diag.kappa / (4.0 * cfg.sinkhorn.tau));

  res.assignment = solve(res.cost, cfg.sinkhorn);
  diag.marginal_trace = res.assignment.trace;
  diag.sinkhorn_iterations = res.assignment.iterations;
  diag.log_domain = res.assignment.log_domain;

  res.refined = aggregate(res.assignment.S, set);

  Vector q(static_cast<Eigen::Index>(diag.K));
  diag.inference_mode = gt == nullptr;
  for (std::size_t k = 0; k < diag.K; ++k) {
    q(static_cast<Eigen::Index>(k)) =
        gt != nullptr ? quality_score(res.refined[k].box, gt->boxes) : res.refined[k].score;
  }
  // A threshold above ln K cannot be met by any distribution over K regions;
  // the pipeline asks for the uniform one instead of failing.
  RefineParams rp = cfg.refine;
  rp.tau_h = std::min(rp.tau_h, std::log(static_cast<double>(diag.K)));
  diag.entropy_threshold = rp.tau_h;
  const FrankWolfeResult fw = frank_wolfe(q, rp);
  diag.fw_iterations = fw.iterations;
  diag.objective_trace = fw.objective_trace;
  diag.fw_fallback_uniform = fw.fallback_uniform;
  for (std::size_t k = 0; k < diag.K; ++k) {
    res.refined[k].probability = fw.p(static_cast<Eigen::Index>(k));
  }
  return res;
}

std::vector<MethodMetrics> compare(const ProposalSet& set, const GroundTruth& gt,
                                   const PipelineConfig& cfg, const BaselineParams& base) {
  if (gt.boxes.empty()) throw InvalidInput("compare needs ground truth");
  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };
  auto mean_quality = [&](const auto& boxes) {
    if (boxes.empty()) return 0.0;
    double sum = 0.0;
    for (const Box& b : boxes) sum += quality_score(b, gt.boxes);
    return sum / static_cast<double>(boxes.size());
  };
  auto boxes_of = [](const ProposalSet& s) {
    std::vector<Box> b;
    for (const Proposal& p : s.proposals) b.push_back(p.box);
    return b;
  };

  std::vector<MethodMetrics> out;
  auto t0 = Clock::now();
  const DnmsResult d = dnms(set, &gt, cfg);
  const double dnms_ms = ms_since(t0);
  std::vector<Box> refined;
  for (const RefinedProposal& r : d.refined) refined.push_back(r.box);
  out.push_back({"dnms", mean_quality(refined), refined.size(), dnms_ms});

  t0 = Clock::now();
  const ProposalSet g = greedy_nms(set, base.greedy_iou);
  const double greedy_ms = ms_since(t0);
  out.push_back({"greedy_nms", mean_quality(boxes_of(g)), g.size(), greedy_ms});

  t0 = Clock::now();
  const ProposalSet s = soft_nms(set, base.soft_sigma, base.soft_floor);
  const double soft_ms = ms_since(t0);
  out.push_back({"soft_nms", mean_quality(boxes_of(s)), s.size(), soft_ms});
  return out;
}

}  // namespace dnms
