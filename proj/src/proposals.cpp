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

#include "dnms/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "dnms/error.hpp"
#include "dnms/rng.hpp"

namespace dnms {

double ProposalSet::image_diagonal() const {
  return std::hypot(image_width, image_height);
}

std::vector<std::string> validate(const ProposalSet& set) {
  std::vector<std::string> out;
  if (!(std::isfinite(set.image_width) && set.image_width > 0.0) ||
      !(std::isfinite(set.image_height) && set.image_height > 0.0)) {
    out.push_back("image size must be positive and finite");
  }
  if (set.feature_dim == 0) out.push_back("feature_dim must be positive");

  std::map<std::int64_t, std::size_t> first_index;
  const Mask* reference_mask = nullptr;
  for (std::size_t i = 0; i < set.proposals.size(); ++i) {
    const Proposal& p = set.proposals[i];
    std::ostringstream who;
    who << "proposal " << p.id << " (index " << i << ")";

    auto [it, inserted] = first_index.emplace(p.id, i);
    if (!inserted) {
      std::ostringstream msg;
      msg << "duplicate id " << p.id << " at indices " << it->second << " and "
          << i;
      out.push_back(msg.str());
    }
    if (!(std::isfinite(p.score) && p.score >= 0.0 && p.score <= 1.0)) {
      out.push_back(who.str() + ": score outside [0, 1]");
    }
    if (!p.box.valid()) {
      out.push_back(who.str() + ": box is not finite with x1<=x2, y1<=y2");
    } else if (p.box.x1 < 0.0 || p.box.y1 < 0.0 ||
               p.box.x2 > set.image_width || p.box.y2 > set.image_height) {
      out.push_back(who.str() + ": box outside the image");
    }
    if (p.feature.size() != set.feature_dim) {
      std::ostringstream msg;
      msg << who.str() << ": feature dimension " << p.feature.size()
          << " != " << set.feature_dim;
      out.push_back(msg.str());
    }
    if (!std::all_of(p.feature.begin(), p.feature.end(),
                     [](double v) { return std::isfinite(v); })) {
      out.push_back(who.str() + ": non-finite feature entry");
    }
    if (p.mask) {
      if (!p.mask->valid()) {
        out.push_back(who.str() + ": mask values must be in [0, 1]");
      } else if (reference_mask == nullptr) {
        reference_mask = &*p.mask;
      } else if (reference_mask->width() != p.mask->width() ||
                 reference_mask->height() != p.mask->height()) {
        out.push_back(who.str() + ": mask grid differs from earlier masks");
      }
    }
  }
  return out;
}

std::vector<std::string> validate(const GroundTruth& gt) {
  std::vector<std::string> out;
  if (gt.boxes.size() != gt.labels.size()) {
    out.push_back("ground truth has " + std::to_string(gt.boxes.size()) +
                  " boxes but " + std::to_string(gt.labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < gt.boxes.size(); ++i) {
    if (!gt.boxes[i].valid()) {
      out.push_back("ground-truth box " + std::to_string(i) + " is invalid");
    }
  }
  return out;
}

namespace {

std::vector<double> draw_prototype(Rng& rng, int dim,
                                   const std::vector<std::vector<double>>& taken) {
  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm < 1e-12) continue;
    for (double& x : v) x /= norm;
    const bool separated = std::all_of(taken.begin(), taken.end(), [&](const auto& t) {
      return std::inner_product(v.begin(), v.end(), t.begin(), 0.0) < kMaxPrototypeCosine;
    });
    if (separated) return v;
  }
  throw InvalidInput("feature_dim " + std::to_string(dim) +
                     " is too small to separate " + std::to_string(taken.size() + 1) +
                     " region prototypes");
}

}  // namespace

std::pair<ProposalSet, GroundTruth> synth_generate(const SynthConfig& cfg) {
  if (cfg.num_regions < 1) throw InvalidInput("num_regions must be at least 1");
  if (cfg.proposals_per_region < 1) {
    throw InvalidInput("proposals_per_region must be at least 1");
  }
  if (cfg.feature_dim < 1) throw InvalidInput("feature_dim must be at least 1");
  if (!(cfg.jitter >= 0.0) || !std::isfinite(cfg.jitter)) {
    throw InvalidInput("jitter must be nonnegative");
  }
  if (!(cfg.score_noise >= 0.0) || !std::isfinite(cfg.score_noise)) {
    throw InvalidInput("score_noise must be nonnegative");
  }
  if (!(cfg.image_width > 0.0) || !(cfg.image_height > 0.0) ||
      !std::isfinite(cfg.image_width) || !std::isfinite(cfg.image_height)) {
    throw InvalidInput("image size must be positive");
  }
  if (kMaxBoxFraction * cfg.image_width + 2.0 * cfg.jitter > cfg.image_width ||
      kMaxBoxFraction * cfg.image_height + 2.0 * cfg.jitter > cfg.image_height) {
    throw InvalidInput("boxes with this jitter cannot fit inside the image");
  }

  Rng rng(cfg.seed);
  ProposalSet set;
  set.image_width = cfg.image_width;
  set.image_height = cfg.image_height;
  set.feature_dim = static_cast<std::size_t>(cfg.feature_dim);
  GroundTruth gt;

  std::vector<std::vector<double>> prototypes;
  for (int r = 0; r < cfg.num_regions; ++r) {
    const double w = cfg.image_width * rng.uniform(kMinBoxFraction, kMaxBoxFraction);
    const double h = cfg.image_height * rng.uniform(kMinBoxFraction, kMaxBoxFraction);
    const double x1 = cfg.jitter + rng.uniform01() * (cfg.image_width - w - 2.0 * cfg.jitter);
    const double y1 = cfg.jitter + rng.uniform01() * (cfg.image_height - h - 2.0 * cfg.jitter);
    gt.boxes.push_back(Box{x1, y1, x1 + w, y1 + h});
    gt.labels.push_back(0);
    prototypes.push_back(draw_prototype(rng, cfg.feature_dim, prototypes));
  }

  std::int64_t next_id = 0;
  for (int r = 0; r < cfg.num_regions; ++r) {
    const Box& g = gt.boxes[r];
    for (int n = 0; n < cfg.proposals_per_region; ++n) {
      Proposal p;
      p.id = next_id++;
      double bx1 = g.x1 + rng.uniform(-cfg.jitter, cfg.jitter);
      double by1 = g.y1 + rng.uniform(-cfg.jitter, cfg.jitter);
      double bx2 = g.x2 + rng.uniform(-cfg.jitter, cfg.jitter);
      double by2 = g.y2 + rng.uniform(-cfg.jitter, cfg.jitter);
      if (bx1 > bx2) std::swap(bx1, bx2);
      if (by1 > by2) std::swap(by1, by2);
      p.box = Box{bx1, by1, bx2, by2};

      p.feature = prototypes[r];
      for (double& x : p.feature) x += kFeatureNoise * rng.uniform(-1.0, 1.0);

      const double noise = rng.uniform(-1.0, 1.0) * cfg.score_noise;
      p.score = std::clamp(iou(p.box, g) + noise, 0.0, 1.0);
      set.proposals.push_back(std::move(p));
    }
  }
  return {std::move(set), std::move(gt)};
}

}  // namespace dnms
