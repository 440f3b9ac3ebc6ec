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

#include "dnms/nms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dnms/error.hpp"

namespace dnms {
namespace {

std::vector<std::size_t> score_order(const ProposalSet& set) {
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Proposal& pa = set.proposals[a];
    const Proposal& pb = set.proposals[b];
    if (pa.score != pb.score) return pa.score > pb.score;
    return pa.id < pb.id;
  });
  return order;
}

ProposalSet empty_like(const ProposalSet& set) {
  ProposalSet out;
  out.image_width = set.image_width;
  out.image_height = set.image_height;
  out.feature_dim = set.feature_dim;
  return out;
}

}  // namespace

ProposalSet greedy_nms(const ProposalSet& set, double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) {
    throw InvalidInput("iou threshold must be in (0, 1)");
  }
  ProposalSet out = empty_like(set);
  for (std::size_t idx : score_order(set)) {
    const Proposal& cand = set.proposals[idx];
    const bool suppressed = std::any_of(
        out.proposals.begin(), out.proposals.end(),
        [&](const Proposal& kept) { return iou(kept.box, cand.box) > iou_thresh; });
    if (!suppressed) out.proposals.push_back(cand);
  }
  return out;
}

ProposalSet soft_nms(const ProposalSet& set, double sigma, double score_floor) {
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  ProposalSet out = empty_like(set);
  for (std::size_t idx : score_order(set)) {
    Proposal cand = set.proposals[idx];
    if (!out.proposals.empty()) {
      for (const Proposal& kept : out.proposals) {
        const double o = iou(kept.box, cand.box);
        cand.score *= std::exp(-o * o / sigma);
      }
      if (cand.score < score_floor) continue;
    }
    out.proposals.push_back(std::move(cand));
  }
  return out;
}

}  // namespace dnms
