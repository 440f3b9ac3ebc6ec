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

#include "dnms/proposals.hpp"

namespace dnms {

// Classical greedy suppression: visit by descending score (ties: lower id
// first), drop anything overlapping a kept box with IoU above the threshold.
// Output is in visiting order.
ProposalSet greedy_nms(const ProposalSet& set, double iou_thresh);

// Gaussian soft-NMS. Proposals are visited once, by descending original score
// then id; each is decayed by s *= exp(-iou^2 / sigma) against every box kept
// before it and dropped if the decayed score falls below score_floor. The
// first visited proposal is never decayed and always kept.
ProposalSet soft_nms(const ProposalSet& set, double sigma, double score_floor);

}  // namespace dnms
