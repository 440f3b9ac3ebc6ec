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
#include <utility>
#include <vector>

#include "dnms/geometry.hpp"

namespace dnms {

struct Proposal {
  std::int64_t id = 0;
  double score = 0.0;
  Box box;
  std::vector<double> feature;
  std::optional<Mask> mask;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct ProposalSet {
  std::vector<Proposal> proposals;
  double image_width = 0.0;
  double image_height = 0.0;
  std::size_t feature_dim = 0;

  std::size_t size() const { return proposals.size(); }
  bool empty() const { return proposals.empty(); }
  double image_diagonal() const;

  friend bool operator==(const ProposalSet&, const ProposalSet&) = default;
};

struct GroundTruth {
  std::vector<Box> boxes;
  std::vector<std::int64_t> labels;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// Human-readable invariant violations; empty when the set is well formed.
// Masks, when present, must all share one grid size.
std::vector<std::string> validate(const ProposalSet& set);
std::vector<std::string> validate(const GroundTruth& gt);

struct SynthConfig {
  int num_regions = 3;
  int proposals_per_region = 5;
  double jitter = 4.0;
  double score_noise = 0.05;
  int feature_dim = 16;
  double image_width = 640.0;
  double image_height = 640.0;
  std::uint64_t seed = 0;
};

// Fixed per-component amplitude of the uniform noise added to region
// prototypes.
inline constexpr double kFeatureNoise = 0.01;
// Ground-truth box side lengths are drawn from [min, max] times the image
// extent.
inline constexpr double kMinBoxFraction = 0.08;
inline constexpr double kMaxBoxFraction = 0.20;
// Prototype pairs must have cosine similarity strictly below this.
inline constexpr double kMaxPrototypeCosine = 0.9;

// Deterministic synthetic scene: num_regions ground-truth boxes and
// proposals_per_region jittered copies of each. Throws InvalidInput when the
// configuration cannot be realised.
std::pair<ProposalSet, GroundTruth> synth_generate(const SynthConfig& cfg);

}  // namespace dnms
