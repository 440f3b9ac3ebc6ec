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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnms/pipeline.hpp"
#include "dnms/proposals.hpp"

// Line-delimited JSON formats. See docs/formats.md.
namespace dnms::io {

inline constexpr int kFormatVersion = 1;

std::string format_proposals(const ProposalSet& set);
std::string format_ground_truth(const GroundTruth& gt);

// Parse errors name the 1-based line. Proposal sets are validated after
// parsing; violations are reported as InvalidInput.
ProposalSet parse_proposals(std::string_view text);
GroundTruth parse_ground_truth(std::string_view text);

struct RunReport {
  PipelineConfig config;
  Diagnostics diagnostics;
  std::vector<RefinedProposal> refined;
  std::optional<double> total_ms;
};

std::string format_report(const RunReport& report);
RunReport parse_report(std::string_view text);

// Whole-file helpers; failures to open are InvalidInput.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace dnms::io
