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

#include "dnms/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dnms/error.hpp"

namespace dnms {

bool Box::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 <= x2 && y1 <= y2;
}

Mask::Mask(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), values_(width * height, fill) {
  if (width == 0 || height == 0) {
    throw InvalidInput("mask dimensions must be positive");
  }
}

Mask::Mask(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width == 0 || height == 0) {
    throw InvalidInput("mask dimensions must be positive");
  }
  if (values_.size() != width * height) {
    throw InvalidInput("mask has " + std::to_string(values_.size()) +
                       " values, expected " + std::to_string(width * height));
  }
}

bool Mask::valid() const {
  if (values_.empty() || values_.size() != width_ * height_) return false;
  return std::all_of(values_.begin(), values_.end(), [](double v) {
    return std::isfinite(v) && v >= 0.0 && v <= 1.0;
  });
}

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double quality_score(const Box& proposal, std::span<const Box> ground_truth) {
  double best = 0.0;
  for (const Box& gt : ground_truth) best = std::max(best, iou(proposal, gt));
  return best;
}

double total_variation(const Mask& mask) {
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  double tv = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const double v = mask.at(i, j);
      if (i + 1 < h) tv += std::abs(mask.at(i + 1, j) - v);
      if (j + 1 < w) tv += std::abs(mask.at(i, j + 1) - v);
    }
  }
  return tv;
}

}  // namespace dnms
