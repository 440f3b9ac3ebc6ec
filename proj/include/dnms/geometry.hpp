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

#include <cstddef>
#include <span>
#include <vector>

namespace dnms {

// Axis-aligned box in image coordinates, corner encoded.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  // Finite with x1 <= x2 and y1 <= y2.
  bool valid() const;

  friend bool operator==(const Box&, const Box&) = default;
};

// Soft occupancy grid, row-major; at(row, col) with row in [0, height).
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t width, std::size_t height, double fill = 0.0);
  Mask(std::size_t width, std::size_t height, std::vector<double> values);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  double at(std::size_t row, std::size_t col) const {
    return values_[row * width_ + col];
  }
  double& at(std::size_t row, std::size_t col) {
    return values_[row * width_ + col];
  }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  // Nonempty and every value finite and in [0, 1].
  bool valid() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> values_;
};

// Intersection over union; 0 when the union has zero area.
double iou(const Box& a, const Box& b);

// Maximum IoU of `proposal` against any ground-truth box, 0 for none.
double quality_score(const Box& proposal, std::span<const Box> ground_truth);

// Anisotropic total variation with forward differences, no wraparound.
double total_variation(const Mask& mask);

}  // namespace dnms
