// Copyright 2026 The ChunkForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <vector>

namespace chunkforge {

// Axis-aligned box in pixel coordinates. Extents are continuous:
// height() is y_max - y_min, so [y_min, y_max) covers exactly height() rows.
struct Rect {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const noexcept { return x_max - x_min; }
  int height() const noexcept { return y_max - y_min; }
  long long area() const noexcept {
    return static_cast<long long>(width()) * height();
  }
  bool has_positive_area() const noexcept {
    return x_min < x_max && y_min < y_max;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

// One annotated box and its transcript.
struct TextInstance {
  Rect box;
  std::string text;

  friend bool operator==(const TextInstance&, const TextInstance&) = default;
};

struct ReceiptPage {
  std::string page_id;
  int width = 0;
  int height = 0;
  std::string image_path;
  std::vector<TextInstance> instances;

  friend bool operator==(const ReceiptPage&, const ReceiptPage&) = default;
};

// Full-width horizontal strip [y_start, y_end).
class BandSpan {
 public:
  // Throws Error(InvalidConfig) unless 0 <= y_start < y_end.
  BandSpan(int y_start, int y_end);

  int y_start() const noexcept { return y_start_; }
  int y_end() const noexcept { return y_end_; }
  int height() const noexcept { return y_end_ - y_start_; }

  friend bool operator==(const BandSpan&, const BandSpan&) = default;

 private:
  int y_start_;
  int y_end_;
};

namespace geometry {

// Fraction of the box's area that falls inside the band. Bands span the
// full page width, so this is the vertical-extent fraction. Requires a box
// of positive height; returns 0 otherwise.
double overlap_fraction(const Rect& box, const BandSpan& band) noexcept;

// Vertical intersection length divided by the smaller of the two heights.
double v_overlap(const Rect& a, const Rect& b) noexcept;

// Stable sort by box.y_min.
std::vector<TextInstance> sort_reading_order(
    std::span<const TextInstance> instances);

}  // namespace geometry
}  // namespace chunkforge
