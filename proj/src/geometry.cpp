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

#include "chunkforge/geometry.hpp"

#include <algorithm>
#include <string>

#include "chunkforge/error.hpp"

namespace chunkforge {

BandSpan::BandSpan(int y_start, int y_end) : y_start_(y_start), y_end_(y_end) {
  if (y_start < 0 || y_start >= y_end) {
    throw Error(ErrorKind::InvalidConfig,
                "invalid band [" + std::to_string(y_start) + ", " +
                    std::to_string(y_end) + ")");
  }
}

namespace geometry {

namespace {

int intersect_length(int a0, int a1, int b0, int b1) noexcept {
  return std::max(0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

double overlap_fraction(const Rect& box, const BandSpan& band) noexcept {
  const int h = box.height();
  if (h <= 0) return 0.0;
  const int inter =
      intersect_length(box.y_min, box.y_max, band.y_start(), band.y_end());
  return static_cast<double>(inter) / static_cast<double>(h);
}

double v_overlap(const Rect& a, const Rect& b) noexcept {
  const int denom = std::min(a.height(), b.height());
  if (denom <= 0) return 0.0;
  const int inter = intersect_length(a.y_min, a.y_max, b.y_min, b.y_max);
  return static_cast<double>(inter) / static_cast<double>(denom);
}

std::vector<TextInstance> sort_reading_order(
    std::span<const TextInstance> instances) {
  std::vector<TextInstance> sorted(instances.begin(), instances.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TextInstance& a, const TextInstance& b) {
                     return a.box.y_min < b.box.y_min;
                   });
  return sorted;
}

}  // namespace geometry
}  // namespace chunkforge
