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

#include "chunkforge/geometry.hpp"

namespace chunkforge {

inline constexpr const char* kDefaultSeparator = "\xC3\xA6";  // U+00E6 "æ"

struct LabelerConfig {
  double theta = 0.3;  // box kept iff overlap_fraction > theta
  double delta = 0.5;  // boxes share a line iff v_overlap >= delta
  std::string separator = kDefaultSeparator;
  std::string joiner = " ";

  // Throws Error(InvalidConfig). Requires 0 <= theta < 1, 0 < delta <= 1,
  // a separator of exactly one non-whitespace code point that does not
  // occur in the joiner.
  void validate() const;
};

// Ordered text-line labels of one chunk and their separator-joined form.
struct ChunkLabel {
  std::vector<std::string> lines;
  std::string joined;

  bool empty() const noexcept { return lines.empty(); }
  friend bool operator==(const ChunkLabel&, const ChunkLabel&) = default;
};

namespace labeler {

// Instances whose overlap_fraction with the band exceeds theta, in their
// original relative order.
std::vector<TextInstance> filter_boxes(std::span<const TextInstance> instances,
                                       const BandSpan& band, double theta);

// Seed-anchored line grouping over instances already in reading order.
// Each not-yet-assigned instance seeds a line; every later unassigned
// instance with v_overlap(seed, other) >= delta joins it. Members of a line
// are ordered by x_min, ties by input order.
std::vector<std::vector<TextInstance>> merge_lines(
    std::span<const TextInstance> instances, double delta);

// filter -> reading-order sort -> merge -> join. A band with no retained
// boxes yields an empty label.
ChunkLabel build_chunk_label(const ReceiptPage& page, const BandSpan& band,
                             const LabelerConfig& config);

// build_chunk_label over the whole page [0, H).
ChunkLabel document_label(const ReceiptPage& page, const LabelerConfig& config);

// Throws Error(SeparatorCollision) naming the first page and transcript that
// contains the separator.
void check_separator_absent(std::span<const ReceiptPage> pages,
                            const LabelerConfig& config);

}  // namespace labeler
}  // namespace chunkforge
