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

#include "chunkforge/labeler.hpp"

#include <algorithm>

#include "chunkforge/error.hpp"
#include "chunkforge/text.hpp"

namespace chunkforge {

void LabelerConfig::validate() const {
  if (!(theta >= 0.0 && theta < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "theta must lie in [0, 1)");
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "delta must lie in (0, 1]");
  }
  if (!text::is_valid_utf8(separator) ||
      text::count_code_points(separator) != 1) {
    throw Error(ErrorKind::InvalidConfig,
                "separator must be exactly one UTF-8 character");
  }
  if (separator.size() == 1 && text::is_space(separator[0])) {
    throw Error(ErrorKind::InvalidConfig, "separator must not be whitespace");
  }
  if (joiner.find(separator) != std::string::npos) {
    throw Error(ErrorKind::InvalidConfig,
                "joiner must not contain the separator");
  }
}

namespace labeler {

std::vector<TextInstance> filter_boxes(std::span<const TextInstance> instances,
                                       const BandSpan& band, double theta) {
  std::vector<TextInstance> kept;
  for (const auto& inst : instances) {
    if (geometry::overlap_fraction(inst.box, band) > theta) {
      kept.push_back(inst);
    }
  }
  return kept;
}

std::vector<std::vector<TextInstance>> merge_lines(
    std::span<const TextInstance> instances, double delta) {
  std::vector<std::vector<TextInstance>> lines;
  std::vector<bool> assigned(instances.size(), false);

  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (assigned[i]) continue;
    assigned[i] = true;
    std::vector<TextInstance> line{instances[i]};
    for (std::size_t j = i + 1; j < instances.size(); ++j) {
      if (assigned[j]) continue;
      if (geometry::v_overlap(instances[i].box, instances[j].box) >= delta) {
        line.push_back(instances[j]);
        assigned[j] = true;
      }
    }
    std::stable_sort(line.begin(), line.end(),
                     [](const TextInstance& a, const TextInstance& b) {
                       return a.box.x_min < b.box.x_min;
                     });
    lines.push_back(std::move(line));
  }
  return lines;
}

ChunkLabel build_chunk_label(const ReceiptPage& page, const BandSpan& band,
                             const LabelerConfig& config) {
  const auto kept = filter_boxes(page.instances, band, config.theta);
  const auto ordered = geometry::sort_reading_order(kept);

  ChunkLabel label;
  for (const auto& line : merge_lines(ordered, config.delta)) {
    std::vector<std::string> words;
    words.reserve(line.size());
    for (const auto& inst : line) words.push_back(inst.text);
    label.lines.push_back(text::join(words, config.joiner));
  }
  label.joined = text::join(label.lines, config.separator);
  return label;
}

ChunkLabel document_label(const ReceiptPage& page,
                          const LabelerConfig& config) {
  return build_chunk_label(page, BandSpan(0, page.height), config);
}

void check_separator_absent(std::span<const ReceiptPage> pages,
                            const LabelerConfig& config) {
  for (const auto& page : pages) {
    for (const auto& inst : page.instances) {
      if (inst.text.find(config.separator) != std::string::npos) {
        throw Error(ErrorKind::SeparatorCollision,
                    "separator '" + config.separator + "' occurs in page " +
                        page.page_id + ": \"" + inst.text + "\"");
      }
    }
  }
}

}  // namespace labeler
}  // namespace chunkforge
