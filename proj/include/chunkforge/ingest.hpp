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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chunkforge/geometry.hpp"
#include "json.hpp"

namespace chunkforge::ingest {

enum class ParsePolicy {
  kSkip,    // drop malformed lines and record a warning
  kStrict,  // first malformed line aborts with Error(MalformedLine)
};

struct IngestOptions {
  ParsePolicy policy = ParsePolicy::kSkip;
  unsigned jobs = 0;  // 0 = one worker per logical core
};

// Parses one SROIE-style line: eight integer quad coordinates
// (x1,y1,...,x4,y4) followed by the transcript. Commas inside the
// transcript are preserved; surrounding whitespace is trimmed. The box is
// the axis-aligned hull of the quad and is not yet clamped to any page.
// Throws Error(MalformedLine).
TextInstance parse_annotation_line(std::string_view line);

// Builds a page from parsed instances, clamping boxes to [0,W]x[0,H]. Every
// clamp appends a warning; a box that collapses to zero area is dropped
// (skip policy) or rejected (strict policy).
ReceiptPage make_page(std::string page_id, int width, int height,
                      std::string image_path,
                      std::vector<TextInstance> instances,
                      std::vector<std::string>& warnings,
                      ParsePolicy policy = ParsePolicy::kSkip);

struct LoadedPage {
  ReceiptPage page;
  std::vector<std::string> warnings;
};

// Throws Error(MissingFile | UnreadableImage | MalformedLine |
// EmptyAnnotation).
LoadedPage load_page(const std::filesystem::path& image_path,
                     const std::filesystem::path& annotation_path,
                     const IngestOptions& options = {});

struct LoadedDataset {
  std::vector<ReceiptPage> pages;  // sorted by page_id
  std::vector<std::string> warnings;
};

// Pairs images (.png/.jpg/.jpeg) with `<stem>.txt` annotations under
// root/split (or root itself when split is empty). Images and annotations
// may sit side by side or in img/ and box/ subdirectories. Pages come back
// in lexicographic stem order regardless of directory enumeration order.
// Throws Error(MissingFile | EmptyDataset) plus anything load_page throws.
LoadedDataset load_dataset(const std::filesystem::path& root,
                           std::string_view split,
                           const IngestOptions& options = {});

nlohmann::ordered_json to_json(const ReceiptPage& page);
// Throws Error(MalformedInput).
ReceiptPage page_from_json(const nlohmann::json& j);

}  // namespace chunkforge::ingest
