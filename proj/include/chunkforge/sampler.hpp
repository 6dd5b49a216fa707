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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkforge/labeler.hpp"
#include "json.hpp"

namespace chunkforge::sampler {

enum class SampleMode { kRandom, kTiled };

std::string_view to_string(SampleMode mode);
// Throws Error(InvalidConfig).
SampleMode parse_mode(std::string_view name);

// Training chunks per image per epoch used by default.
inline constexpr int kDefaultSamplesPerImage = 20;

// Curriculum order: the first value is the median text-line count of the
// training pages, then progressively larger chunks down to the full page.
inline const std::vector<int> kDefaultStages{30, 15, 7, 4, 2, 1};

struct ChunkSample {
  std::string page_id;
  BandSpan band;
  ChunkLabel label;
  int stage_L = 0;
  int sample_index = 0;
  std::optional<std::string> crop_path;

  friend bool operator==(const ChunkSample&, const ChunkSample&) = default;
};

nlohmann::ordered_json to_json(const ChunkSample& sample);

// floor(H / L). Throws Error(PageTooShort) when H < L and
// Error(InvalidConfig) when L < 1.
int chunk_height(int page_height, int chunks);

// Per-stage seed derived from the global seed and the stage's L.
std::uint64_t derive_stage_seed(std::uint64_t global_seed, int chunks);

// Start row for one training chunk: a pure function of
// (stage seed, page id, sample index, attempt), uniform over the closed
// integer range [0, max_start].
int draw_start(std::uint64_t stage_seed, std::string_view page_id,
               int sample_index, int max_start, int attempt = 0);

struct SamplingOptions {
  // Redraw a chunk whose label came out empty, up to max_retries times.
  bool resample_empty = false;
  int max_retries = 10;
};

// N full-width bands of height floor(H/L) with independently drawn start
// rows, labelled by the labeler. Sample indices run from first_index to
// first_index + N - 1. For L = 1 every band is [0, H).
std::vector<ChunkSample> sample_training_chunks(
    const ReceiptPage& page, int chunks, int samples, std::uint64_t stage_seed,
    const LabelerConfig& config, int first_index = 0,
    const SamplingOptions& options = {});

// Exactly L bands [k*h, (k+1)*h) with the last one extended to H, so the
// bands partition [0, H).
std::vector<BandSpan> tile_bands(int page_height, int chunks);

std::vector<ChunkSample> tile_eval_chunks(const ReceiptPage& page, int chunks,
                                          const LabelerConfig& config);

// Throws Error(InvalidConfig) unless non-empty, every L >= 1 and strictly
// decreasing.
void validate_stage_list(std::span<const int> stages);

struct StageEntry {
  int L = 0;
  int N = 0;
  SampleMode mode = SampleMode::kRandom;
  std::uint64_t seed = 0;
  int epochs = 1;
  std::vector<std::string> shard_paths;  // one per epoch, relative to manifest
  std::size_t records = 0;
};

struct Manifest {
  static constexpr int kVersion = 1;

  std::string dataset_root;
  std::string split;
  std::size_t pages = 0;
  std::uint64_t global_seed = 0;
  LabelerConfig config;
  std::vector<StageEntry> stages;

  nlohmann::ordered_json to_json() const;
  // Throws Error(MalformedInput) for schema problems and
  // Error(InvalidConfig) when stages are not strictly decreasing in L.
  static Manifest from_json(const nlohmann::json& j);
};

struct BuildOptions {
  std::vector<int> stages = kDefaultStages;
  int samples_per_image = kDefaultSamplesPerImage;
  int epochs = 1;
  SampleMode mode = SampleMode::kRandom;
  std::uint64_t seed = 0;
  bool materialize_crops = false;
  // With L = 1 all random draws coincide; keep one sample per page per epoch.
  bool dedupe_full_page = true;
  SamplingOptions sampling;
  unsigned jobs = 0;
  std::string dataset_root;
  std::string split;
};

// Writes shards/L<L>_e<epoch>.jsonl for every stage (plus crops/*.png when
// materialize_crops is set) and manifest.json under out_dir. Records are
// ordered by (page order, sample index); output is byte-identical for
// identical inputs and seed.
// Throws Error(InvalidConfig | SeparatorCollision | PageTooShort | IoError |
// UnreadableImage).
Manifest build_curriculum(std::span<const ReceiptPage> pages,
                          const BuildOptions& options,
                          const LabelerConfig& config,
                          const std::filesystem::path& out_dir);

// `<page_id>_L<stage>_k<index>.png`
std::string crop_file_name(std::string_view page_id, int stage_L,
                           int sample_index);

}  // namespace chunkforge::sampler
