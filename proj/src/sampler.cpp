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

#include "chunkforge/sampler.hpp"


#include "chunkforge/error.hpp"
#include "chunkforge/fileio.hpp"
#include "chunkforge/image.hpp"
#include "chunkforge/parallel.hpp"

namespace chunkforge::sampler {

namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b));
}

std::string shard_name(int chunks, int epoch) {
  return "shards/L" + std::to_string(chunks) + "_e" + std::to_string(epoch) +
         ".jsonl";
}

}  // namespace

std::string_view to_string(SampleMode mode) {
  return mode == SampleMode::kRandom ? "random" : "tiled";
}

SampleMode parse_mode(std::string_view name) {
  if (name == "random") return SampleMode::kRandom;
  if (name == "tiled") return SampleMode::kTiled;
  throw Error(ErrorKind::InvalidConfig,
              "unknown sampling mode '" + std::string(name) + "'");
}

nlohmann::ordered_json to_json(const ChunkSample& sample) {
  nlohmann::ordered_json j;
  j["page_id"] = sample.page_id;
  j["y_start"] = sample.band.y_start();
  j["y_end"] = sample.band.y_end();
  j["label"] = sample.label.joined;
  j["stage_L"] = sample.stage_L;
  j["sample_index"] = sample.sample_index;
  j["crop_path"] = sample.crop_path ? nlohmann::ordered_json(*sample.crop_path)
                                    : nlohmann::ordered_json(nullptr);
  return j;
}

int chunk_height(int page_height, int chunks) {
  if (chunks < 1) {
    throw Error(ErrorKind::InvalidConfig, "chunk count L must be >= 1");
  }
  if (page_height < chunks) {
    throw Error(ErrorKind::PageTooShort,
                "page height " + std::to_string(page_height) +
                    " is smaller than L=" + std::to_string(chunks));
  }
  return page_height / chunks;
}

std::uint64_t derive_stage_seed(std::uint64_t global_seed, int chunks) {
  return mix(global_seed, 0x5354414745000000ULL + static_cast<std::uint64_t>(chunks));
}

int draw_start(std::uint64_t stage_seed, std::string_view page_id,
               int sample_index, int max_start, int attempt) {
  if (max_start <= 0) return 0;
  std::uint64_t state =
      mix(mix(mix(stage_seed, fnv1a64(page_id)),
              static_cast<std::uint64_t>(sample_index)),
          static_cast<std::uint64_t>(attempt));
  // Rejection sampling keeps the draw unbiased over [0, max_start].
  const std::uint64_t range = static_cast<std::uint64_t>(max_start) + 1;
  const std::uint64_t threshold = (0 - range) % range;
  std::uint64_t x = 0;
  do {
    state = splitmix64(state);
    x = state;
  } while (x < threshold);
  return static_cast<int>(x % range);
}

std::vector<ChunkSample> sample_training_chunks(
    const ReceiptPage& page, int chunks, int samples, std::uint64_t stage_seed,
    const LabelerConfig& config, int first_index,
    const SamplingOptions& options) {
  if (samples < 1) {
    throw Error(ErrorKind::InvalidConfig, "samples per image N must be >= 1");
  }
  const int h = chunk_height(page.height, chunks);
  const int max_start = page.height - h;
  const int attempts = options.resample_empty ? options.max_retries + 1 : 1;

  std::vector<ChunkSample> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const int index = first_index + k;
    std::optional<BandSpan> band;
    ChunkLabel label;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      const int s = draw_start(stage_seed, page.page_id, index, max_start,
                               attempt);
      band.emplace(s, s + h);
      label = labeler::build_chunk_label(page, *band, config);
      if (!label.empty()) break;
    }
    out.push_back({page.page_id, *band, std::move(label), chunks, index,
                   std::nullopt});
  }
  return out;
}

std::vector<BandSpan> tile_bands(int page_height, int chunks) {
  const int h = chunk_height(page_height, chunks);
  std::vector<BandSpan> bands;
  bands.reserve(static_cast<std::size_t>(chunks));
  for (int k = 0; k < chunks; ++k) {
    const int end = (k == chunks - 1) ? page_height : (k + 1) * h;
    bands.emplace_back(k * h, end);
  }
  return bands;
}

std::vector<ChunkSample> tile_eval_chunks(const ReceiptPage& page, int chunks,
                                          const LabelerConfig& config) {
  std::vector<ChunkSample> out;
  int k = 0;
  for (const auto& band : tile_bands(page.height, chunks)) {
    out.push_back({page.page_id, band,
                   labeler::build_chunk_label(page, band, config), chunks, k++,
                   std::nullopt});
  }
  return out;
}

void validate_stage_list(std::span<const int> stages) {
  if (stages.empty()) {
    throw Error(ErrorKind::InvalidConfig, "stage list is empty");
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i] < 1) {
      throw Error(ErrorKind::InvalidConfig, "stage L must be >= 1");
    }
    if (i > 0 && stages[i] >= stages[i - 1]) {
      throw Error(ErrorKind::InvalidConfig,
                  "stages must strictly decrease in L (got " +
                      std::to_string(stages[i - 1]) + " then " +
                      std::to_string(stages[i]) + ")");
    }
  }
}

nlohmann::ordered_json Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["dataset_root"] = dataset_root;
  j["split"] = split;
  j["pages"] = pages;
  j["global_seed"] = global_seed;
  j["config"] = {{"theta", config.theta},
                 {"delta", config.delta},
                 {"separator", config.separator},
                 {"joiner", config.joiner}};
  nlohmann::ordered_json stage_list = nlohmann::ordered_json::array();
  for (const auto& s : stages) {
    nlohmann::ordered_json e;
    e["L"] = s.L;
    e["N"] = s.N;
    e["mode"] = to_string(s.mode);
    e["seed"] = s.seed;
    e["shard_path"] = s.shard_paths.empty() ? "" : s.shard_paths.front();
    e["shard_paths"] = s.shard_paths;
    e["epochs"] = s.epochs;
    e["records"] = s.records;
    stage_list.push_back(std::move(e));
  }
  j["stages"] = std::move(stage_list);
  return j;
}

Manifest Manifest::from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    if (j.at("version").get<int>() != kVersion) {
      throw Error(ErrorKind::MalformedInput, "unsupported manifest version");
    }
    m.dataset_root = j.value("dataset_root", "");
    m.split = j.value("split", "");
    m.pages = j.value("pages", std::size_t{0});
    m.global_seed = j.at("global_seed").get<std::uint64_t>();
    const auto& c = j.at("config");
    m.config.theta = c.at("theta").get<double>();
    m.config.delta = c.at("delta").get<double>();
    m.config.separator = c.at("separator").get<std::string>();
    m.config.joiner = c.at("joiner").get<std::string>();
    for (const auto& e : j.at("stages")) {
      StageEntry s;
      s.L = e.at("L").get<int>();
      s.N = e.at("N").get<int>();
      s.mode = parse_mode(e.at("mode").get<std::string>());
      s.seed = e.at("seed").get<std::uint64_t>();
      s.epochs = e.at("epochs").get<int>();
      if (e.contains("shard_paths")) {
        s.shard_paths = e.at("shard_paths").get<std::vector<std::string>>();
      } else {
        s.shard_paths = {e.at("shard_path").get<std::string>()};
      }
      s.records = e.value("records", std::size_t{0});
      m.stages.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedInput,
                std::string("invalid manifest: ") + e.what());
  }
  std::vector<int> ls;
  for (const auto& s : m.stages) ls.push_back(s.L);
  validate_stage_list(ls);
  m.config.validate();
  return m;
}

std::string crop_file_name(std::string_view page_id, int stage_L,
                           int sample_index) {
  return std::string(page_id) + "_L" + std::to_string(stage_L) + "_k" +
         std::to_string(sample_index) + ".png";
}

Manifest build_curriculum(std::span<const ReceiptPage> pages,
                          const BuildOptions& options,
                          const LabelerConfig& config,
                          const fs::path& out_dir) {
  config.validate();
  validate_stage_list(options.stages);
  if (options.samples_per_image < 1) {
    throw Error(ErrorKind::InvalidConfig, "samples per image N must be >= 1");
  }
  if (options.epochs < 1) {
    throw Error(ErrorKind::InvalidConfig, "epochs must be >= 1");
  }
  if (pages.empty()) {
    throw Error(ErrorKind::EmptyDataset, "no pages to build from");
  }
  labeler::check_separator_absent(pages, config);

  const bool tiled = options.mode == SampleMode::kTiled;
  const int epochs = tiled ? 1 : options.epochs;

  Manifest manifest;
  manifest.dataset_root = options.dataset_root;
  manifest.split = options.split;
  manifest.pages = pages.size();
  manifest.global_seed = options.seed;
  manifest.config = config;
  for (int chunks : options.stages) {
    StageEntry s;
    s.L = chunks;
    s.N = tiled ? chunks : options.samples_per_image;
    s.mode = options.mode;
    s.seed = derive_stage_seed(options.seed, chunks);
    s.epochs = epochs;
    for (int e = 0; e < epochs; ++e) s.shard_paths.push_back(shard_name(chunks, e));
    manifest.stages.push_back(std::move(s));
  }

  // per_page[page][stage][epoch] -> samples
  using EpochSamples = std::vector<std::vector<ChunkSample>>;
  std::vector<std::vector<EpochSamples>> per_page(pages.size());

  parallel_for(pages.size(), options.jobs, [&](std::size_t p) {
    const ReceiptPage& page = pages[p];
    std::optional<cv::Mat> pixels;
    if (options.materialize_crops) pixels = image::read_image(page.image_path);

    auto& stages_out = per_page[p];
    stages_out.resize(manifest.stages.size());
    for (std::size_t si = 0; si < manifest.stages.size(); ++si) {
      const StageEntry& stage = manifest.stages[si];
      stages_out[si].resize(static_cast<std::size_t>(epochs));
      for (int e = 0; e < epochs; ++e) {
        std::vector<ChunkSample> samples;
        if (tiled) {
          samples = tile_eval_chunks(page, stage.L, config);
        } else if (stage.L == 1 && options.dedupe_full_page) {
          samples = sample_training_chunks(page, 1, 1, stage.seed, config, e,
                                           options.sampling);
        } else {
          samples = sample_training_chunks(page, stage.L, stage.N, stage.seed,
                                           config, e * stage.N,
                                           options.sampling);
        }
        if (pixels) {
          for (auto& sample : samples) {
            const std::string rel =
                "crops/" + crop_file_name(page.page_id, sample.stage_L,
                                          sample.sample_index);
            image::write_png(image::crop_rows(*pixels, sample.band),
                             out_dir / rel);
            sample.crop_path = rel;
          }
        }
        stages_out[si][static_cast<std::size_t>(e)] = std::move(samples);
      }
    }
  });

  for (std::size_t si = 0; si < manifest.stages.size(); ++si) {
    StageEntry& stage = manifest.stages[si];
    for (int e = 0; e < epochs; ++e) {
      std::string shard;
      for (const auto& page_stages : per_page) {
        for (const auto& sample : page_stages[si][static_cast<std::size_t>(e)]) {
          shard += to_json(sample).dump();
          shard += '\n';
          ++stage.records;
        }
      }
      fileio::write_atomic(out_dir / stage.shard_paths[static_cast<std::size_t>(e)],
                           shard);
    }
  }

  fileio::write_atomic(out_dir / "manifest.json",
                       manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace chunkforge::sampler
