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

#include <map>
#include <random>
#include <set>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "chunkforge/error.hpp"
#include "chunkforge/image.hpp"
#include "chunkforge/ingest.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace chunkforge;
using chunkforge::testing::TempDir;

namespace {

ReceiptPage page_with_height(int height, std::string id = "pg") {
  ReceiptPage page{std::move(id), 100, height, "", {}};
  for (int y = 0; y + 12 <= height; y += 20) {
    page.instances.push_back(
        {Rect{5, y, 60, y + 12}, "L" + std::to_string(y)});
  }
  return page;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("chunk_height") {
  CHECK(sampler::chunk_height(300, 3) == 100);
  CHECK(sampler::chunk_height(301, 3) == 100);
  CHECK(sampler::chunk_height(5, 5) == 1);
  CHECK(kind_of([] { sampler::chunk_height(4, 5); }) == ErrorKind::PageTooShort);
  CHECK(kind_of([] { sampler::chunk_height(4, 0); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("training chunks for L = 1 cover the whole page") {
  const auto page = page_with_height(300);
  const LabelerConfig config;
  const auto samples =
      sampler::sample_training_chunks(page, 1, 5, 1234, config);
  REQUIRE(samples.size() == 5);
  for (const auto& s : samples) {
    CHECK(s.band == BandSpan(0, 300));
    CHECK(s.label == labeler::document_label(page, config));
  }
}

TEST_CASE("training chunk starts are uniform over the closed range") {
  const auto page = page_with_height(300);
  const auto samples =
      sampler::sample_training_chunks(page, 3, 4000, 99, LabelerConfig{});
  int lo = 1000, hi = -1;
  std::map<int, int> thirds;
  for (const auto& s : samples) {
    CHECK(s.band.height() == 100);
    lo = std::min(lo, s.band.y_start());
    hi = std::max(hi, s.band.y_start());
    ++thirds[std::min(2, s.band.y_start() / 67)];
  }
  CHECK(lo == 0);
  CHECK(hi == 200);
  // each third of [0, 200] should hold roughly a third of the draws
  for (const auto& [bucket, count] : thirds) {
    CAPTURE(bucket);
    CHECK(count > 1100);
    CHECK(count < 1550);
  }
}

TEST_CASE("default stage on a tall page yields N chunks of height H/30") {
  const auto page = page_with_height(1234);
  const auto samples = sampler::sample_training_chunks(
      page, 30, sampler::kDefaultSamplesPerImage, 5, LabelerConfig{});
  REQUIRE(samples.size() == 20);
  for (int k = 0; k < 20; ++k) {
    CHECK(samples[k].band.height() == 1234 / 30);
    CHECK(samples[k].sample_index == k);
    CHECK(samples[k].stage_L == 30);
  }
}

TEST_CASE("random band legality and label consistency") {
  std::mt19937 rng(17);
  const LabelerConfig config;
  for (int trial = 0; trial < 10000; ++trial) {
    const int height = std::uniform_int_distribution<int>(1, 2000)(rng);
    const int chunks = std::uniform_int_distribution<int>(1, height)(rng);
    const int h = sampler::chunk_height(height, chunks);
    const int s = sampler::draw_start(rng(), "page", trial, height - h);
    CHECK(s >= 0);
    CHECK(s + h <= height);
  }
  const auto page = page_with_height(400);
  for (const auto& s :
       sampler::sample_training_chunks(page, 7, 50, 3, config)) {
    CHECK(s.label == labeler::build_chunk_label(page, s.band, config));
  }
}

TEST_CASE("draw_start is a pure function of its inputs") {
  CHECK(sampler::draw_start(1, "a", 0, 1000) ==
        sampler::draw_start(1, "a", 0, 1000));
  std::set<int> distinct;
  for (int i = 0; i < 50; ++i) distinct.insert(sampler::draw_start(1, "a", i, 1000));
  CHECK(distinct.size() > 40);
  CHECK(sampler::draw_start(1, "a", 0, 0) == 0);
  CHECK(sampler::derive_stage_seed(7, 30) != sampler::derive_stage_seed(7, 15));
  CHECK(sampler::derive_stage_seed(7, 30) != sampler::derive_stage_seed(8, 30));
}

TEST_CASE("resampling empty chunks") {
  // one text line near the bottom of a tall page: most small chunks are empty
  ReceiptPage page{"sparse", 100, 1000, "", {{Rect{0, 980, 50, 995}, "END"}}};
  const LabelerConfig config;
  const auto plain = sampler::sample_training_chunks(page, 50, 40, 11, config);
  sampler::SamplingOptions retry;
  retry.resample_empty = true;
  const auto redrawn =
      sampler::sample_training_chunks(page, 50, 40, 11, config, 0, retry);
  auto empties = [](const auto& v) {
    return std::count_if(v.begin(), v.end(),
                         [](const auto& s) { return s.label.empty(); });
  };
  CHECK(empties(plain) > 30);
  CHECK(empties(redrawn) <= empties(plain));
  // the first attempt is shared, so non-empty draws are unchanged
  for (std::size_t i = 0; i < plain.size(); ++i) {
    if (!plain[i].label.empty()) CHECK(plain[i] == redrawn[i]);
  }
}

TEST_CASE("tile_eval_chunks") {
  const LabelerConfig config;
  auto bands = [&](int height, int chunks) {
    std::vector<std::pair<int, int>> out;
    for (const auto& s :
         sampler::tile_eval_chunks(page_with_height(height), chunks, config)) {
      out.emplace_back(s.band.y_start(), s.band.y_end());
    }
    return out;
  };
  using V = std::vector<std::pair<int, int>>;
  CHECK(bands(300, 3) == V{{0, 100}, {100, 200}, {200, 300}});
  CHECK(bands(301, 3) == V{{0, 100}, {100, 200}, {200, 301}});
  CHECK(bands(300, 1) == V{{0, 300}});
  CHECK(kind_of([&] { bands(2, 3); }) == ErrorKind::PageTooShort);
}

TEST_CASE("stage lists must strictly decrease") {
  CHECK_NOTHROW(sampler::validate_stage_list(sampler::kDefaultStages));
  for (std::vector<int> bad : {std::vector<int>{15, 15}, {1, 2}, {}, {3, 0}}) {
    CHECK(kind_of([&] { sampler::validate_stage_list(bad); }) ==
          ErrorKind::InvalidConfig);
  }
}

TEST_CASE("crop_chunk_image") {
  TempDir dir;
  testing::write_image(dir / "in.png", 100, 300);
  const cv::Mat original = cv::imread((dir / "in.png").string(), cv::IMREAD_UNCHANGED);

  image::crop_chunk_image(dir / "in.png", BandSpan(0, 300), dir / "full.png");
  const cv::Mat full = cv::imread((dir / "full.png").string(), cv::IMREAD_UNCHANGED);
  CHECK(cv::norm(full, original, cv::NORM_INF) == 0);

  image::crop_chunk_image(dir / "in.png", BandSpan(10, 20), dir / "strip.png");
  const cv::Mat strip = cv::imread((dir / "strip.png").string(), cv::IMREAD_UNCHANGED);
  CHECK(strip.cols == 100);
  CHECK(strip.rows == 10);

  image::crop_chunk_image(dir / "in.png", BandSpan(40, 70), dir / "a.png");
  image::crop_chunk_image(dir / "in.png", BandSpan(70, 130), dir / "b.png");
  cv::Mat stacked;
  cv::vconcat(cv::imread((dir / "a.png").string(), cv::IMREAD_UNCHANGED),
              cv::imread((dir / "b.png").string(), cv::IMREAD_UNCHANGED),
              stacked);
  CHECK(cv::norm(stacked, original.rowRange(40, 130), cv::NORM_INF) == 0);

  CHECK(kind_of([&] {
          image::crop_chunk_image(dir / "in.png", BandSpan(290, 310),
                                  dir / "x.png");
        }) == ErrorKind::InvalidConfig);
  testing::write_text(dir / "junk.png", "junk");
  CHECK(kind_of([&] {
          image::crop_chunk_image(dir / "junk.png", BandSpan(0, 1),
                                  dir / "x.png");
        }) == ErrorKind::UnreadableImage);
}

TEST_CASE("build_curriculum") {
  TempDir data;
  testing::write_synthetic_dataset(data.path(), {3, 5, 8});
  const auto pages = ingest::load_dataset(data.path(), "").pages;
  const LabelerConfig config;

  SUBCASE("default stages, deterministic output") {
    TempDir a, b;
    sampler::BuildOptions options;
    options.seed = 42;
    const auto m = sampler::build_curriculum(pages, options, config, a.path());
    options.jobs = 3;
    sampler::build_curriculum(pages, options, config, b.path());

    REQUIRE(m.stages.size() == 6);
    const std::vector<int> expected{30, 15, 7, 4, 2, 1};
    for (std::size_t i = 0; i < 6; ++i) CHECK(m.stages[i].L == expected[i]);
    CHECK(m.stages[0].records == 60);
    CHECK(m.stages[5].records == 3);  // L = 1 deduplicated

    CHECK(testing::slurp(a / "manifest.json") ==
          testing::slurp(b / "manifest.json"));
    for (const auto& s : m.stages) {
      CHECK(testing::slurp(a.path() / s.shard_paths[0]) ==
            testing::slurp(b.path() / s.shard_paths[0]));
    }

    const auto reread = sampler::Manifest::from_json(
        nlohmann::json::parse(testing::slurp(a / "manifest.json")));
    CHECK(reread.to_json() == m.to_json());
  }

  SUBCASE("different seeds give different shards") {
    TempDir a, b;
    sampler::BuildOptions options;
    options.stages = {15};
    options.seed = 1;
    sampler::build_curriculum(pages, options, config, a.path());
    options.seed = 2;
    sampler::build_curriculum(pages, options, config, b.path());
    CHECK(testing::slurp(a / "shards/L15_e0.jsonl") !=
          testing::slurp(b / "shards/L15_e0.jsonl"));
  }

  SUBCASE("epochs, crops and tiled mode") {
    TempDir out;
    sampler::BuildOptions options;
    options.stages = {4, 1};
    options.samples_per_image = 3;
    options.epochs = 2;
    options.materialize_crops = true;
    const auto m = sampler::build_curriculum(pages, options, config, out.path());
    REQUIRE(m.stages[0].shard_paths.size() == 2);
    CHECK(m.stages[0].records == 3 * 3 * 2);
    CHECK(m.stages[1].records == 3 * 2);

    const auto second = testing::slurp(out.path() / m.stages[0].shard_paths[1]);
    const auto first_line = nlohmann::json::parse(second.substr(0, second.find('\n')));
    CHECK(first_line["sample_index"] == 3);
    const std::string crop = first_line["crop_path"];
    CHECK(crop == "crops/page000_L4_k3.png");
    const cv::Mat img = cv::imread((out.path() / crop).string(), cv::IMREAD_UNCHANGED);
    CHECK(img.rows == first_line["y_end"].get<int>() - first_line["y_start"].get<int>());
    CHECK(img.cols == testing::kPageWidth);

    TempDir tiled_out;
    options.mode = sampler::SampleMode::kTiled;
    options.materialize_crops = false;
    const auto t = sampler::build_curriculum(pages, options, config, tiled_out.path());
    CHECK(t.stages[0].epochs == 1);
    CHECK(t.stages[0].N == 4);
    CHECK(t.stages[0].records == 12);
    const auto shard = testing::slurp(tiled_out.path() / t.stages[0].shard_paths[0]);
    CHECK(shard.find("\"crop_path\":null") != std::string::npos);
  }

  SUBCASE("rejects bad configuration") {
    TempDir out;
    sampler::BuildOptions options;
    options.stages = {15, 15};
    CHECK(kind_of([&] {
            sampler::build_curriculum(pages, options, config, out.path());
          }) == ErrorKind::InvalidConfig);
    options.stages = {2};
    LabelerConfig colliding;
    colliding.separator = "W";
    CHECK(kind_of([&] {
            sampler::build_curriculum(pages, options, colliding, out.path());
          }) == ErrorKind::SeparatorCollision);
    options.stages = {100000};
    CHECK(kind_of([&] {
            sampler::build_curriculum(pages, options, config, out.path());
          }) == ErrorKind::PageTooShort);
  }
}
