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

#include "chunkforge/ingest.hpp"

#include "chunkforge/error.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace chunkforge;
using chunkforge::testing::TempDir;

namespace {

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

TEST_CASE("parse_annotation_line") {
  auto inst = ingest::parse_annotation_line("0,0,10,0,10,5,0,5,HELLO");
  CHECK(inst.box == Rect{0, 0, 10, 5});
  CHECK(inst.text == "HELLO");

  inst = ingest::parse_annotation_line("0,0,10,0,10,5,0,5,A,B");
  CHECK(inst.text == "A,B");

  inst = ingest::parse_annotation_line("5,0,10,2,8,9,3,7,X");
  CHECK(inst.box == Rect{3, 0, 10, 9});

  inst = ingest::parse_annotation_line(" 1, 2,11,2,11,12,1,12,  TOTAL 9.90 \r");
  CHECK(inst.box == Rect{1, 2, 11, 12});
  CHECK(inst.text == "TOTAL 9.90");
}

TEST_CASE("parse_annotation_line rejects malformed input") {
  const char* bad[] = {
      "0,0,10,0,10,5,0,5",        // no transcript
      "0,0,10,0,10,5,0",          // too few fields
      "0,0,1x,0,10,5,0,5,HELLO",  // non-numeric coordinate
      "0,0,10,0,10,5,0,5,   ",    // blank transcript
      "3,3,3,3,3,3,3,3,DOT",      // zero area
      "",
  };
  for (const char* line : bad) {
    CAPTURE(line);
    CHECK(kind_of([&] { ingest::parse_annotation_line(line); }) ==
          ErrorKind::MalformedLine);
  }
}

TEST_CASE("make_page clamps out-of-bounds boxes") {
  std::vector<std::string> warnings;
  const auto page = ingest::make_page(
      "p", 100, 50, "p.png",
      {{Rect{-5, 10, 120, 20}, "WIDE"}, {Rect{0, 60, 10, 70}, "GONE"},
       {Rect{0, 0, 10, 10}, "OK"}},
      warnings);
  REQUIRE(page.instances.size() == 2);
  CHECK(page.instances[0].box == Rect{0, 10, 100, 20});
  CHECK(page.instances[1].text == "OK");
  CHECK(warnings.size() == 2);

  CHECK(kind_of([&] {
          ingest::make_page("p", 100, 50, "p.png",
                            {{Rect{0, 60, 10, 70}, "GONE"}}, warnings,
                            ingest::ParsePolicy::kStrict);
        }) == ErrorKind::MalformedLine);
}

TEST_CASE("load_page") {
  TempDir dir;
  testing::write_image(dir / "r.png", 100, 300);

  SUBCASE("valid lines") {
    testing::write_text(dir / "r.txt", testing::quad_line(0, 0, 10, 10, "A") +
                                           testing::quad_line(0, 20, 10, 30, "B"));
    const auto loaded = ingest::load_page(dir / "r.png", dir / "r.txt");
    CHECK(loaded.page.width == 100);
    CHECK(loaded.page.height == 300);
    CHECK(loaded.page.page_id == "r");
    CHECK(loaded.page.instances.size() == 2);
    CHECK(loaded.warnings.empty());
  }
  SUBCASE("skip policy drops malformed lines with a warning") {
    testing::write_text(dir / "r.txt",
                        "\xEF\xBB\xBF" + testing::quad_line(0, 0, 10, 10, "A") +
                            "garbage\n\n" +
                            testing::quad_line(0, 20, 10, 30, "B"));
    const auto loaded = ingest::load_page(dir / "r.png", dir / "r.txt");
    CHECK(loaded.page.instances.size() == 2);
    CHECK(loaded.page.instances[0].text == "A");
    CHECK(loaded.warnings.size() == 1);
  }
  SUBCASE("strict policy aborts") {
    testing::write_text(dir / "r.txt",
                        testing::quad_line(0, 0, 10, 10, "A") + "garbage\n");
    CHECK(kind_of([&] {
            ingest::load_page(dir / "r.png", dir / "r.txt",
                              {ingest::ParsePolicy::kStrict, 1});
          }) == ErrorKind::MalformedLine);
  }
  SUBCASE("no valid lines") {
    testing::write_text(dir / "r.txt", "garbage\n");
    CHECK(kind_of([&] { ingest::load_page(dir / "r.png", dir / "r.txt"); }) ==
          ErrorKind::EmptyAnnotation);
  }
  SUBCASE("missing and unreadable files") {
    testing::write_text(dir / "r.txt", testing::quad_line(0, 0, 10, 10, "A"));
    CHECK(kind_of([&] { ingest::load_page(dir / "nope.png", dir / "r.txt"); }) ==
          ErrorKind::MissingFile);
    CHECK(kind_of([&] { ingest::load_page(dir / "r.png", dir / "nope.txt"); }) ==
          ErrorKind::MissingFile);
    testing::write_text(dir / "bad.png", "not an image");
    CHECK(kind_of([&] { ingest::load_page(dir / "bad.png", dir / "r.txt"); }) ==
          ErrorKind::UnreadableImage);
  }
  SUBCASE("invalid UTF-8 is replaced and reported") {
    testing::write_text(dir / "r.txt", testing::quad_line(0, 0, 10, 10, "CAF\xE9"));
    const auto loaded = ingest::load_page(dir / "r.png", dir / "r.txt");
    CHECK(loaded.page.instances[0].text == "CAF\xEF\xBF\xBD");
    CHECK(loaded.warnings.size() == 1);
  }
}

TEST_CASE("load_dataset pairs files by stem in sorted order") {
  TempDir dir;
  for (const char* stem : {"c", "a", "b"}) {
    testing::write_image(dir / "train" / "img" / (std::string(stem) + ".png"),
                         50, 60);
    testing::write_text(dir / "train" / "box" / (std::string(stem) + ".txt"),
                        testing::quad_line(0, 0, 10, 10, stem));
  }
  testing::write_image(dir / "train" / "img" / "orphan.png", 50, 60);

  for (unsigned jobs : {1u, 4u}) {
    const auto ds = ingest::load_dataset(dir.path(), "train", {{}, jobs});
    REQUIRE(ds.pages.size() == 3);
    CHECK(ds.pages[0].page_id == "a");
    CHECK(ds.pages[1].page_id == "b");
    CHECK(ds.pages[2].page_id == "c");
    CHECK(ds.warnings.size() == 1);
  }

  // side-by-side layout without img/ and box/
  TempDir flat;
  testing::write_image(flat / "x.jpg", 40, 40);
  testing::write_text(flat / "x.txt", testing::quad_line(0, 0, 10, 10, "X"));
  CHECK(ingest::load_dataset(flat.path(), "").pages.size() == 1);

  CHECK(kind_of([&] { ingest::load_dataset(dir.path(), "test"); }) ==
        ErrorKind::MissingFile);
  TempDir empty;
  CHECK(kind_of([&] { ingest::load_dataset(empty.path(), ""); }) ==
        ErrorKind::EmptyDataset);
}

TEST_CASE("page JSON round trip") {
  const ReceiptPage page{"id\xC3\xA9", 120, 300, "/data/x.png",
                         {{Rect{1, 2, 3, 4}, "A,B \"q\""}, {Rect{0, 0, 9, 9}, "z"}}};
  const auto text = ingest::to_json(page).dump();
  CHECK(ingest::page_from_json(nlohmann::json::parse(text)) == page);
  CHECK_THROWS_AS(ingest::page_from_json(nlohmann::json::parse("{}")), Error);
}
