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

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <system_error>

#include "chunkforge/error.hpp"
#include "chunkforge/fileio.hpp"
#include "chunkforge/image.hpp"
#include "chunkforge/parallel.hpp"
#include "chunkforge/text.hpp"

namespace chunkforge::ingest {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kUtf8Bom = "\xEF\xBB\xBF";

bool parse_int(std::string_view field, int* out) {
  field = text::trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), *out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

bool is_image_file(const fs::path& p) {
  const std::string ext = lower_extension(p);
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

bool is_annotation_file(const fs::path& p) {
  return lower_extension(p) == ".txt";
}

// First existing subdirectory from `candidates`, else `dir` itself.
fs::path pick_subdir(const fs::path& dir,
                     std::initializer_list<std::string_view> candidates) {
  std::error_code ec;
  for (std::string_view name : candidates) {
    const fs::path sub = dir / name;
    if (fs::is_directory(sub, ec)) return sub;
  }
  return dir;
}

std::map<std::string, fs::path> collect_by_stem(const fs::path& dir,
                                                bool (*accept)(const fs::path&),
                                                std::vector<std::string>& warnings) {
  std::map<std::string, fs::path> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file(ec) || !accept(entry.path())) continue;
    const std::string stem = entry.path().stem().string();
    auto [it, inserted] = out.emplace(stem, entry.path());
    if (!inserted) {
      // Keep the lexicographically smallest path so the choice does not
      // depend on enumeration order.
      const fs::path& other = it->second;
      const fs::path& keep = std::min(other, entry.path());
      warnings.push_back("duplicate stem '" + stem + "': using " +
                         keep.filename().string());
      it->second = keep;
    }
  }
  if (ec) {
    throw Error(ErrorKind::IoError,
                "cannot list " + dir.string() + ": " + ec.message());
  }
  return out;
}

}  // namespace

TextInstance parse_annotation_line(std::string_view line) {
  std::array<int, 8> coords{};
  std::size_t pos = 0;
  for (int k = 0; k < 8; ++k) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      throw Error(ErrorKind::MalformedLine,
                  "expected at least 9 comma-separated fields");
    }
    if (!parse_int(line.substr(pos, comma - pos), &coords[k])) {
      throw Error(ErrorKind::MalformedLine,
                  "coordinate " + std::to_string(k + 1) + " is not an integer");
    }
    pos = comma + 1;
  }

  const std::string transcript =
      text::sanitize_utf8(text::trim(line.substr(pos)));
  if (transcript.empty()) {
    throw Error(ErrorKind::MalformedLine, "empty transcript");
  }

  Rect box{coords[0], coords[1], coords[0], coords[1]};
  for (int k = 1; k < 4; ++k) {
    box.x_min = std::min(box.x_min, coords[2 * k]);
    box.x_max = std::max(box.x_max, coords[2 * k]);
    box.y_min = std::min(box.y_min, coords[2 * k + 1]);
    box.y_max = std::max(box.y_max, coords[2 * k + 1]);
  }
  if (!box.has_positive_area()) {
    throw Error(ErrorKind::MalformedLine, "quadrilateral has zero area");
  }
  return {box, transcript};
}

ReceiptPage make_page(std::string page_id, int width, int height,
                      std::string image_path,
                      std::vector<TextInstance> instances,
                      std::vector<std::string>& warnings, ParsePolicy policy) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::UnreadableImage,
                "page " + page_id + " has non-positive dimensions");
  }
  ReceiptPage page{std::move(page_id), width, height, std::move(image_path),
                   {}};
  page.instances.reserve(instances.size());
  for (auto& inst : instances) {
    const Rect raw = inst.box;
    Rect& b = inst.box;
    b.x_min = std::clamp(b.x_min, 0, width);
    b.x_max = std::clamp(b.x_max, 0, width);
    b.y_min = std::clamp(b.y_min, 0, height);
    b.y_max = std::clamp(b.y_max, 0, height);
    if (b == raw) {
      page.instances.push_back(std::move(inst));
      continue;
    }
    if (!b.has_positive_area()) {
      const std::string msg = page.page_id + ": box of \"" + inst.text +
                              "\" lies outside the image";
      if (policy == ParsePolicy::kStrict) {
        throw Error(ErrorKind::MalformedLine, msg);
      }
      warnings.push_back(msg + ", dropped");
      continue;
    }
    warnings.push_back(page.page_id + ": clamped box of \"" + inst.text +
                       "\" to image bounds");
    page.instances.push_back(std::move(inst));
  }
  return page;
}

LoadedPage load_page(const fs::path& image_path, const fs::path& annotation_path,
                     const IngestOptions& options) {
  std::string content = fileio::read_file(annotation_path);
  const auto size = image::probe_size(image_path);
  const std::string page_id = image_path.stem().string();

  LoadedPage loaded;
  std::string_view rest(content);
  if (rest.starts_with(kUtf8Bom)) rest.remove_prefix(kUtf8Bom.size());

  std::vector<TextInstance> instances;
  int line_no = 0;
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{}
                                        : rest.substr(nl + 1);
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where =
        annotation_path.filename().string() + ":" + std::to_string(line_no);
    if (!text::is_valid_utf8(line)) {
      loaded.warnings.push_back(where +
                                ": invalid UTF-8 replaced with U+FFFD");
    }
    try {
      instances.push_back(parse_annotation_line(line));
    } catch (const Error& e) {
      if (options.policy == ParsePolicy::kStrict) {
        throw Error(ErrorKind::MalformedLine, where + ": " + e.what());
      }
      loaded.warnings.push_back(where + ": " + e.what() + ", skipped");
    }
  }

  loaded.page = make_page(page_id, size.width, size.height,
                          image_path.string(), std::move(instances),
                          loaded.warnings, options.policy);
  if (loaded.page.instances.empty()) {
    throw Error(ErrorKind::EmptyAnnotation,
                "no valid text instances in " + annotation_path.string());
  }
  return loaded;
}

LoadedDataset load_dataset(const fs::path& root, std::string_view split,
                           const IngestOptions& options) {
  std::error_code ec;
  const fs::path dir = split.empty() ? root : root / split;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::MissingFile,
                "dataset directory not found: " + dir.string());
  }

  LoadedDataset dataset;
  const fs::path image_dir = pick_subdir(dir, {"img", "images"});
  const fs::path box_dir = pick_subdir(dir, {"box", "boxes", "annotations"});
  const auto images = collect_by_stem(image_dir, is_image_file, dataset.warnings);
  const auto boxes =
      collect_by_stem(box_dir, is_annotation_file, dataset.warnings);

  std::vector<std::pair<fs::path, fs::path>> pairs;
  for (const auto& [stem, image_path] : images) {
    const auto it = boxes.find(stem);
    if (it == boxes.end()) {
      dataset.warnings.push_back(stem + ": image has no annotation, skipped");
      continue;
    }
    pairs.emplace_back(image_path, it->second);
  }
  for (const auto& [stem, box_path] : boxes) {
    if (!images.contains(stem)) {
      dataset.warnings.push_back(stem + ": annotation has no image, skipped");
    }
  }
  if (pairs.empty()) {
    throw Error(ErrorKind::EmptyDataset,
                "no image/annotation pairs under " + dir.string());
  }

  std::vector<LoadedPage> loaded(pairs.size());
  parallel_for(pairs.size(), options.jobs, [&](std::size_t i) {
    loaded[i] = load_page(pairs[i].first, pairs[i].second, options);
  });

  dataset.pages.reserve(loaded.size());
  for (auto& page : loaded) {
    dataset.pages.push_back(std::move(page.page));
    for (auto& w : page.warnings) dataset.warnings.push_back(std::move(w));
  }
  return dataset;
}

nlohmann::ordered_json to_json(const ReceiptPage& page) {
  nlohmann::ordered_json instances = nlohmann::ordered_json::array();
  for (const auto& inst : page.instances) {
    instances.push_back({{"box",
                          {inst.box.x_min, inst.box.y_min, inst.box.x_max,
                           inst.box.y_max}},
                         {"text", inst.text}});
  }
  return {{"page_id", page.page_id},
          {"width", page.width},
          {"height", page.height},
          {"image_path", page.image_path},
          {"instances", std::move(instances)}};
}

ReceiptPage page_from_json(const nlohmann::json& j) {
  try {
    ReceiptPage page;
    page.page_id = j.at("page_id").get<std::string>();
    page.width = j.at("width").get<int>();
    page.height = j.at("height").get<int>();
    page.image_path = j.at("image_path").get<std::string>();
    for (const auto& inst : j.at("instances")) {
      const auto& b = inst.at("box");
      if (b.size() != 4) {
        throw Error(ErrorKind::MalformedInput, "box must have 4 coordinates");
      }
      page.instances.push_back(
          {Rect{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(),
                b[3].get<int>()},
           inst.at("text").get<std::string>()});
    }
    return page;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedInput,
                std::string("invalid page record: ") + e.what());
  }
}

}  // namespace chunkforge::ingest
