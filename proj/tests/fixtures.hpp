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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace chunkforge::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("chunkforge_test_" + std::to_string(stamp) + "_" +
             std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Every pixel encodes its own coordinates so crops can be checked exactly.
inline cv::Mat patterned_image(int width, int height) {
  cv::Mat m(height, width, CV_8UC3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      m.at<cv::Vec3b>(y, x) = cv::Vec3b(static_cast<uchar>(y % 256),
                                        static_cast<uchar>(x % 256),
                                        static_cast<uchar>((x + 7 * y) % 251));
    }
  }
  return m;
}

inline void write_image(const fs::path& path, int width, int height) {
  fs::create_directories(path.parent_path());
  cv::imwrite(path.string(), patterned_image(width, height));
}

inline void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string quad_line(int x0, int y0, int x1, int y1,
                             const std::string& text) {
  return std::to_string(x0) + "," + std::to_string(y0) + "," +
         std::to_string(x1) + "," + std::to_string(y0) + "," +
         std::to_string(x1) + "," + std::to_string(y1) + "," +
         std::to_string(x0) + "," + std::to_string(y1) + "," + text + "\n";
}

inline constexpr int kLinePitch = 20;
inline constexpr int kPageWidth = 200;

// Height of a synthetic page holding `lines` text lines.
inline int synthetic_height(int lines) { return kLinePitch * lines + 40; }

// Annotation for a page with exactly `lines` well-separated text lines of one
// to three words each, listed in shuffled order.
inline std::string synthetic_annotation(int lines, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<std::string> rows;
  for (int l = 0; l < lines; ++l) {
    const int y0 = 20 + l * kLinePitch;
    const int words = 1 + static_cast<int>(rng() % 3);
    for (int w = 0; w < words; ++w) {
      const int x0 = 10 + w * 60;
      rows.push_back(quad_line(x0, y0, x0 + 50, y0 + 12,
                               "W" + std::to_string(l) + "_" +
                                   std::to_string(w)));
    }
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  std::string out;
  for (const auto& r : rows) out += r;
  return out;
}

// Writes img/<id>.png and box/<id>.txt for each entry of `line_counts`.
inline void write_synthetic_dataset(const fs::path& dir,
                                    const std::vector<int>& line_counts) {
  for (std::size_t i = 0; i < line_counts.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "page%03zu", i);
    write_image(dir / "img" / (std::string(id) + ".png"), kPageWidth,
                synthetic_height(line_counts[i]));
    write_text(dir / "box" / (std::string(id) + ".txt"),
               synthetic_annotation(line_counts[i],
                                    static_cast<unsigned>(i) + 1));
  }
}

// Irregular layouts: boxes of varying height and horizontal position that
// partially overlap each other, with multi-word transcripts. Returns the
// page ids written.
inline std::vector<std::string> write_noisy_dataset(const fs::path& dir,
                                                    int pages, unsigned seed) {
  std::mt19937 rng(seed);
  auto uni = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  const std::string alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789.:-$";
  std::vector<std::string> ids;
  for (int p = 0; p < pages; ++p) {
    char id[16];
    std::snprintf(id, sizeof id, "noisy%03d", p);
    ids.emplace_back(id);
    const int width = 300;
    const int height = uni(120, 600);
    write_image(dir / "img" / (ids.back() + ".png"), width, height);
    std::string ann;
    const int boxes = uni(3, 30);
    for (int b = 0; b < boxes; ++b) {
      const int h = uni(6, 30);
      const int y0 = uni(0, height - h);
      const int w = uni(10, 120);
      const int x0 = uni(0, width - w);
      std::string text;
      const int words = uni(1, 3);
      for (int k = 0; k < words; ++k) {
        if (k > 0) text += ' ';
        const int len = uni(1, 8);
        for (int c = 0; c < len; ++c) {
          text += alphabet[static_cast<std::size_t>(uni(0, static_cast<int>(alphabet.size()) - 1))];
        }
      }
      ann += quad_line(x0, y0, x0 + w, y0 + h, text);
    }
    write_text(dir / "box" / (ids.back() + ".txt"), ann);
  }
  return ids;
}

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace chunkforge::testing
