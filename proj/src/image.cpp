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

#include "chunkforge/image.hpp"

#include <string>
#include <system_error>
#include <vector>

#include <opencv2/imgcodecs.hpp>

#include "chunkforge/error.hpp"
#include "chunkforge/fileio.hpp"

namespace chunkforge::image {

namespace fs = std::filesystem;

cv::Mat read_image(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorKind::MissingFile, "image not found: " + path.string());
  }
  cv::Mat pixels;
  try {
    pixels = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw Error(ErrorKind::UnreadableImage,
                "cannot decode " + path.string() + ": " + e.what());
  }
  if (pixels.empty()) {
    throw Error(ErrorKind::UnreadableImage, "cannot decode " + path.string());
  }
  return pixels;
}

ImageSize probe_size(const fs::path& path) {
  const cv::Mat pixels = read_image(path);
  return {pixels.cols, pixels.rows};
}

cv::Mat crop_rows(const cv::Mat& pixels, const BandSpan& band) {
  if (band.y_end() > pixels.rows) {
    throw Error(ErrorKind::InvalidConfig,
                "band end " + std::to_string(band.y_end()) +
                    " exceeds image height " + std::to_string(pixels.rows));
  }
  return pixels.rowRange(band.y_start(), band.y_end()).clone();
}

void write_png(const cv::Mat& pixels, const fs::path& out_path) {
  std::vector<unsigned char> encoded;
  try {
    if (!cv::imencode(".png", pixels, encoded)) {
      throw Error(ErrorKind::IoError, "PNG encoding failed for " +
                                          out_path.string());
    }
  } catch (const cv::Exception& e) {
    throw Error(ErrorKind::IoError,
                "PNG encoding failed for " + out_path.string() + ": " +
                    e.what());
  }
  fileio::write_atomic(
      out_path, std::string_view(reinterpret_cast<const char*>(encoded.data()),
                                 encoded.size()));
}

fs::path crop_chunk_image(const fs::path& image_path, const BandSpan& band,
                          const fs::path& out_path) {
  write_png(crop_rows(read_image(image_path), band), out_path);
  return out_path;
}

}  // namespace chunkforge::image
