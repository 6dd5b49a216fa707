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

#include <opencv2/core.hpp>

#include "chunkforge/geometry.hpp"

namespace chunkforge::image {

struct ImageSize {
  int width = 0;
  int height = 0;
};

// Decodes the raster at `path` without colour conversion or EXIF rotation,
// so pixel rows line up with annotation coordinates.
// Throws Error(MissingFile) or Error(UnreadableImage).
cv::Mat read_image(const std::filesystem::path& path);

ImageSize probe_size(const std::filesystem::path& path);

// Rows [y_start, y_end) at full width. Throws Error(InvalidConfig) when the
// band extends past the image.
cv::Mat crop_rows(const cv::Mat& pixels, const BandSpan& band);

// Lossless PNG, written to a temp file then renamed into place.
// Throws Error(IoError).
void write_png(const cv::Mat& pixels, const std::filesystem::path& out_path);

// Convenience wrapper: decode, crop and write in one call.
std::filesystem::path crop_chunk_image(const std::filesystem::path& image_path,
                                       const BandSpan& band,
                                       const std::filesystem::path& out_path);

}  // namespace chunkforge::image
