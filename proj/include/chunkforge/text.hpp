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

#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 and whitespace helpers shared by ingestion, labeling and
// scoring.
namespace chunkforge::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// Decodes UTF-8 into Unicode scalar values. Each byte of an invalid or
// truncated sequence decodes to U+FFFD.
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view code_points);

bool is_valid_utf8(std::string_view bytes);

// Re-encodes with every invalid byte replaced by U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

std::size_t count_code_points(std::string_view bytes);

// ASCII whitespace only.
bool is_space(char c) noexcept;
std::string_view trim(std::string_view s) noexcept;

// Splits on runs of ASCII whitespace; never yields empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

std::string replace_all(std::string_view s, std::string_view from,
                        std::string_view to);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace chunkforge::text
