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

#include "chunkforge/error.hpp"

namespace chunkforge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::UnreadableImage: return "UnreadableImage";
    case ErrorKind::EmptyAnnotation: return "EmptyAnnotation";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::PageTooShort: return "PageTooShort";
    case ErrorKind::SeparatorCollision: return "SeparatorCollision";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::KeyMismatch: return "KeyMismatch";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyCorpus:
    case ErrorKind::KeyMismatch:
      return 1;
    default:
      return 2;
  }
}

}  // namespace chunkforge
