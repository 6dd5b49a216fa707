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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkforge/labeler.hpp"
#include "json.hpp"

namespace chunkforge::metrics {

// Character-level alignment counts. cer is (S + D + I) / (S + D + C) and is
// empty when the reference is empty; in that case every hypothesis
// character counts as an insertion.
struct EditStats {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t correct = 0;
  std::optional<double> cer;

  std::size_t errors() const noexcept {
    return substitutions + deletions + insertions;
  }
  std::size_t reference_length() const noexcept {
    return substitutions + deletions + correct;
  }
  std::size_t hypothesis_length() const noexcept {
    return substitutions + insertions + correct;
  }
  bool empty_reference() const noexcept { return reference_length() == 0; }
};

// Minimum-cost unit-weight alignment of two code-point sequences. Among
// equal-cost alignments the backtrace prefers match, then substitution,
// then deletion, then insertion.
EditStats align(std::u32string_view reference, std::u32string_view hypothesis);

// align() over the Unicode scalar values of two UTF-8 strings.
EditStats cer(std::string_view reference, std::string_view hypothesis);

struct PrfStats {
  std::size_t matched = 0;
  std::size_t ref_count = 0;
  std::size_t hyp_count = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Case-sensitive whitespace tokenization; occurrences of `separator` (when
// non-empty) are treated as spaces first.
std::vector<std::string> tokenize_words(std::string_view s,
                                        std::string_view separator);

// Unordered word matching: matched is the multiset intersection size.
// Ratios with a zero denominator are 0.
PrfStats word_prf(std::string_view reference, std::string_view hypothesis,
                  std::string_view separator = kDefaultSeparator);

PrfStats make_prf(std::size_t matched, std::size_t ref_count,
                  std::size_t hyp_count);

enum class Averaging { kMicro, kMacro };

struct EvalOptions {
  std::string separator = kDefaultSeparator;
  // Replace the separator with a space on both sides before scoring.
  bool strip_separator = true;
  Averaging averaging = Averaging::kMicro;
};

struct ScoredPair {
  std::string key;
  std::string reference;
  std::string hypothesis;
};

struct PairResult {
  std::string key;
  EditStats edit;
  PrfStats prf;
};

struct CorpusSummary {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> cer;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t correct = 0;
  std::size_t matched = 0;
  std::size_t ref_words = 0;
  std::size_t hyp_words = 0;
  double avg_hyp_len = 0.0;  // mean hypothesis length in words
  std::size_t pairs = 0;
  std::size_t empty_references = 0;
};

struct CorpusReport {
  EvalOptions options;
  CorpusSummary corpus;
  std::vector<PairResult> pairs;

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

// Micro averaging sums S, D, I, C and word counts over pairs; macro
// averaging takes the mean of per-pair ratios (CER over pairs with a
// non-empty reference). Throws Error(EmptyCorpus).
CorpusReport evaluate_corpus(std::span<const ScoredPair> pairs,
                             const EvalOptions& options = {},
                             unsigned jobs = 1);

struct LineHistogram {
  std::map<int, std::size_t> pages_by_line_count;
  int median = 0;  // lower median

  std::size_t total_pages() const;
  std::string to_csv() const;
  std::string to_svg() const;
};

// Throws Error(EmptyCorpus).
LineHistogram histogram_from_counts(std::span<const int> line_counts);

// Line count per page is the number of merged lines of its document label.
LineHistogram line_count_distribution(std::span<const ReceiptPage> pages,
                                      const LabelerConfig& config);

// Splits model output on the separator, trims every piece, drops empties.
std::vector<std::string> split_output_lines(std::string_view generated,
                                            std::string_view separator);

}  // namespace chunkforge::metrics
