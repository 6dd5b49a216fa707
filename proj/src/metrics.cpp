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

#include "chunkforge/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "chunkforge/error.hpp"
#include "chunkforge/parallel.hpp"
#include "chunkforge/text.hpp"

namespace chunkforge::metrics {

EditStats align(std::u32string_view ref, std::u32string_view hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t cols = m + 1;
  std::vector<std::uint32_t> cost((n + 1) * cols);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return cost[i * cols + j];
  };

  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag =
          at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0u : 1u);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditStats stats;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = at(i, j);
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (same && here == at(i - 1, j - 1)) {
        ++stats.correct, --i, --j;
        continue;
      }
      if (!same && here == at(i - 1, j - 1) + 1) {
        ++stats.substitutions, --i, --j;
        continue;
      }
    }
    if (i > 0 && here == at(i - 1, j) + 1) {
      ++stats.deletions, --i;
      continue;
    }
    ++stats.insertions, --j;
  }

  if (n > 0) {
    stats.cer = static_cast<double>(stats.errors()) / static_cast<double>(n);
  }
  return stats;
}

EditStats cer(std::string_view reference, std::string_view hypothesis) {
  return align(text::decode_utf8(reference), text::decode_utf8(hypothesis));
}

std::vector<std::string> tokenize_words(std::string_view s,
                                        std::string_view separator) {
  if (separator.empty()) return text::split_whitespace(s);
  return text::split_whitespace(text::replace_all(s, separator, " "));
}

PrfStats make_prf(std::size_t matched, std::size_t ref_count,
                  std::size_t hyp_count) {
  PrfStats p{matched, ref_count, hyp_count, 0.0, 0.0, 0.0};
  if (hyp_count > 0) {
    p.precision = static_cast<double>(matched) / static_cast<double>(hyp_count);
  }
  if (ref_count > 0) {
    p.recall = static_cast<double>(matched) / static_cast<double>(ref_count);
  }
  if (p.precision + p.recall > 0.0) {
    p.f1 = 2.0 * p.precision * p.recall / (p.precision + p.recall);
  }
  return p;
}

PrfStats word_prf(std::string_view reference, std::string_view hypothesis,
                  std::string_view separator) {
  const auto ref = tokenize_words(reference, separator);
  const auto hyp = tokenize_words(hypothesis, separator);

  std::unordered_map<std::string_view, std::size_t> available;
  for (const auto& w : ref) ++available[w];
  std::size_t matched = 0;
  for (const auto& w : hyp) {
    auto it = available.find(w);
    if (it != available.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  return make_prf(matched, ref.size(), hyp.size());
}

namespace {

PairResult score_pair(const ScoredPair& pair, const EvalOptions& options) {
  PairResult r;
  r.key = pair.key;
  if (options.strip_separator) {
    const std::string ref =
        text::replace_all(pair.reference, options.separator, " ");
    const std::string hyp =
        text::replace_all(pair.hypothesis, options.separator, " ");
    r.edit = cer(ref, hyp);
    r.prf = word_prf(ref, hyp, "");
  } else {
    r.edit = cer(pair.reference, pair.hypothesis);
    r.prf = word_prf(pair.reference, pair.hypothesis, "");
  }
  return r;
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string format_ratio(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream out;
  out << std::setprecision(10) << *v;
  return out.str();
}

}  // namespace

CorpusReport evaluate_corpus(std::span<const ScoredPair> pairs,
                             const EvalOptions& options, unsigned jobs) {
  if (pairs.empty()) {
    throw Error(ErrorKind::EmptyCorpus, "no reference/hypothesis pairs");
  }
  CorpusReport report;
  report.options = options;
  report.pairs.resize(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    report.pairs[i] = score_pair(pairs[i], options);
  });

  CorpusSummary& c = report.corpus;
  c.pairs = pairs.size();
  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0, sum_cer = 0.0;
  std::size_t cer_pairs = 0;
  for (const auto& r : report.pairs) {
    c.substitutions += r.edit.substitutions;
    c.deletions += r.edit.deletions;
    c.insertions += r.edit.insertions;
    c.correct += r.edit.correct;
    c.matched += r.prf.matched;
    c.ref_words += r.prf.ref_count;
    c.hyp_words += r.prf.hyp_count;
    if (r.edit.empty_reference()) ++c.empty_references;
    sum_p += r.prf.precision;
    sum_r += r.prf.recall;
    sum_f += r.prf.f1;
    if (r.edit.cer) {
      sum_cer += *r.edit.cer;
      ++cer_pairs;
    }
  }
  c.avg_hyp_len =
      static_cast<double>(c.hyp_words) / static_cast<double>(c.pairs);

  if (options.averaging == Averaging::kMicro) {
    const PrfStats p = make_prf(c.matched, c.ref_words, c.hyp_words);
    c.precision = p.precision;
    c.recall = p.recall;
    c.f1 = p.f1;
    const std::size_t ref_chars = c.substitutions + c.deletions + c.correct;
    if (ref_chars > 0) {
      c.cer = static_cast<double>(c.substitutions + c.deletions +
                                  c.insertions) /
              static_cast<double>(ref_chars);
    }
  } else {
    const double n = static_cast<double>(c.pairs);
    c.precision = sum_p / n;
    c.recall = sum_r / n;
    c.f1 = sum_f / n;
    if (cer_pairs > 0) c.cer = sum_cer / static_cast<double>(cer_pairs);
  }
  return report;
}

nlohmann::ordered_json CorpusReport::to_json() const {
  nlohmann::ordered_json j;
  j["options"] = {
      {"separator", options.separator},
      {"strip_separator", options.strip_separator},
      {"averaging",
       options.averaging == Averaging::kMicro ? "micro" : "macro"}};
  j["corpus"] = {{"precision", corpus.precision},
                 {"recall", corpus.recall},
                 {"f1", corpus.f1},
                 {"cer", optional_number(corpus.cer)},
                 {"S", corpus.substitutions},
                 {"D", corpus.deletions},
                 {"I", corpus.insertions},
                 {"C", corpus.correct},
                 {"avg_hyp_len", corpus.avg_hyp_len},
                 {"matched", corpus.matched},
                 {"ref_words", corpus.ref_words},
                 {"hyp_words", corpus.hyp_words},
                 {"pairs", corpus.pairs},
                 {"empty_references", corpus.empty_references}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : pairs) {
    rows.push_back({{"key", r.key},
                    {"precision", r.prf.precision},
                    {"recall", r.prf.recall},
                    {"f1", r.prf.f1},
                    {"cer", optional_number(r.edit.cer)},
                    {"S", r.edit.substitutions},
                    {"D", r.edit.deletions},
                    {"I", r.edit.insertions},
                    {"C", r.edit.correct},
                    {"matched", r.prf.matched},
                    {"ref_words", r.prf.ref_count},
                    {"hyp_words", r.prf.hyp_count}});
  }
  j["pairs"] = std::move(rows);
  return j;
}

std::string CorpusReport::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "key,precision,recall,f1,cer,S,D,I,C,matched,ref_words,hyp_words\n";
  auto quote = [](const std::string& s) {
    return "\"" + text::replace_all(s, "\"", "\"\"") + "\"";
  };
  for (const auto& r : pairs) {
    out << quote(r.key) << ',' << r.prf.precision << ',' << r.prf.recall
        << ',' << r.prf.f1 << ',' << format_ratio(r.edit.cer) << ','
        << r.edit.substitutions << ',' << r.edit.deletions << ','
        << r.edit.insertions << ',' << r.edit.correct << ',' << r.prf.matched
        << ',' << r.prf.ref_count << ',' << r.prf.hyp_count << '\n';
  }
  out << "__corpus__," << corpus.precision << ',' << corpus.recall << ','
      << corpus.f1 << ',' << format_ratio(corpus.cer) << ','
      << corpus.substitutions << ',' << corpus.deletions << ','
      << corpus.insertions << ',' << corpus.correct << ',' << corpus.matched
      << ',' << corpus.ref_words << ',' << corpus.hyp_words << '\n';
  return out.str();
}

std::size_t LineHistogram::total_pages() const {
  std::size_t total = 0;
  for (const auto& [count, pages] : pages_by_line_count) total += pages;
  return total;
}

std::string LineHistogram::to_csv() const {
  std::string out = "line_count,pages\n";
  for (const auto& [count, pages] : pages_by_line_count) {
    out += std::to_string(count) + "," + std::to_string(pages) + "\n";
  }
  return out;
}

std::string LineHistogram::to_svg() const {
  constexpr int kBarWidth = 12;
  constexpr int kPlotHeight = 200;
  constexpr int kMargin = 40;

  const int max_lines =
      pages_by_line_count.empty() ? 0 : pages_by_line_count.rbegin()->first;
  std::size_t max_pages = 1;
  for (const auto& [count, pages] : pages_by_line_count) {
    max_pages = std::max(max_pages, pages);
  }
  const int width = 2 * kMargin + (max_lines + 1) * kBarWidth;
  const int height = 2 * kMargin + kPlotHeight;
  const int baseline = kMargin + kPlotHeight;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "  <line x1=\"" << kMargin << "\" y1=\"" << baseline << "\" x2=\""
      << width - kMargin << "\" y2=\"" << baseline
      << "\" stroke=\"black\"/>\n";
  for (const auto& [count, pages] : pages_by_line_count) {
    const int bar = static_cast<int>(static_cast<double>(pages) /
                                     static_cast<double>(max_pages) *
                                     kPlotHeight);
    const int x = kMargin + count * kBarWidth;
    const bool is_median = count == median;
    svg << "  <rect x=\"" << x << "\" y=\"" << baseline - bar << "\" width=\""
        << kBarWidth - 2 << "\" height=\"" << bar << "\" fill=\""
        << (is_median ? "#d62728" : "#1f77b4") << "\"><title>" << count
        << " lines: " << pages << " pages</title></rect>\n";
  }
  svg << "  <text x=\"" << kMargin << "\" y=\"" << height - 10
      << "\" font-size=\"12\">text lines per page (median " << median
      << ")</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

LineHistogram histogram_from_counts(std::span<const int> line_counts) {
  if (line_counts.empty()) {
    throw Error(ErrorKind::EmptyCorpus, "no pages to analyze");
  }
  LineHistogram h;
  for (int c : line_counts) ++h.pages_by_line_count[c];
  std::vector<int> sorted(line_counts.begin(), line_counts.end());
  std::sort(sorted.begin(), sorted.end());
  h.median = sorted[(sorted.size() - 1) / 2];
  return h;
}

LineHistogram line_count_distribution(std::span<const ReceiptPage> pages,
                                      const LabelerConfig& config) {
  std::vector<int> counts;
  counts.reserve(pages.size());
  for (const auto& page : pages) {
    counts.push_back(
        static_cast<int>(labeler::document_label(page, config).lines.size()));
  }
  return histogram_from_counts(counts);
}

std::vector<std::string> split_output_lines(std::string_view generated,
                                            std::string_view separator) {
  std::vector<std::string> lines;
  auto keep = [&](std::string_view piece) {
    piece = text::trim(piece);
    if (!piece.empty()) lines.emplace_back(piece);
  };
  if (separator.empty()) {
    keep(generated);
    return lines;
  }
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = generated.find(separator, pos);
    if (hit == std::string_view::npos) break;
    keep(generated.substr(pos, hit - pos));
    pos = hit + separator.size();
  }
  keep(generated.substr(pos));
  return lines;
}

}  // namespace chunkforge::metrics
