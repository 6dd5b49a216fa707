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

#include "chunkforge/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "chunkforge/error.hpp"
#include "chunkforge/fileio.hpp"
#include "chunkforge/ingest.hpp"
#include "chunkforge/labeler.hpp"
#include "chunkforge/metrics.hpp"
#include "chunkforge/sampler.hpp"
#include "chunkforge/text.hpp"
#include "json.hpp"

namespace chunkforge::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kSeedEnv = "CHUNKFORGE_SEED";

struct Settings {
  std::string root;
  std::string split;
  std::string out;
  LabelerConfig labeler;
  std::vector<int> stages = sampler::kDefaultStages;
  int samples_per_image = sampler::kDefaultSamplesPerImage;
  int epochs = 1;
  std::optional<std::uint64_t> seed;
  std::string mode = "random";
  bool materialize_crops = false;
  bool strict = false;
  bool resample_empty = false;
  bool strip_separator = true;
  bool svg = false;
  std::string average = "micro";
  unsigned jobs = 0;
  std::string ref_file;
  std::string hyp_file;
  std::string csv_file;
  std::string shard_file;
  int stage = 1;
};

ingest::IngestOptions ingest_options(const Settings& s) {
  return {s.strict ? ingest::ParsePolicy::kStrict : ingest::ParsePolicy::kSkip,
          s.jobs};
}

std::uint64_t resolve_seed(const Settings& s) {
  if (s.seed) return *s.seed;
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t value = 0;
  const std::string_view text(env);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::InvalidConfig,
                std::string(kSeedEnv) + " is not an unsigned integer: " + env);
  }
  return value;
}

void report_warnings(const std::vector<std::string>& warnings,
                     std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

ingest::LoadedDataset load(const Settings& s, std::ostream& err) {
  auto dataset = ingest::load_dataset(s.root, s.split, ingest_options(s));
  report_warnings(dataset.warnings, err);
  err << "loaded " << dataset.pages.size() << " pages from "
      << (s.split.empty() ? fs::path(s.root) : fs::path(s.root) / s.split)
             .string()
      << '\n';
  return dataset;
}

struct KeyedText {
  std::string key;
  std::string text;
};

std::vector<KeyedText> read_keyed_jsonl(const fs::path& path) {
  const std::string content = fileio::read_file(path);
  std::vector<KeyedText> records;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string::npos) nl = content.size();
    const std::string_view line =
        text::trim(std::string_view(content).substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      KeyedText rec{j.at("key").get<std::string>(),
                    j.at("text").get<std::string>()};
      if (!seen.insert(rec.key).second) {
        throw Error(ErrorKind::MalformedInput,
                    where + ": duplicate key '" + rec.key + "'");
      }
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedInput, where + ": " + e.what());
    }
  }
  return records;
}

std::string chunk_key(std::string_view page_id, int stage_L, int index) {
  return std::string(page_id) + "_L" + std::to_string(stage_L) + "_k" +
         std::to_string(index);
}

std::string dump_jsonl(const std::vector<ordered_json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

int cmd_build_dataset(const Settings& s, std::ostream& out, std::ostream& err) {
  s.labeler.validate();
  sampler::validate_stage_list(s.stages);
  const auto dataset = load(s, err);

  sampler::BuildOptions options;
  options.stages = s.stages;
  options.samples_per_image = s.samples_per_image;
  options.epochs = s.epochs;
  options.mode = sampler::parse_mode(s.mode);
  options.seed = resolve_seed(s);
  options.materialize_crops = s.materialize_crops;
  options.sampling.resample_empty = s.resample_empty;
  options.jobs = s.jobs;
  options.dataset_root = s.root;
  options.split = s.split;

  const auto manifest =
      sampler::build_curriculum(dataset.pages, options, s.labeler, s.out);

  ordered_json summary;
  summary["manifest"] = (fs::path(s.out) / "manifest.json").string();
  summary["pages"] = dataset.pages.size();
  summary["warnings"] = dataset.warnings.size();
  summary["global_seed"] = manifest.global_seed;
  ordered_json stages = ordered_json::array();
  for (const auto& stage : manifest.stages) {
    stages.push_back({{"L", stage.L},
                      {"mode", sampler::to_string(stage.mode)},
                      {"records", stage.records},
                      {"shards", stage.shard_paths}});
    err << "stage L=" << stage.L << ": " << stage.records << " records\n";
  }
  summary["stages"] = std::move(stages);
  out << summary.dump() << '\n';
  return 0;
}

int cmd_analyze(const Settings& s, std::ostream& out, std::ostream& err) {
  s.labeler.validate();
  const auto dataset = load(s, err);
  const auto histogram =
      metrics::line_count_distribution(dataset.pages, s.labeler);

  ordered_json bins = ordered_json::array();
  for (const auto& [count, pages] : histogram.pages_by_line_count) {
    bins.push_back({{"line_count", count}, {"pages", pages}});
  }
  ordered_json summary;
  summary["pages"] = histogram.total_pages();
  summary["median"] = histogram.median;
  summary["histogram"] = bins;

  if (!s.out.empty()) {
    const fs::path dir(s.out);
    fileio::write_atomic(dir / "line_histogram.csv", histogram.to_csv());
    fileio::write_atomic(dir / "line_histogram.json", summary.dump(2) + "\n");
    if (s.svg) {
      fileio::write_atomic(dir / "line_histogram.svg", histogram.to_svg());
    }
  }
  err << "median text lines per page: " << histogram.median << '\n';
  out << summary.dump() << '\n';
  return 0;
}

int cmd_references(const Settings& s, std::ostream& out, std::ostream& err) {
  std::vector<ordered_json> rows;
  if (!s.shard_file.empty()) {
    const std::string content = fileio::read_file(s.shard_file);
    std::size_t pos = 0;
    while (pos < content.size()) {
      std::size_t nl = content.find('\n', pos);
      if (nl == std::string::npos) nl = content.size();
      const std::string_view line =
          text::trim(std::string_view(content).substr(pos, nl - pos));
      pos = nl + 1;
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        rows.push_back(
            {{"key", chunk_key(j.at("page_id").get<std::string>(),
                               j.at("stage_L").get<int>(),
                               j.at("sample_index").get<int>())},
             {"text", j.at("label").get<std::string>()}});
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedInput,
                    s.shard_file + ": invalid shard record: " + e.what());
      }
    }
  } else {
    s.labeler.validate();
    const auto dataset = load(s, err);
    labeler::check_separator_absent(dataset.pages, s.labeler);
    for (const auto& page : dataset.pages) {
      if (s.stage == 1) {
        rows.push_back(
            {{"key", page.page_id},
             {"text", labeler::document_label(page, s.labeler).joined}});
        continue;
      }
      for (const auto& chunk :
           sampler::tile_eval_chunks(page, s.stage, s.labeler)) {
        rows.push_back(
            {{"key", chunk_key(page.page_id, chunk.stage_L, chunk.sample_index)},
             {"text", chunk.label.joined}});
      }
    }
  }
  fileio::write_atomic(s.out, dump_jsonl(rows));
  out << ordered_json{{"references", s.out}, {"records", rows.size()}}.dump()
      << '\n';
  return 0;
}

int cmd_evaluate(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto refs = read_keyed_jsonl(s.ref_file);
  const auto hyps = read_keyed_jsonl(s.hyp_file);

  std::map<std::string, const KeyedText*> hyp_by_key;
  for (const auto& h : hyps) hyp_by_key.emplace(h.key, &h);

  std::vector<metrics::ScoredPair> pairs;
  std::vector<std::string> missing_in_hyp;
  std::set<std::string> ref_keys;
  for (const auto& r : refs) {
    ref_keys.insert(r.key);
    const auto it = hyp_by_key.find(r.key);
    if (it == hyp_by_key.end()) {
      missing_in_hyp.push_back(r.key);
      continue;
    }
    pairs.push_back({r.key, r.text, it->second->text});
  }
  std::vector<std::string> missing_in_ref;
  for (const auto& h : hyps) {
    if (!ref_keys.contains(h.key)) missing_in_ref.push_back(h.key);
  }
  if (!missing_in_hyp.empty() || !missing_in_ref.empty()) {
    ordered_json e;
    e["error"] = {{"kind", "KeyMismatch"},
                  {"message", "reference and hypothesis keys differ"},
                  {"missing_in_hypothesis", missing_in_hyp},
                  {"missing_in_reference", missing_in_ref}};
    out << e.dump() << '\n';
    err << "error: KeyMismatch: " << missing_in_hyp.size()
        << " keys missing from hypotheses, " << missing_in_ref.size()
        << " keys missing from references\n";
    for (const auto& k : missing_in_hyp) err << "  missing hypothesis: " << k << '\n';
    for (const auto& k : missing_in_ref) err << "  missing reference: " << k << '\n';
    return exit_code_for(ErrorKind::KeyMismatch);
  }

  metrics::EvalOptions options;
  options.separator = s.labeler.separator;
  options.strip_separator = s.strip_separator;
  if (s.average == "micro") {
    options.averaging = metrics::Averaging::kMicro;
  } else if (s.average == "macro") {
    options.averaging = metrics::Averaging::kMacro;
  } else {
    throw Error(ErrorKind::InvalidConfig,
                "--average must be micro or macro");
  }

  const auto report = metrics::evaluate_corpus(pairs, options, s.jobs);
  const auto j = report.to_json();
  if (!s.out.empty()) fileio::write_atomic(s.out, j.dump(2) + "\n");
  if (!s.csv_file.empty()) fileio::write_atomic(s.csv_file, report.to_csv());
  if (report.corpus.empty_references > 0) {
    err << "warning: " << report.corpus.empty_references
        << " pairs have an empty reference (CER undefined for them)\n";
  }
  out << j["corpus"].dump() << '\n';
  return 0;
}

int cmd_postprocess(const Settings& s, std::ostream& out, std::ostream&) {
  const auto hyps = read_keyed_jsonl(s.hyp_file);
  std::vector<ordered_json> rows;
  rows.reserve(hyps.size());
  for (const auto& h : hyps) {
    rows.push_back(
        {{"key", h.key},
         {"lines", metrics::split_output_lines(h.text, s.labeler.separator)}});
  }
  fileio::write_atomic(s.out, dump_jsonl(rows));
  out << ordered_json{{"lines", s.out}, {"records", rows.size()}}.dump()
      << '\n';
  return 0;
}

void add_labeler_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--theta", s.labeler.theta,
                  "Box kept when its area fraction inside the chunk exceeds this")
      ->capture_default_str();
  cmd->add_option("--delta", s.labeler.delta,
                  "Boxes share a text line when vertical overlap reaches this")
      ->capture_default_str();
  cmd->add_option("--separator", s.labeler.separator, "Text-line separator")
      ->capture_default_str();
  cmd->add_option("--joiner", s.labeler.joiner, "Intra-line joiner")
      ->capture_default_str();
}

void add_dataset_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--root", s.root, "Dataset root directory")->required();
  cmd->add_option("--split", s.split, "Subdirectory of the root (e.g. train)");
  cmd->add_flag("--strict", s.strict, "Abort on the first malformed line");
  cmd->add_option("--jobs", s.jobs, "Worker threads (0 = all cores)");
}

int fail(ErrorKind kind, const std::string& message, std::ostream& out,
         std::ostream& err) {
  ordered_json e;
  e["error"] = {{"kind", to_string(kind)}, {"message", message}};
  out << e.dump() << '\n';
  err << "error: " << to_string(kind) << ": " << message << '\n';
  return exit_code_for(kind);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Settings s;
  CLI::App app{"Chunk-level OCR dataset builder and evaluator", "chunkforge"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand(
      "build-dataset", "Sample chunks, build labels and write curriculum shards");
  add_dataset_flags(build, s);
  add_labeler_flags(build, s);
  build->add_option("--out", s.out, "Output directory")->required();
  build->add_option("--stages", s.stages, "Chunk counts L, strictly decreasing")
      ->delimiter(',')
      ->capture_default_str();
  build->add_option("--samples-per-image", s.samples_per_image,
                    "Random chunks per image per epoch (N)")
      ->capture_default_str();
  build->add_option("--epochs", s.epochs, "Epoch shards per stage")
      ->capture_default_str();
  build->add_option("--seed", s.seed,
                    std::string("Global seed (defaults to $") + kSeedEnv +
                        ", else 0)");
  build->add_option("--mode", s.mode, "random (training) or tiled (evaluation)")
      ->check(CLI::IsMember({"random", "tiled"}))
      ->capture_default_str();
  build->add_flag("--materialize-crops", s.materialize_crops,
                  "Write a PNG per chunk");
  build->add_flag("--resample-empty", s.resample_empty,
                  "Redraw chunks with empty labels (up to 10 times)");

  auto* analyze = app.add_subcommand(
      "analyze", "Histogram of text lines per page and its median");
  add_dataset_flags(analyze, s);
  add_labeler_flags(analyze, s);
  analyze->add_option("--out", s.out, "Directory for histogram files");
  analyze->add_flag("--svg", s.svg, "Also write an SVG bar chart");

  auto* references = app.add_subcommand(
      "references", "Write reference JSONL {key, text} from pages or a shard");
  references->add_option("--root", s.root, "Dataset root directory");
  references->add_option("--split", s.split, "Subdirectory of the root");
  references->add_flag("--strict", s.strict, "Abort on the first malformed line");
  references->add_option("--jobs", s.jobs, "Worker threads (0 = all cores)");
  add_labeler_flags(references, s);
  references->add_option("--stage", s.stage,
                         "Tile each page into L chunks (1 = whole page)")
      ->capture_default_str();
  references->add_option("--shard", s.shard_file, "Shard JSONL to convert");
  references->add_option("--out", s.out, "Output JSONL")->required();

  auto* evaluate = app.add_subcommand(
      "evaluate", "Score hypotheses against references (CER, word PRF)");
  evaluate->add_option("--ref", s.ref_file, "Reference JSONL")->required();
  evaluate->add_option("--hyp", s.hyp_file, "Hypothesis JSONL")->required();
  evaluate->add_option("--out", s.out, "Report JSON path");
  evaluate->add_option("--csv", s.csv_file, "Per-pair CSV path");
  evaluate->add_option("--separator", s.labeler.separator, "Text-line separator")
      ->capture_default_str();
  evaluate->add_flag("--strip-separator,!--no-strip-separator",
                     s.strip_separator,
                     "Score with the separator replaced by a space")
      ->capture_default_str();
  evaluate->add_option("--average", s.average, "micro or macro")
      ->check(CLI::IsMember({"micro", "macro"}))
      ->capture_default_str();
  evaluate->add_option("--jobs", s.jobs, "Worker threads (0 = all cores)");

  auto* postprocess = app.add_subcommand(
      "postprocess", "Split generated text into lines at the separator");
  postprocess->add_option("--hyp", s.hyp_file, "Hypothesis JSONL")->required();
  postprocess->add_option("--out", s.out, "Output JSONL")->required();
  postprocess->add_option("--separator", s.labeler.separator,
                          "Text-line separator")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, err, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, err, err);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorKind::InvalidConfig, e.what(), out, err);
  }

  try {
    if (build->parsed()) return cmd_build_dataset(s, out, err);
    if (analyze->parsed()) return cmd_analyze(s, out, err);
    if (references->parsed()) {
      if (s.shard_file.empty() && s.root.empty()) {
        throw Error(ErrorKind::InvalidConfig,
                    "references needs --root or --shard");
      }
      return cmd_references(s, out, err);
    }
    if (evaluate->parsed()) return cmd_evaluate(s, out, err);
    if (postprocess->parsed()) return cmd_postprocess(s, out, err);
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), out, err);
  } catch (const std::exception& e) {
    return fail(ErrorKind::IoError, e.what(), out, err);
  }
  return fail(ErrorKind::InvalidConfig, "no subcommand", out, err);
}

}  // namespace chunkforge::cli
