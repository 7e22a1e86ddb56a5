#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glakepos/error.hpp"
#include "glakepos/hashing.hpp"
#include "glakepos/instances.hpp"
#include "glakepos/parallel.hpp"
#include "glakepos/raster_io.hpp"
#include "glakepos/templates.hpp"

namespace glakepos {

using ojson = nlohmann::ordered_json;

/// One dataset row.
struct QARecord {
  std::string image_id;
  std::string question;
  std::string answer;
  std::vector<LakeInstance> lakes;
  std::string template_id;  // answer template, "<family>/<branch>/<index>"
  TemplateFamily family = TemplateFamily::instance_aware;
  std::uint64_t seed = 0;
  AnalysisConfig config_echo;
};

// --- JSON ------------------------------------------------------------------

inline ojson analysis_config_to_json(const AnalysisConfig& c) {
  ojson j;
  j["connectivity"] = static_cast<int>(c.connectivity);
  j["near_fraction"] = c.near_fraction;
  j["center_mode"] = std::string(to_string(c.center_mode));
  j["min_area"] = c.min_area;
  return j;
}

inline AnalysisConfig analysis_config_from_json(const nlohmann::json& j) {
  AnalysisConfig c;
  if (j.contains("connectivity")) c.connectivity = parse_connectivity(j.at("connectivity").get<int>());
  if (j.contains("near_fraction")) c.near_fraction = j.at("near_fraction").get<double>();
  if (j.contains("center_mode")) c.center_mode = parse_center_mode(j.at("center_mode").get<std::string>());
  if (j.contains("min_area")) c.min_area = j.at("min_area").get<std::size_t>();
  c.validate();
  return c;
}

inline ojson lake_to_json(const LakeInstance& lake) {
  ojson j;
  j["ordinal"] = lake.ordinal_index;
  j["bbox"] = {{"x", lake.bbox.x}, {"y", lake.bbox.y}, {"w", lake.bbox.w}, {"h", lake.bbox.h}};
  j["center"] = {{"cx", lake.center.cx}, {"cy", lake.center.cy}};
  j["quadrant"] = std::string(to_string(lake.position.quadrant));
  j["proximity"] = std::string(to_string(lake.position.proximity));
  j["area"] = lake.area;
  return j;
}

inline LakeInstance lake_from_json(const nlohmann::json& j) {
  LakeInstance lake;
  lake.ordinal_index = j.at("ordinal").get<int>();
  const auto& b = j.at("bbox");
  lake.bbox = {b.at("x").get<std::size_t>(), b.at("y").get<std::size_t>(), b.at("w").get<std::size_t>(),
               b.at("h").get<std::size_t>()};
  const auto& c = j.at("center");
  lake.center = {c.at("cx").get<double>(), c.at("cy").get<double>()};
  lake.position = {parse_quadrant(j.at("quadrant").get<std::string>()),
                   parse_proximity(j.at("proximity").get<std::string>())};
  lake.area = j.at("area").get<std::size_t>();
  return lake;
}

inline ojson record_to_json(const QARecord& r) {
  ojson j;
  j["image_id"] = r.image_id;
  j["question"] = r.question;
  j["answer"] = r.answer;
  j["lakes"] = ojson::array();
  for (const auto& lake : r.lakes) j["lakes"].push_back(lake_to_json(lake));
  j["template_id"] = r.template_id;
  j["family"] = std::string(to_string(r.family));
  j["seed"] = r.seed;
  j["config_echo"] = analysis_config_to_json(r.config_echo);
  return j;
}

inline QARecord record_from_json(const nlohmann::json& j) {
  try {
    QARecord r;
    r.image_id = j.at("image_id").get<std::string>();
    r.question = j.value("question", std::string{});
    r.answer = j.at("answer").get<std::string>();
    for (const auto& lake : j.value("lakes", nlohmann::json::array())) r.lakes.push_back(lake_from_json(lake));
    r.template_id = j.value("template_id", std::string{});
    if (j.contains("family")) r.family = parse_family(j.at("family").get<std::string>());
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("config_echo")) r.config_echo = analysis_config_from_json(j.at("config_echo"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed dataset record: ") + e.what());
  }
}

/// Reads a JSON-lines file; blank lines are skipped.
inline std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::vector<nlohmann::json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

// --- generation ------------------------------------------------------------

struct GenerationConfig {
  AnalysisConfig analysis;
  int binarize_threshold = 0;
  std::optional<double> split_ratio;  // train fraction, e.g. 0.8
  std::size_t jobs = 1;
  std::string template_digest;  // sha256 of the template file, echoed in the manifest
};

struct GenerationResult {
  std::vector<QARecord> records;  // sorted by image_id
  ojson manifest;
};

/// Builds the record for one image's lakes, or nullopt when the template
/// family cannot describe them. The record's RNG is seeded from
/// (global_seed, image_id) alone.
inline std::optional<QARecord> generate_record(const std::string& image_id, std::vector<LakeInstance> lakes,
                                               const TemplateSet& templates, const AnalysisConfig& analysis,
                                               std::uint64_t global_seed) {
  if (lakes.empty()) return std::nullopt;
  if (templates.family == TemplateFamily::position_only && lakes.size() != 1) return std::nullopt;
  QARecord r;
  r.image_id = image_id;
  r.seed = stable_seed(global_seed, r.image_id);
  r.family = templates.family;
  r.config_echo = analysis;
  Rng rng(r.seed);
  r.question = render_question(lakes.size(), templates, rng).text;
  auto answer = render_answer(lakes, templates, rng);
  r.answer = std::move(answer.text);
  r.template_id = std::move(answer.template_id);
  r.lakes = std::move(lakes);
  return r;
}

/// One record per mask with at least one lake, sorted by image_id. Output is
/// identical for any worker count or directory enumeration order.
inline GenerationResult generate_dataset(const std::filesystem::path& mask_dir, const TemplateSet& templates,
                                         const GenerationConfig& config, std::uint64_t global_seed) {
  config.analysis.validate();
  if (config.split_ratio && !(*config.split_ratio > 0.0 && *config.split_ratio < 1.0)) {
    throw ValidationError("split ratio must lie in (0,1)");
  }
  const auto files = list_mask_files(mask_dir);
  if (files.empty()) throw ValidationError(mask_dir.string() + ": no PNG/PGM masks found");

  struct Slot {
    std::string image_id;
    std::size_t lake_count = 0;
    std::optional<QARecord> record;
  };
  std::vector<Slot> slots(files.size());
  parallel_for(files.size(), config.jobs, [&](std::size_t i) {
    const auto mask = load_mask(files[i], config.binarize_threshold);
    slots[i].image_id = mask.image_id();
    auto lakes = label_components(mask, config.analysis);
    slots[i].lake_count = lakes.size();
    slots[i].record = generate_record(mask.image_id(), std::move(lakes), templates, config.analysis, global_seed);
  });

  std::vector<std::string> ids;
  for (const auto& s : slots) ids.push_back(s.image_id);
  std::sort(ids.begin(), ids.end());
  if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
    throw ValidationError("duplicate image id '" + *dup + "' in " + mask_dir.string());
  }

  GenerationResult result;
  std::size_t skipped_empty = 0, skipped_family = 0;
  std::map<std::string, std::size_t> branch_counts{{"single", 0}, {"dual", 0}, {"multi", 0}};
  for (auto& s : slots) {
    if (s.lake_count == 0) {
      ++skipped_empty;
    } else if (!s.record) {
      ++skipped_family;
    } else {
      ++branch_counts[std::string(to_string(branch_for_count(s.record->lakes.size())))];
      result.records.push_back(std::move(*s.record));
    }
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const QARecord& a, const QARecord& b) { return a.image_id < b.image_id; });

  auto& m = result.manifest;
  m["tool"] = "glakepos";
  m["family"] = std::string(to_string(templates.family));
  m["template_version"] = templates.version;
  m["template_digest"] = config.template_digest.empty() ? ojson(nullptr) : ojson("sha256:" + config.template_digest);
  m["global_seed"] = global_seed;
  m["config"] = analysis_config_to_json(config.analysis);
  m["config"]["binarize_threshold"] = config.binarize_threshold;
  m["masks_total"] = files.size();
  m["records"] = result.records.size();
  m["skipped_no_instances"] = skipped_empty;
  m["skipped_count_mismatch"] = skipped_family;
  m["branch_counts"] = {{"single", branch_counts["single"]}, {"dual", branch_counts["dual"]},
                        {"multi", branch_counts["multi"]}};
  if (config.split_ratio) {
    ojson train = ojson::array(), test = ojson::array();
    for (const auto& r : result.records) {
      (assign_split(r.image_id, *config.split_ratio) == SplitPart::train ? train : test).push_back(r.image_id);
    }
    m["split"] = {{"ratio", *config.split_ratio}, {"train_count", train.size()}, {"test_count", test.size()},
                  {"train", train}, {"test", test}};
  }
  return result;
}

/// "<dir>/<stem>.manifest.json" next to the dataset file.
inline std::filesystem::path manifest_path_for(const std::filesystem::path& dataset_path) {
  auto p = dataset_path;
  p.replace_extension(".manifest.json");
  return p;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << content;
  if (!out) throw IoError(path.string() + ": write failed");
}

inline void write_dataset(const GenerationResult& result, const std::filesystem::path& out_path) {
  std::string body;
  for (const auto& r : result.records) {
    body += record_to_json(r).dump();
    body += '\n';
  }
  write_text_file(out_path, body);
  write_text_file(manifest_path_for(out_path), result.manifest.dump(2) + "\n");
}

}  // namespace glakepos
