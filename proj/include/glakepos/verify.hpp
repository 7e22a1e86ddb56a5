#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glakepos/claims.hpp"
#include "glakepos/dataset.hpp"
#include "glakepos/parallel.hpp"
#include "glakepos/raster_io.hpp"

namespace glakepos {

/// Free-text answer to check against its mask.
struct AnswerRow {
  std::string image_id;
  std::string text;
  std::optional<AnalysisConfig> config;  // from the record's config_echo, if any
};

/// Accepts dataset records ({image_id, answer, config_echo, ...}) and plain
/// model outputs ({image_id, text}).
inline AnswerRow answer_row_from_json(const nlohmann::json& j) {
  AnswerRow row;
  try {
    row.image_id = j.at("image_id").get<std::string>();
    if (j.contains("answer")) {
      row.text = j.at("answer").get<std::string>();
    } else {
      row.text = j.at("text").get<std::string>();
    }
    if (j.contains("config_echo")) row.config = analysis_config_from_json(j.at("config_echo"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("answer row needs image_id and answer|text: ") + e.what());
  }
  return row;
}

struct RecordVerification {
  VerificationReport report;
  double parse_coverage = 0.0;
  bool mask_missing = false;
};

/// Per-record rates over records whose mask was found. A record counts
/// towards quadrant (proximity) accuracy when every lake's quadrant
/// (proximity) matched.
struct BatchReport {
  std::vector<RecordVerification> records;
  std::size_t evaluated = 0;
  std::size_t missing_masks = 0;
  double exact_match_rate = 0.0;
  double count_accuracy = 0.0;
  double quadrant_accuracy = 0.0;
  double proximity_accuracy = 0.0;
};

inline BatchReport batch_verify(const std::vector<AnswerRow>& rows, const std::filesystem::path& mask_dir,
                                const AnalysisConfig& fallback, std::size_t jobs = 1,
                                int binarize_threshold = 0) {
  if (!std::filesystem::is_directory(mask_dir)) throw IoError(mask_dir.string() + ": not a directory");
  BatchReport out;
  out.records.resize(rows.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const auto& row = rows[i];
    auto& rec = out.records[i];
    rec.report.image_id = row.image_id;
    const auto path = find_mask_file(mask_dir, row.image_id);
    if (path.empty()) {
      rec.mask_missing = true;
      rec.report.notes.push_back("mask not found for image id");
      return;
    }
    const auto truth = label_components(load_mask(path, binarize_threshold), row.config.value_or(fallback));
    const auto claims = parse_answer(row.text);
    rec.parse_coverage = claims.parse_coverage();
    rec.report = verify(claims, truth, row.image_id);
  });

  std::size_t exact = 0, count = 0, quadrant = 0, proximity = 0;
  for (const auto& rec : out.records) {
    if (rec.mask_missing) {
      ++out.missing_masks;
      continue;
    }
    ++out.evaluated;
    const auto& r = rec.report;
    exact += r.exact_match ? 1 : 0;
    count += r.count_match ? 1 : 0;
    bool q = true, p = true;
    for (const auto& lake : r.per_lake) {
      q = q && lake.quadrant_match;
      p = p && lake.proximity_match;
    }
    quadrant += q ? 1 : 0;
    proximity += p ? 1 : 0;
  }
  if (out.evaluated > 0) {
    const double n = static_cast<double>(out.evaluated);
    out.exact_match_rate = static_cast<double>(exact) / n;
    out.count_accuracy = static_cast<double>(count) / n;
    out.quadrant_accuracy = static_cast<double>(quadrant) / n;
    out.proximity_accuracy = static_cast<double>(proximity) / n;
  }
  return out;
}

inline ojson verification_to_json(const RecordVerification& rec) {
  ojson j;
  j["image_id"] = rec.report.image_id;
  j["mask_missing"] = rec.mask_missing;
  j["count_match"] = rec.report.count_match;
  j["exact_match"] = rec.report.exact_match;
  j["parse_coverage"] = rec.parse_coverage;
  j["per_lake"] = ojson::array();
  for (const auto& lake : rec.report.per_lake) {
    j["per_lake"].push_back(
        {{"ordinal", lake.ordinal}, {"quadrant_match", lake.quadrant_match}, {"proximity_match", lake.proximity_match}});
  }
  j["notes"] = rec.report.notes;
  return j;
}

inline ojson batch_summary_to_json(const BatchReport& b) {
  ojson j;
  j["diagnostic"] =
      "positional-consistency rates defined by this toolkit (rule-based claim parsing vs mask-derived truth)";
  j["records_total"] = b.records.size();
  j["records_evaluated"] = b.evaluated;
  j["missing_masks"] = b.missing_masks;
  j["exact_match_rate"] = b.exact_match_rate;
  j["count_accuracy"] = b.count_accuracy;
  j["quadrant_accuracy"] = b.quadrant_accuracy;
  j["proximity_accuracy"] = b.proximity_accuracy;
  return j;
}

}  // namespace glakepos
