#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "glakepos/dataset.hpp"
#include "glakepos/error.hpp"
#include "glakepos/instances.hpp"
#include "glakepos/text_metrics.hpp"

namespace glakepos {

/// Every knob a run can take. Precedence: CLI flag > config file > default.
struct RunConfig {
  AnalysisConfig analysis;
  std::uint64_t seed = 0;
  std::optional<double> split_ratio;
  std::string template_path;
  BleuSmoothing smoothing = BleuSmoothing::none;
  bool corpus_bleu = false;
  bool micro = false;
};

/// Overlays the keys present in a JSON config object; unknown keys are errors.
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "connectivity") {
        cfg.analysis.connectivity = parse_connectivity(value.get<int>());
      } else if (key == "near_fraction") {
        cfg.analysis.near_fraction = value.get<double>();
      } else if (key == "center_mode") {
        cfg.analysis.center_mode = parse_center_mode(value.get<std::string>());
      } else if (key == "min_area") {
        cfg.analysis.min_area = value.get<std::size_t>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "split_ratio") {
        if (value.is_null()) {
          cfg.split_ratio.reset();
        } else {
          cfg.split_ratio = value.get<double>();
        }
      } else if (key == "template_path") {
        cfg.template_path = value.get<std::string>();
      } else if (key == "smooth") {
        const auto s = value.get<std::string>();
        if (s == "none") {
          cfg.smoothing = BleuSmoothing::none;
        } else if (s == "add-one") {
          cfg.smoothing = BleuSmoothing::add_one;
        } else {
          throw ValidationError("config 'smooth' must be none|add-one");
        }
      } else if (key == "corpus_bleu") {
        cfg.corpus_bleu = value.get<bool>();
      } else if (key == "micro") {
        cfg.micro = value.get<bool>();
      } else {
        throw ValidationError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ValidationError(std::string("config value has the wrong type: ") + e.what());
  }
  cfg.analysis.validate();
}

inline void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open config file");
  try {
    apply_config_json(cfg, nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline ojson run_config_to_json(const RunConfig& cfg) {
  ojson j = analysis_config_to_json(cfg.analysis);
  j["seed"] = cfg.seed;
  j["split_ratio"] = cfg.split_ratio ? ojson(*cfg.split_ratio) : ojson(nullptr);
  j["template_path"] = cfg.template_path;
  j["smooth"] = cfg.smoothing == BleuSmoothing::add_one ? "add-one" : "none";
  j["corpus_bleu"] = cfg.corpus_bleu;
  j["micro"] = cfg.micro;
  return j;
}

}  // namespace glakepos
