#pragma once

// Command-line front end. Kept in a header so tests can drive dispatch()
// without spawning processes.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "glakepos/config.hpp"
#include "glakepos/dataset.hpp"
#include "glakepos/error.hpp"
#include "glakepos/hashing.hpp"
#include "glakepos/raster_io.hpp"
#include "glakepos/seg_metrics.hpp"
#include "glakepos/synth.hpp"
#include "glakepos/templates.hpp"
#include "glakepos/text_metrics.hpp"
#include "glakepos/verify.hpp"

#ifndef GLAKEPOS_VERSION
#define GLAKEPOS_VERSION "0.1.0"
#endif

#ifndef GLAKEPOS_TEMPLATE_DIR
#define GLAKEPOS_TEMPLATE_DIR ""
#endif

namespace glakepos::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2 };

inline void log(const std::string& msg) { std::cerr << "glakepos: " << msg << '\n'; }

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// "A..B" or "A" -> [A, B]
inline std::pair<std::size_t, std::size_t> parse_range(const std::string& s, const char* what) {
  try {
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
      const auto v = std::stoul(s);
      return {v, v};
    }
    return {std::stoul(s.substr(0, dots)), std::stoul(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ValidationError(std::string("--") + what + " expects A..B, got '" + s + "'");
  }
}

// "WxH" -> (W, H)
inline std::pair<std::size_t, std::size_t> parse_size(const std::string& s) {
  const auto x = s.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    return {std::stoul(s.substr(0, x)), std::stoul(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw ValidationError("--size expects WxH, got '" + s + "'");
  }
}

/// Flags shared by every subcommand that analyses masks.
struct AnalysisFlags {
  std::string config_path;
  int connectivity = 8;
  double near_fraction = 0.25;
  std::string center_mode = "bbox";
  std::size_t min_area = 1;
  int threshold = 0;
  std::size_t jobs = 1;
  CLI::Option* connectivity_opt = nullptr;
  CLI::Option* near_opt = nullptr;
  CLI::Option* center_opt = nullptr;
  CLI::Option* min_area_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file (flags override it)");
    connectivity_opt = app->add_option("--connectivity", connectivity, "4 or 8")->check(CLI::IsMember({4, 8}));
    near_opt = app->add_option("--near-frac", near_fraction, "near-center radius as a fraction of min(W,H)");
    center_opt = app->add_option("--center-mode", center_mode, "bbox|mass")->check(CLI::IsMember({"bbox", "mass"}));
    min_area_opt = app->add_option("--min-area", min_area, "drop components smaller than this");
    app->add_option("--threshold", threshold, "binarize: pixel > threshold is lake")->check(CLI::Range(0, 255));
    app->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }

  // defaults < config file < explicit flags
  RunConfig resolve(RunConfig cfg = {}) const {
    if (!config_path.empty()) load_config_file(cfg, config_path);
    if (connectivity_opt->count()) cfg.analysis.connectivity = parse_connectivity(connectivity);
    if (near_opt->count()) cfg.analysis.near_fraction = near_fraction;
    if (center_opt->count()) cfg.analysis.center_mode = parse_center_mode(center_mode);
    if (min_area_opt->count()) cfg.analysis.min_area = min_area;
    cfg.analysis.validate();
    return cfg;
  }
};

// --- subcommands -----------------------------------------------------------

struct GenerateArgs {
  AnalysisFlags common;
  std::string masks, templates, family, out;
  std::uint64_t seed = 0;
  double split = 0.8;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* split_opt = nullptr;
  CLI::Option* templates_opt = nullptr;
};

inline int run_generate(const GenerateArgs& a) {
  RunConfig cfg = a.common.resolve();
  if (a.seed_opt->count()) cfg.seed = a.seed;
  if (a.split_opt->count()) cfg.split_ratio = a.split;
  if (a.templates_opt->count()) cfg.template_path = a.templates;
  if (cfg.template_path.empty()) throw ValidationError("generate needs --templates (or template_path in --config)");

  const auto templates = load_templates(cfg.template_path);
  if (!a.family.empty() && parse_family(a.family) != templates.family) {
    throw ValidationError("--family " + a.family + " does not match template file family " +
                          std::string(to_string(templates.family)));
  }
  GenerationConfig gen;
  gen.analysis = cfg.analysis;
  gen.binarize_threshold = a.common.threshold;
  gen.split_ratio = cfg.split_ratio;
  gen.jobs = a.common.jobs;
  gen.template_digest = file_sha256(cfg.template_path);
  auto result = generate_dataset(a.masks, templates, gen, cfg.seed);
  result.manifest["run_config"] = run_config_to_json(cfg);
  write_dataset(result, a.out);
  log("wrote " + std::to_string(result.records.size()) + " records to " + a.out + " (manifest " +
      manifest_path_for(a.out).string() + ")");
  return kOk;
}

struct SynthArgs {
  std::size_t count = 1;
  std::string size = "64x64", lakes = "1..1", blob = "8..8", out, format = "png";
  std::uint64_t seed = 0;
  bool irregular = false;
  std::size_t jobs = 1;
};

inline int run_synth(const SynthArgs& a) {
  CorpusSpec spec;
  spec.count = a.count;
  std::tie(spec.width, spec.height) = parse_size(a.size);
  std::tie(spec.lakes_min, spec.lakes_max) = parse_range(a.lakes, "lakes");
  std::tie(spec.blob_min, spec.blob_max) = parse_range(a.blob, "blob");
  spec.seed = a.seed;
  spec.irregular = a.irregular;
  spec.extension = "." + a.format;
  const auto manifest = generate_corpus(spec, a.out, a.jobs);
  log("wrote " + std::to_string(manifest.images.size()) + " masks to " + a.out);
  return kOk;
}

struct SegArgs {
  AnalysisFlags common;
  std::string pred, gt, out;
  bool micro = false;
};

inline int run_evaluate_seg(const SegArgs& a) {
  RunConfig cfg = a.common.resolve();
  if (a.micro) cfg.micro = true;
  std::map<std::string, fs::path> pred, gt;
  for (const auto& p : list_mask_files(a.pred)) pred[p.stem().string()] = p;
  for (const auto& p : list_mask_files(a.gt)) gt[p.stem().string()] = p;
  std::vector<std::string> errors;
  for (const auto& [id, _] : pred)
    if (!gt.count(id)) errors.push_back(id + ": prediction has no ground-truth mask");
  for (const auto& [id, _] : gt)
    if (!pred.count(id)) errors.push_back(id + ": ground-truth mask has no prediction");
  if (pred.empty() && gt.empty()) errors.push_back("no masks found in --pred or --gt");

  std::vector<std::string> ids;
  for (const auto& [id, _] : pred)
    if (gt.count(id)) ids.push_back(id);
  std::vector<SegScore> scores(ids.size());
  std::vector<std::string> pair_errors(ids.size());
  parallel_for(ids.size(), a.common.jobs, [&](std::size_t i) {
    try {
      scores[i] = score_pair(load_mask(pred[ids[i]], a.common.threshold), load_mask(gt[ids[i]], a.common.threshold));
    } catch (const ValidationError& e) {
      pair_errors[i] = ids[i] + ": " + e.what();
    }
  });
  for (const auto& e : pair_errors)
    if (!e.empty()) errors.push_back(e);
  if (!errors.empty()) {
    for (const auto& e : errors) log(e);
    return kValidation;
  }

  std::ostringstream csv;
  csv << "# glakepos evaluate-seg " << GLAKEPOS_VERSION << "\n";
  csv << "# config: " << run_config_to_json(cfg).dump() << "\n";
  csv << "image_id,iou,dice,tp,fp,fn\n";
  std::vector<std::string> empty_ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& s = scores[i];
    csv << ids[i] << ',' << fmt_double(s.iou) << ',' << fmt_double(s.dice) << ',' << s.tp << ',' << s.fp << ','
        << s.fn << "\n";
    if (s.both_empty) empty_ids.push_back(ids[i]);
  }
  const auto agg = aggregate(scores);
  csv << "mIoU," << fmt_double(agg.mean_iou) << "\n";
  csv << "mDice," << fmt_double(agg.mean_dice) << "\n";
  std::string joined;
  for (const auto& id : empty_ids) joined += (joined.empty() ? "" : ";") + id;
  csv << "both_empty," << empty_ids.size() << ',' << joined << "\n";
  if (cfg.micro) {
    const auto micro = aggregate_micro(scores);
    csv << "micro_IoU," << fmt_double(micro.iou) << "\n";
    csv << "micro_Dice," << fmt_double(micro.dice) << "\n";
  }
  write_text_file(a.out, csv.str());
  log("scored " + std::to_string(ids.size()) + " pairs; mIoU " + fmt_double(agg.mean_iou));
  return kOk;
}

struct TextArgs {
  std::string config_path, pred, ref, out, smooth;
  bool corpus_bleu = false;
  CLI::Option* smooth_opt = nullptr;
};

inline std::map<std::string, std::string> read_text_rows(const fs::path& path) {
  std::map<std::string, std::string> rows;
  for (const auto& j : read_jsonl(path)) {
    try {
      const auto id = j.at("image_id").get<std::string>();
      if (!rows.emplace(id, j.at("text").get<std::string>()).second) {
        throw ValidationError(path.string() + ": duplicate image_id '" + id + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ": rows need {image_id, text}: " + e.what());
    }
  }
  return rows;
}

inline int run_evaluate_text(const TextArgs& a) {
  RunConfig cfg;
  if (!a.config_path.empty()) load_config_file(cfg, a.config_path);
  if (a.smooth_opt->count()) cfg.smoothing = a.smooth == "add-one" ? BleuSmoothing::add_one : BleuSmoothing::none;
  if (a.corpus_bleu) cfg.corpus_bleu = true;

  const auto pred = read_text_rows(a.pred);
  const auto ref = read_text_rows(a.ref);
  std::vector<std::string> errors;
  for (const auto& [id, _] : pred)
    if (!ref.count(id)) errors.push_back(id + ": prediction has no reference");
  for (const auto& [id, _] : ref)
    if (!pred.count(id)) errors.push_back(id + ": reference has no prediction");
  if (!errors.empty()) {
    for (const auto& e : errors) log(e);
    return kValidation;
  }
  std::vector<std::string> ids;
  std::vector<std::pair<TokenSequence, TokenSequence>> pairs;
  for (const auto& [id, text] : pred) {
    ids.push_back(id);
    pairs.emplace_back(tokenize(text), tokenize(ref.at(id)));
  }
  const auto score = evaluate_corpus(pairs, {cfg.smoothing, cfg.corpus_bleu});

  ojson report;
  report["tool"] = "glakepos evaluate-text";
  report["protocol"] = {
      {"rouge", "ROUGE-L F1 (beta = 1), LCS over tokens"},
      {"meteor", "meteor_lite: exact unigram matches only, no stemming or synonyms; F_mean = 10PR/(R+9P), "
                 "penalty = 0.5 (chunks/m)^3"},
      {"bleu", "sentence BLEU-4, uniform weights, clipped counts, macro-averaged"},
      {"smoothing", cfg.smoothing == BleuSmoothing::add_one ? "add-one (n >= 2)" : "none"},
      {"corpus_bleu", cfg.corpus_bleu},
      {"tokenizer", "lowercase; strip . , : ; ! ? \" ( ); split on whitespace"}};
  report["config"] = run_config_to_json(cfg);
  report["aggregate"] = {{"pairs", ids.size()}, {"bleu4", score.bleu4}, {"rouge_l", score.rouge_l},
                         {"meteor", score.meteor}};
  if (score.corpus_bleu4) report["aggregate"]["corpus_bleu4"] = *score.corpus_bleu4;
  report["pairs"] = ojson::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& p = score.pairs[i];
    ojson matches = ojson::array(), totals = ojson::array();
    for (int n = 0; n < 4; ++n) {
      matches.push_back(p.bleu.matches[n]);
      totals.push_back(p.bleu.totals[n]);
    }
    report["pairs"].push_back(
        {{"image_id", ids[i]},
         {"bleu4", p.bleu4},
         {"rouge_l", p.rouge_l},
         {"meteor", p.meteor},
         {"detail",
          {{"ngram_matches", matches},
           {"ngram_totals", totals},
           {"brevity_penalty", p.bleu.brevity_penalty},
           {"lcs", p.lcs},
           {"unigram_matches", p.meteor_detail.matches},
           {"chunks", p.meteor_detail.chunks},
           {"alignment", p.meteor_detail.mode == AlignmentMode::exhaustive ? "exhaustive" : "greedy"}}}});
  }
  write_text_file(a.out, report.dump(2) + "\n");
  log("scored " + std::to_string(ids.size()) + " pairs");
  return kOk;
}

struct VerifyArgs {
  AnalysisFlags common;
  std::string answers, masks, out;
};

inline fs::path per_record_path_for(const fs::path& report) {
  auto p = report;
  p.replace_extension(".records.jsonl");
  return p;
}

inline int run_verify(const VerifyArgs& a) {
  const RunConfig cfg = a.common.resolve();
  std::vector<AnswerRow> rows;
  for (const auto& j : read_jsonl(a.answers)) rows.push_back(answer_row_from_json(j));
  const auto batch = batch_verify(rows, a.masks, cfg.analysis, a.common.jobs, a.common.threshold);

  std::string lines;
  for (const auto& rec : batch.records) lines += verification_to_json(rec).dump() + "\n";
  write_text_file(per_record_path_for(a.out), lines);
  auto summary = batch_summary_to_json(batch);
  summary["config"] = run_config_to_json(cfg);
  summary["per_record_file"] = per_record_path_for(a.out).filename().string();
  write_text_file(a.out, summary.dump(2) + "\n");
  log("verified " + std::to_string(batch.evaluated) + " records; exact-match rate " +
      fmt_double(batch.exact_match_rate) + (batch.missing_masks ? "; " + std::to_string(batch.missing_masks) +
                                                                      " missing masks"
                                                                : ""));
  return kOk;
}

struct StatsArgs {
  std::string dataset, out;
};

/// Lake-count histogram, quadrant distribution and near/far split of a dataset.
inline ojson dataset_stats(const std::vector<QARecord>& records) {
  std::map<std::size_t, std::size_t> hist;
  std::map<std::string, std::size_t> quadrants{
      {"top_left", 0}, {"top_right", 0}, {"bottom_left", 0}, {"bottom_right", 0}, {"center", 0}};
  std::size_t near = 0, far = 0;
  for (const auto& r : records) {
    ++hist[r.lakes.size()];
    for (const auto& l : r.lakes) {
      ++quadrants[std::string(to_string(l.position.quadrant))];
      (l.position.proximity == Proximity::near ? near : far) += 1;
    }
  }
  ojson j;
  j["records"] = records.size();
  j["lake_count_histogram"] = ojson::object();
  for (const auto& [n, c] : hist) j["lake_count_histogram"][std::to_string(n)] = c;
  j["quadrants"] = ojson::object();
  for (const auto& [q, c] : quadrants) j["quadrants"][q] = c;
  j["lakes"] = near + far;
  j["near"] = near;
  j["far"] = far;
  j["near_ratio"] = near + far ? static_cast<double>(near) / static_cast<double>(near + far) : 0.0;
  return j;
}

inline int run_stats(const StatsArgs& a) {
  std::vector<QARecord> records;
  for (const auto& j : read_jsonl(a.dataset)) records.push_back(record_from_json(j));
  const auto stats = dataset_stats(records).dump(2);
  std::cout << stats << "\n";
  if (!a.out.empty()) write_text_file(a.out, stats + "\n");
  return kOk;
}

inline void print_version() {
  std::cout << "glakepos " << GLAKEPOS_VERSION << " (C++" << __cplusplus / 100 % 100 << ", " << __DATE__ << ")\n";
  const fs::path dir = GLAKEPOS_TEMPLATE_DIR;
  if (dir.empty() || !fs::is_directory(dir)) return;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) std::cout << "template " << f.filename().string() << " sha256:" << file_sha256(f) << "\n";
}

/// Parses argv and runs one subcommand. Exit status: 0 success,
/// 1 validation or usage error, 2 I/O error.
inline int dispatch(int argc, const char* const* argv) {
  CLI::App app{"glakepos: glacial-lake positional QA dataset pipeline and evaluation toolkit", "glakepos"};
  app.require_subcommand(0, 1);
  bool show_version = false;
  app.add_flag("--version", show_version, "print version and template digests");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "build a QA dataset from a directory of masks");
  g->add_option("--masks", gen.masks, "mask directory")->required();
  gen.templates_opt = g->add_option("--templates", gen.templates, "template JSON file");
  g->add_option("--family", gen.family, "instance-aware|position (must match the template file)")
      ->check(CLI::IsMember({"instance-aware", "instance_aware", "position", "position_only"}));
  g->add_option("--out", gen.out, "dataset JSON-lines output")->required();
  gen.seed_opt = g->add_option("--seed", gen.seed, "global seed");
  gen.split_opt = g->add_option("--split", gen.split, "train fraction for hash-based train/test split");
  gen.common.attach(g);

  SynthArgs syn;
  auto* s = app.add_subcommand("synth", "write a seeded synthetic mask corpus");
  s->add_option("--count", syn.count)->required()->check(CLI::PositiveNumber);
  s->add_option("--size", syn.size, "WxH")->required();
  s->add_option("--lakes", syn.lakes, "A..B lakes per image")->required();
  s->add_option("--blob", syn.blob, "A..B blob side length")->required();
  s->add_option("--seed", syn.seed);
  s->add_option("--out", syn.out, "output directory")->required();
  s->add_flag("--irregular", syn.irregular, "random polyomino blobs");
  s->add_option("--format", syn.format, "png|pgm")->check(CLI::IsMember({"png", "pgm"}));
  s->add_option("--jobs", syn.jobs)->check(CLI::PositiveNumber);

  SegArgs seg;
  auto* e = app.add_subcommand("evaluate-seg", "IoU/Dice of predicted vs ground-truth masks");
  e->add_option("--pred", seg.pred)->required();
  e->add_option("--gt", seg.gt)->required();
  e->add_option("--out", seg.out, "CSV report")->required();
  e->add_flag("--micro", seg.micro, "also report pooled-pixel IoU/Dice");
  seg.common.attach(e);

  TextArgs txt;
  auto* t = app.add_subcommand("evaluate-text", "BLEU-4, ROUGE-L and meteor_lite of generated text");
  t->add_option("--pred", txt.pred)->required();
  t->add_option("--ref", txt.ref)->required();
  t->add_option("--out", txt.out, "JSON report")->required();
  txt.smooth_opt = t->add_option("--smooth", txt.smooth, "none|add-one")->check(CLI::IsMember({"none", "add-one"}));
  t->add_flag("--corpus-bleu", txt.corpus_bleu, "also report pooled corpus BLEU-4");
  t->add_option("--config", txt.config_path);

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "check positional claims in answers against masks");
  v->add_option("--answers", ver.answers, "JSON-lines dataset or {image_id, text} rows")->required();
  v->add_option("--masks", ver.masks)->required();
  v->add_option("--out", ver.out, "aggregate JSON report")->required();
  ver.common.attach(v);

  StatsArgs st;
  auto* sub_stats = app.add_subcommand("stats", "summarise a generated dataset");
  sub_stats->add_option("--dataset", st.dataset)->required();
  sub_stats->add_option("--out", st.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (show_version) {
      print_version();
      return kOk;
    }
    if (g->parsed()) return run_generate(gen);
    if (s->parsed()) return run_synth(syn);
    if (e->parsed()) return run_evaluate_seg(seg);
    if (t->parsed()) return run_evaluate_text(txt);
    if (v->parsed()) return run_verify(ver);
    if (sub_stats->parsed()) return run_stats(st);
    std::cerr << app.help();
    return kValidation;
  } catch (const IoError& err) {
    log(std::string("I/O error: ") + err.what());
    return kIo;
  } catch (const fs::filesystem_error& err) {
    log(std::string("I/O error: ") + err.what());
    return kIo;
  } catch (const ValidationError& err) {
    log(std::string("error: ") + err.what());
    return kValidation;
  } catch (const nlohmann::json::exception& err) {
    log(std::string("error: ") + err.what());
    return kValidation;
  }
}

}  // namespace glakepos::cli
