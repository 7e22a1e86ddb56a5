#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "glakepos/error.hpp"
#include "glakepos/instances.hpp"

namespace glakepos {

enum class TemplateFamily { position_only, instance_aware };
enum class Branch { single, dual, multi };

inline std::string_view to_string(TemplateFamily f) {
  return f == TemplateFamily::position_only ? "position_only" : "instance_aware";
}

inline std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::single: return "single";
    case Branch::dual: return "dual";
    case Branch::multi: return "multi";
  }
  return "single";
}

/// Accepts the schema spelling plus the CLI spellings "instance-aware" and "position".
inline TemplateFamily parse_family(std::string_view s) {
  if (s == "instance_aware" || s == "instance-aware") return TemplateFamily::instance_aware;
  if (s == "position_only" || s == "position-only" || s == "position") return TemplateFamily::position_only;
  throw ValidationError("unknown template family '" + std::string(s) + "'");
}

/// Branch is a pure function of the lake count.
inline Branch branch_for_count(std::size_t n) {
  if (n <= 1) return Branch::single;
  return n == 2 ? Branch::dual : Branch::multi;
}

struct QaTemplate {
  std::string question;
  std::string answer;
};

struct TemplateSet {
  TemplateFamily family = TemplateFamily::instance_aware;
  std::string version;
  std::vector<QaTemplate> single;
  std::vector<QaTemplate> dual;
  std::vector<QaTemplate> multi;
  std::vector<std::string> per_lake;

  const std::vector<QaTemplate>& branch(Branch b) const {
    switch (b) {
      case Branch::single: return single;
      case Branch::dual: return dual;
      case Branch::multi: return multi;
    }
    return single;
  }
};

using Rng = std::mt19937_64;

/// Uniform index in [0, n). Rejection sampling on the raw engine output, so
/// the draw sequence is identical across standard libraries.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over an empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<std::size_t>(v % bound);
}

// --- placeholders ----------------------------------------------------------

inline constexpr std::array<std::string_view, 6> kPlaceholders = {
    "position_description", "position_description[0]", "position_description[1]",
    "total_number",         "all_glacial_sentences",   "number_position"};

/// Names inside {...} in order of appearance. Unbalanced braces are an error.
inline std::vector<std::string> placeholders_in(std::string_view text) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find_first_of("{}", pos);
    if (open == std::string_view::npos) break;
    if (text[open] == '}') throw ValidationError("unbalanced '}' in template \"" + std::string(text) + "\"");
    const auto close = text.find('}', open + 1);
    if (close == std::string_view::npos) {
      throw ValidationError("unterminated '{' in template \"" + std::string(text) + "\"");
    }
    names.emplace_back(text.substr(open + 1, close - open - 1));
    pos = close + 1;
  }
  return names;
}

/// Replaces every {name} using lookup(name); leaves nothing unsubstituted.
template <typename Lookup>
std::string substitute(std::string_view text, Lookup&& lookup) {
  std::string out;
  out.reserve(text.size() + 64);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    const auto close = text.find('}', open + 1);
    if (close == std::string_view::npos) throw ValidationError("unterminated '{' in template");
    out.append(text.substr(pos, open - pos));
    out.append(lookup(text.substr(open + 1, close - open - 1)));
    pos = close + 1;
  }
  return out;
}

namespace detail {

inline bool contains(const std::vector<std::string>& names, std::string_view n) {
  return std::find(names.begin(), names.end(), n) != names.end();
}

// Each branch must carry the placeholders that make its answers verifiable.
inline void check_template(std::string_view where, std::string_view text,
                           std::initializer_list<std::string_view> required) {
  const auto names = placeholders_in(text);
  for (const auto& n : names) {
    if (std::find(kPlaceholders.begin(), kPlaceholders.end(), n) == kPlaceholders.end()) {
      throw ValidationError(std::string(where) + ": unknown placeholder {" + n + "}");
    }
  }
  for (auto r : required) {
    if (!contains(names, r)) {
      throw ValidationError(std::string(where) + ": missing required placeholder {" + std::string(r) + "}");
    }
  }
}

inline std::vector<QaTemplate> read_pairs(const nlohmann::json& doc, const char* key) {
  std::vector<QaTemplate> out;
  if (!doc.contains(key)) return out;
  const auto& arr = doc.at(key);
  if (!arr.is_array()) throw ValidationError(std::string("template field '") + key + "' must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& item = arr[i];
    if (!item.is_object() || !item.contains("q") || !item.contains("a") || !item["q"].is_string() ||
        !item["a"].is_string()) {
      throw ValidationError(std::string(key) + "[" + std::to_string(i) + "]: expected {\"q\": string, \"a\": string}");
    }
    out.push_back({item["q"].get<std::string>(), item["a"].get<std::string>()});
  }
  return out;
}

}  // namespace detail

/// Checks the closed placeholder set and the per-branch requirements.
inline void validate(const TemplateSet& set) {
  if (set.single.empty()) throw ValidationError("template set has no single-lake templates");
  const bool aware = set.family == TemplateFamily::instance_aware;
  if (aware && (set.dual.empty() || set.multi.empty() || set.per_lake.empty())) {
    throw ValidationError("instance_aware template set needs non-empty dual, multi and per_lake lists");
  }
  auto label = [&](std::string_view branch, std::size_t i, std::string_view part) {
    return std::string(to_string(set.family)) + "/" + std::string(branch) + "/" + std::to_string(i) +
           " (" + std::string(part) + ")";
  };
  for (std::size_t i = 0; i < set.single.size(); ++i) {
    detail::check_template(label("single", i, "q"), set.single[i].question, {});
    detail::check_template(label("single", i, "a"), set.single[i].answer, {"position_description"});
  }
  for (std::size_t i = 0; i < set.dual.size(); ++i) {
    detail::check_template(label("dual", i, "q"), set.dual[i].question, {});
    detail::check_template(label("dual", i, "a"), set.dual[i].answer,
                           {"position_description[0]", "position_description[1]"});
  }
  for (std::size_t i = 0; i < set.multi.size(); ++i) {
    detail::check_template(label("multi", i, "q"), set.multi[i].question, {});
    detail::check_template(label("multi", i, "a"), set.multi[i].answer,
                           {"total_number", "all_glacial_sentences"});
  }
  for (std::size_t i = 0; i < set.per_lake.size(); ++i) {
    detail::check_template(label("per_lake", i, "sentence"), set.per_lake[i],
                           {"number_position", "position_description"});
  }
  for (const auto& branch : {Branch::single, Branch::dual, Branch::multi}) {
    for (const auto& t : set.branch(branch)) {
      if (!placeholders_in(t.question).empty()) {
        throw ValidationError("question templates take no placeholders: \"" + t.question + "\"");
      }
    }
  }
}

inline TemplateSet parse_templates(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("template file must hold a JSON object");
  TemplateSet set;
  if (!doc.contains("family") || !doc["family"].is_string()) {
    throw ValidationError("template file lacks a string 'family'");
  }
  set.family = parse_family(doc["family"].get<std::string>());
  set.version = doc.value("version", std::string{});
  set.single = detail::read_pairs(doc, "single");
  set.dual = detail::read_pairs(doc, "dual");
  set.multi = detail::read_pairs(doc, "multi");
  if (doc.contains("per_lake")) {
    const auto& arr = doc["per_lake"];
    if (!arr.is_array()) throw ValidationError("template field 'per_lake' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) throw ValidationError("per_lake[" + std::to_string(i) + "] must be a string");
      set.per_lake.push_back(arr[i].get<std::string>());
    }
  }
  validate(set);
  return set;
}

inline TemplateSet load_templates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open template file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    return parse_templates(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// --- rendering -------------------------------------------------------------

/// English ordinal: 1st, 2nd, 3rd, 4th, 11th, 12th, 13th, 21st, 101st.
inline std::string ordinal(int n) {
  if (n < 1) throw std::invalid_argument("ordinal requires n >= 1");
  const int tens = n % 100;
  const char* suffix = "th";
  if (tens < 11 || tens > 13) {
    switch (n % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(n) + suffix;
}

inline std::string template_id(TemplateFamily family, Branch branch, std::size_t index) {
  return std::string(to_string(family)) + "/" + std::string(to_string(branch)) + "/" + std::to_string(index);
}

struct Rendered {
  std::string text;
  std::string template_id;
};

namespace detail {

inline void check_count(const TemplateSet& set, std::size_t n) {
  if (n == 0) throw ValidationError("cannot render a description of zero lakes");
  if (set.family == TemplateFamily::position_only && n != 1) {
    throw ValidationError("position_only templates describe exactly one lake, got " + std::to_string(n));
  }
}

[[noreturn]] inline void unexpected_placeholder(std::string_view name) {
  throw ValidationError("placeholder {" + std::string(name) + "} is not valid in this branch");
}

}  // namespace detail

/// Picks an answer template from the branch matching instances.size() and
/// fills it with the instances' position descriptions.
inline Rendered render_answer(const std::vector<LakeInstance>& instances, const TemplateSet& set, Rng& rng) {
  detail::check_count(set, instances.size());
  const Branch branch = branch_for_count(instances.size());
  const auto& pool = set.branch(branch);
  const std::size_t index = uniform_index(rng, pool.size());
  const std::string& pattern = pool[index].answer;

  std::string text;
  switch (branch) {
    case Branch::single: {
      const auto desc = describe_position(instances[0].position);
      text = substitute(pattern, [&](std::string_view name) -> std::string {
        if (name == "position_description") return desc;
        detail::unexpected_placeholder(name);
      });
      break;
    }
    case Branch::dual: {
      const auto first = describe_position(instances[0].position);
      const auto second = describe_position(instances[1].position);
      text = substitute(pattern, [&](std::string_view name) -> std::string {
        if (name == "position_description[0]") return first;
        if (name == "position_description[1]") return second;
        detail::unexpected_placeholder(name);
      });
      break;
    }
    case Branch::multi: {
      std::string sentences;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& sentence = set.per_lake[uniform_index(rng, set.per_lake.size())];
        const auto nth = ordinal(static_cast<int>(i) + 1);
        const auto desc = describe_position(instances[i].position);
        if (i > 0) sentences += ' ';
        sentences += substitute(sentence, [&](std::string_view name) -> std::string {
          if (name == "number_position") return nth;
          if (name == "position_description") return desc;
          detail::unexpected_placeholder(name);
        });
      }
      const auto total = std::to_string(instances.size());
      text = substitute(pattern, [&](std::string_view name) -> std::string {
        if (name == "total_number") return total;
        if (name == "all_glacial_sentences") return sentences;
        detail::unexpected_placeholder(name);
      });
      break;
    }
  }
  return {std::move(text), template_id(set.family, branch, index)};
}

/// Picks a question from the branch matching the lake count.
inline Rendered render_question(std::size_t count, const TemplateSet& set, Rng& rng) {
  detail::check_count(set, count);
  const Branch branch = branch_for_count(count);
  const auto& pool = set.branch(branch);
  const std::size_t index = uniform_index(rng, pool.size());
  return {pool[index].question, template_id(set.family, branch, index)};
}

}  // namespace glakepos
