#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "glakepos/error.hpp"
#include "glakepos/instances.hpp"

namespace glakepos {

/// One positional assertion recovered from text. Any field may be missing.
struct Claim {
  std::optional<int> ordinal;
  std::optional<Quadrant> quadrant;
  std::optional<Proximity> proximity;
  friend bool operator==(const Claim&, const Claim&) = default;
};

/// Structured claims parsed from an answer.
///
/// Claims with ordinals come first, ascending; ordinal-free claims follow in
/// text order. Duplicate ordinals and non-positive counts are rejected.
class ClaimSet {
 public:
  ClaimSet() = default;

  static ClaimSet make(std::optional<int> stated_count, std::vector<Claim> claims, double parse_coverage) {
    if (stated_count && *stated_count < 1) {
      throw ValidationError("stated count must be >= 1, got " + std::to_string(*stated_count));
    }
    std::set<int> seen;
    for (const auto& c : claims) {
      if (c.ordinal && !seen.insert(*c.ordinal).second) {
        throw ValidationError("duplicate ordinal " + std::to_string(*c.ordinal) + " in claim set");
      }
    }
    std::stable_sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) {
      if (a.ordinal && b.ordinal) return *a.ordinal < *b.ordinal;
      return a.ordinal.has_value() && !b.ordinal.has_value();
    });
    ClaimSet set;
    set.stated_count_ = stated_count;
    set.claims_ = std::move(claims);
    set.parse_coverage_ = parse_coverage;
    return set;
  }

  const std::optional<int>& stated_count() const noexcept { return stated_count_; }
  const std::vector<Claim>& claims() const noexcept { return claims_; }
  double parse_coverage() const noexcept { return parse_coverage_; }
  bool empty() const noexcept { return !stated_count_ && claims_.empty(); }

  friend bool operator==(const ClaimSet&, const ClaimSet&) = default;

 private:
  std::optional<int> stated_count_;
  std::vector<Claim> claims_;
  double parse_coverage_ = 0.0;
};

namespace detail {

inline std::vector<std::string> claim_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) {
      cur.push_back(static_cast<char>(std::tolower(ch)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

inline constexpr std::array<std::string_view, 21> kNumberWords = {
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen", "twenty"};

inline constexpr std::array<std::string_view, 11> kOrdinalWords = {
    "", "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth"};

inline bool all_digits(std::string_view s) {
  return !s.empty() && s.size() <= 9 && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

inline std::optional<int> as_cardinal(std::string_view tok) {
  if (all_digits(tok)) return std::stoi(std::string(tok));
  for (std::size_t i = 0; i < kNumberWords.size(); ++i) {
    if (tok == kNumberWords[i]) return static_cast<int>(i);
  }
  return std::nullopt;
}

inline std::optional<int> as_ordinal(std::string_view tok) {
  for (std::size_t i = 1; i < kOrdinalWords.size(); ++i) {
    if (tok == kOrdinalWords[i]) return static_cast<int>(i);
  }
  if (tok.size() < 3) return std::nullopt;
  const auto suffix = tok.substr(tok.size() - 2);
  const auto digits = tok.substr(0, tok.size() - 2);
  if ((suffix == "st" || suffix == "nd" || suffix == "rd" || suffix == "th") && all_digits(digits)) {
    const int n = std::stoi(std::string(digits));
    if (n >= 1) return n;
  }
  return std::nullopt;
}

inline bool is_center_word(std::string_view t) { return t == "center" || t == "centre"; }

// Matches a literal token sequence at position i.
inline bool match_at(const std::vector<std::string>& toks, std::size_t i,
                     std::initializer_list<std::string_view> words) {
  if (i + words.size() > toks.size()) return false;
  std::size_t k = i;
  for (auto w : words) {
    if (w == "center") {
      if (!is_center_word(toks[k])) return false;
    } else if (toks[k] != w) {
      return false;
    }
    ++k;
  }
  return true;
}

}  // namespace detail

/// Rule-based extraction over the closed positional vocabulary.
///
/// Recovers a count (numeral or one..twenty within six tokens of "lake(s)",
/// or an implied 1 for a singular "glacial lake" with no plural anywhere),
/// ordinals (1st.., first..tenth), quadrants (top/bottom left/right, center)
/// and proximity ("near the center", "far from the center"). Matching is
/// case-insensitive and ignores punctuation and hyphens. A center claim
/// carries proximity near, which the position invariant forces.
inline ClaimSet parse_answer(std::string_view text) {
  const auto toks = detail::claim_tokens(text);

  std::vector<std::size_t> lake_at;
  bool plural = false;
  bool singular_glacial = false;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i] == "lake" || toks[i] == "lakes") lake_at.push_back(i);
    if (toks[i] == "lakes") plural = true;
    if (toks[i] == "lake" && i > 0 && toks[i - 1] == "glacial") singular_glacial = true;
  }

  std::optional<int> count;
  for (std::size_t i = 0; i < toks.size() && !count; ++i) {
    const auto n = detail::as_cardinal(toks[i]);
    if (!n || *n < 1) continue;
    for (auto l : lake_at) {
      const auto d = l > i ? l - i : i - l;
      if (d <= 6) {
        count = n;
        break;
      }
    }
  }
  if (!count && singular_glacial && !plural) count = 1;

  std::vector<Claim> claims;
  std::optional<Claim> cur;
  auto flush = [&] {
    if (cur) claims.push_back(*cur);
    cur.reset();
  };
  auto on_quadrant = [&](Quadrant q) {
    if (cur && cur->quadrant) flush();
    if (!cur) cur.emplace();
    cur->quadrant = q;
  };

  for (std::size_t i = 0; i < toks.size();) {
    using detail::match_at;
    if (match_at(toks, i, {"near", "the", "center"}) || match_at(toks, i, {"near", "center"})) {
      if (cur && cur->proximity) flush();
      if (!cur) cur.emplace();
      cur->proximity = Proximity::near;
      i += toks[i + 1] == "the" ? 3 : 2;
    } else if (match_at(toks, i, {"far", "from", "the", "center"}) || match_at(toks, i, {"far", "from", "center"})) {
      if (cur && cur->proximity) flush();
      if (!cur) cur.emplace();
      cur->proximity = Proximity::far;
      i += toks[i + 2] == "the" ? 4 : 3;
    } else if (match_at(toks, i, {"top", "left"})) {
      on_quadrant(Quadrant::top_left);
      i += 2;
    } else if (match_at(toks, i, {"top", "right"})) {
      on_quadrant(Quadrant::top_right);
      i += 2;
    } else if (match_at(toks, i, {"bottom", "left"})) {
      on_quadrant(Quadrant::bottom_left);
      i += 2;
    } else if (match_at(toks, i, {"bottom", "right"})) {
      on_quadrant(Quadrant::bottom_right);
      i += 2;
    } else if (detail::is_center_word(toks[i])) {
      on_quadrant(Quadrant::center);
      ++i;
    } else if (auto ord = detail::as_ordinal(toks[i])) {
      if (cur) flush();
      cur.emplace();
      cur->ordinal = *ord;
      ++i;
    } else {
      ++i;
    }
  }
  flush();

  std::set<int> seen;
  for (auto& c : claims) {
    if (c.quadrant == Quadrant::center && !c.proximity) c.proximity = Proximity::near;
    if (c.ordinal && !seen.insert(*c.ordinal).second) c.ordinal.reset();
  }

  // Coverage: count, plus quadrant and proximity per claim, plus an ordinal
  // per claim whenever more than one lake is described.
  std::size_t expected = 1;
  std::size_t found = count ? 1 : 0;
  const bool ordinals_expected = claims.size() > 1;
  for (const auto& c : claims) {
    expected += ordinals_expected ? 3 : 2;
    found += (c.quadrant ? 1 : 0) + (c.proximity ? 1 : 0) + (ordinals_expected && c.ordinal ? 1 : 0);
  }
  const double coverage = found == 0 ? 0.0 : static_cast<double>(found) / static_cast<double>(expected);
  return ClaimSet::make(count, std::move(claims), coverage);
}

struct LakeCheck {
  int ordinal = 0;
  bool quadrant_match = false;
  bool proximity_match = false;
};

/// Per-answer verification outcome. exact_match holds iff the count matches
/// and every ground-truth lake matched on both quadrant and proximity.
struct VerificationReport {
  std::string image_id;
  bool count_match = false;
  std::vector<LakeCheck> per_lake;
  bool exact_match = false;
  std::vector<std::string> notes;
};

/// Pairs claims with ground-truth lakes and compares fields.
///
/// Claims with an ordinal pair with the lake of that ordinal. Ordinal-free
/// claims are paired greedily, in order, against unpaired lakes taken in
/// ascending ordinal: first a lake matching quadrant and proximity, then
/// quadrant only, then any lake. Lakes with no claim fail both fields.
inline VerificationReport verify(const ClaimSet& claims, const std::vector<LakeInstance>& truth,
                                 std::string image_id = {}) {
  VerificationReport report;
  report.image_id = std::move(image_id);
  const auto& stated = claims.stated_count();
  if (!stated) {
    report.notes.push_back("no lake count stated");
  } else {
    report.count_match = static_cast<std::size_t>(*stated) == truth.size();
    if (!report.count_match) {
      report.notes.push_back("stated count " + std::to_string(*stated) + " != " + std::to_string(truth.size()) +
                             " lakes");
    }
  }

  std::vector<const Claim*> paired(truth.size(), nullptr);
  std::vector<const Claim*> free_claims;
  for (const auto& c : claims.claims()) {
    if (!c.ordinal) {
      free_claims.push_back(&c);
      continue;
    }
    auto it = std::find_if(truth.begin(), truth.end(),
                           [&](const LakeInstance& l) { return l.ordinal_index == *c.ordinal; });
    if (it == truth.end()) {
      report.notes.push_back("extra claim for lake " + std::to_string(*c.ordinal) + " with no counterpart");
    } else {
      paired[static_cast<std::size_t>(it - truth.begin())] = &c;
    }
  }

  std::vector<bool> free_used(free_claims.size(), false);
  auto greedy_pass = [&](auto&& accept) {
    for (std::size_t ci = 0; ci < free_claims.size(); ++ci) {
      if (free_used[ci]) continue;
      for (std::size_t t = 0; t < truth.size(); ++t) {
        if (paired[t] || !accept(*free_claims[ci], truth[t])) continue;
        paired[t] = free_claims[ci];
        free_used[ci] = true;
        break;
      }
    }
  };
  greedy_pass([](const Claim& c, const LakeInstance& l) {
    return c.quadrant == l.position.quadrant && c.proximity == l.position.proximity;
  });
  greedy_pass([](const Claim& c, const LakeInstance& l) { return c.quadrant == l.position.quadrant; });
  greedy_pass([](const Claim&, const LakeInstance&) { return true; });
  for (std::size_t ci = 0; ci < free_claims.size(); ++ci) {
    if (!free_used[ci]) report.notes.push_back("extra claim without ordinal left unpaired");
  }

  bool all = true;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    LakeCheck check;
    check.ordinal = truth[t].ordinal_index;
    const std::string who = "lake " + std::to_string(check.ordinal);
    if (const Claim* c = paired[t]) {
      if (!c->quadrant) report.notes.push_back(who + ": quadrant not stated");
      if (!c->proximity) report.notes.push_back(who + ": proximity not stated");
      check.quadrant_match = c->quadrant == truth[t].position.quadrant;
      check.proximity_match = c->proximity == truth[t].position.proximity;
      if (c->quadrant && !check.quadrant_match) report.notes.push_back(who + ": quadrant mismatch");
      if (c->proximity && !check.proximity_match) report.notes.push_back(who + ": proximity mismatch");
    } else {
      report.notes.push_back(who + ": no claim describes it");
    }
    all = all && check.quadrant_match && check.proximity_match;
    report.per_lake.push_back(check);
  }
  report.exact_match = report.count_match && all;
  return report;
}

}  // namespace glakepos
