#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "glakepos/error.hpp"

namespace glakepos {

/// Lowercased word tokens; never contain whitespace.
using TokenSequence = std::vector<std::string>;

/// Lowercases, deletes . , : ; ! ? " ( ) and splits on whitespace.
inline TokenSequence tokenize(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (unsigned char c : text) {
    switch (c) {
      case '.': case ',': case ':': case ';': case '!': case '?': case '"': case '(': case ')':
        continue;
      default:
        clean.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  TokenSequence out;
  std::istringstream in(clean);
  for (std::string tok; in >> tok;) out.push_back(std::move(tok));
  return out;
}

enum class BleuSmoothing { none, add_one };

struct BleuDetail {
  std::size_t matches[4] = {0, 0, 0, 0};
  std::size_t totals[4] = {0, 0, 0, 0};
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
  double brevity_penalty = 1.0;
  double score = 0.0;
};

namespace detail {

inline std::map<std::vector<std::string>, std::size_t> ngram_counts(const TokenSequence& seq, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    ++counts[std::vector<std::string>(seq.begin() + static_cast<std::ptrdiff_t>(i),
                                      seq.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

inline void clipped_counts(const TokenSequence& cand, const TokenSequence& ref, BleuDetail& d) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto c = ngram_counts(cand, n);
    const auto r = ngram_counts(ref, n);
    for (const auto& [gram, count] : c) {
      auto it = r.find(gram);
      d.matches[n - 1] += it == r.end() ? 0 : std::min(count, it->second);
    }
    d.totals[n - 1] = cand.size() >= n ? cand.size() - n + 1 : 0;
  }
  d.candidate_length = cand.size();
  d.reference_length = ref.size();
}

// Uniform-weight geometric mean of the four precisions times the brevity penalty.
inline void finish_bleu(BleuDetail& d, BleuSmoothing smoothing) {
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    double num = static_cast<double>(d.matches[n]);
    double den = static_cast<double>(d.totals[n]);
    if (smoothing == BleuSmoothing::add_one && n >= 1) {
      num += 1.0;
      den += 1.0;
    }
    if (num == 0.0 || den == 0.0) {
      d.score = 0.0;
      return;
    }
    log_sum += std::log(num / den);
  }
  const double c = static_cast<double>(d.candidate_length);
  const double r = static_cast<double>(d.reference_length);
  d.brevity_penalty = c < r ? std::exp(1.0 - r / c) : 1.0;
  d.score = d.brevity_penalty * std::exp(log_sum / 4.0);
}

}  // namespace detail

inline BleuDetail bleu4_detail(const TokenSequence& candidate, const TokenSequence& reference,
                               BleuSmoothing smoothing = BleuSmoothing::none) {
  BleuDetail d;
  detail::clipped_counts(candidate, reference, d);
  detail::finish_bleu(d, smoothing);
  return d;
}

/// Sentence BLEU-4 with clipped n-gram precisions; 0 when any precision is 0
/// unless add-one smoothing is requested for n >= 2.
inline double bleu4(const TokenSequence& candidate, const TokenSequence& reference,
                    BleuSmoothing smoothing = BleuSmoothing::none) {
  return bleu4_detail(candidate, reference, smoothing).score;
}

/// Corpus BLEU-4: clipped counts and lengths pooled over all pairs first.
inline BleuDetail corpus_bleu4(std::span<const std::pair<TokenSequence, TokenSequence>> pairs,
                               BleuSmoothing smoothing = BleuSmoothing::none) {
  BleuDetail total;
  for (const auto& [cand, ref] : pairs) {
    BleuDetail d;
    detail::clipped_counts(cand, ref, d);
    for (std::size_t n = 0; n < 4; ++n) {
      total.matches[n] += d.matches[n];
      total.totals[n] += d.totals[n];
    }
    total.candidate_length += d.candidate_length;
    total.reference_length += d.reference_length;
  }
  detail::finish_bleu(total, smoothing);
  return total;
}

inline std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      row[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], row[j - 1]);
    }
    std::swap(prev, row);
  }
  return prev[b.size()];
}

/// ROUGE-L F1 (beta = 1).
inline double rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const double l = static_cast<double>(lcs_length(candidate, reference));
  if (l == 0.0) return 0.0;
  const double p = l / static_cast<double>(candidate.size());
  const double r = l / static_cast<double>(reference.size());
  return 2.0 * p * r / (p + r);
}

enum class AlignmentMode { exhaustive, greedy };

struct MeteorDetail {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_mean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
  AlignmentMode mode = AlignmentMode::exhaustive;
};

namespace detail {

// Chunks of an alignment given as (candidate index -> reference index),
// listed in increasing candidate index.
inline std::size_t count_chunks(const std::vector<std::pair<std::size_t, std::size_t>>& links) {
  if (links.empty()) return 0;
  std::size_t chunks = 1;
  for (std::size_t k = 1; k < links.size(); ++k) {
    const bool adjacent = links[k].first == links[k - 1].first + 1 && links[k].second == links[k - 1].second + 1;
    if (!adjacent) ++chunks;
  }
  return chunks;
}

// Maximum exact-match alignment size: per word type, min of the counts.
inline std::size_t max_matches(const TokenSequence& cand, const TokenSequence& ref) {
  std::map<std::string, std::size_t> c, r;
  for (const auto& t : cand) ++c[t];
  for (const auto& t : ref) ++r[t];
  std::size_t m = 0;
  for (const auto& [tok, n] : c) {
    auto it = r.find(tok);
    if (it != r.end()) m += std::min(n, it->second);
  }
  return m;
}

// Depth-first search over maximum alignments, keeping the fewest chunks.
// Candidate tokens are visited left to right; each either links to a free
// reference position holding the same word or stays unlinked while enough
// matches remain possible.
class ChunkSearch {
 public:
  ChunkSearch(const TokenSequence& cand, const TokenSequence& ref, std::size_t target)
      : cand_(cand), ref_(ref), target_(target), used_(ref.size(), false) {}

  // Fewest chunks, or nullopt when the node budget runs out first.
  std::optional<std::size_t> run(std::size_t node_budget) {
    best_ = std::numeric_limits<std::size_t>::max();
    budget_ = node_budget;
    visit(0, 0);
    if (budget_ == 0) return std::nullopt;
    return best_;
  }

 private:
  void visit(std::size_t i, std::size_t chunks_so_far) {
    if (budget_ == 0) return;
    --budget_;
    if (chunks_so_far >= best_) return;
    if (links_.size() == target_) {
      best_ = chunks_so_far;
      return;
    }
    if (i == cand_.size()) return;
    if (links_.size() + (cand_.size() - i) < target_) return;
    for (std::size_t j = 0; j < ref_.size(); ++j) {
      if (used_[j] || ref_[j] != cand_[i]) continue;
      const bool extends = !links_.empty() && links_.back().first + 1 == i && links_.back().second + 1 == j;
      used_[j] = true;
      links_.emplace_back(i, j);
      visit(i + 1, chunks_so_far + (extends ? 0 : 1));
      links_.pop_back();
      used_[j] = false;
    }
    visit(i + 1, chunks_so_far);
  }

  const TokenSequence& cand_;
  const TokenSequence& ref_;
  std::size_t target_;
  std::vector<bool> used_;
  std::vector<std::pair<std::size_t, std::size_t>> links_;
  std::size_t best_ = 0;
  std::size_t budget_ = 0;
};

// Left to right, each candidate token takes the earliest free reference
// position with the same word, preferring the one right after the previous link.
inline std::size_t greedy_chunks(const TokenSequence& cand, const TokenSequence& ref) {
  std::vector<bool> used(ref.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    std::size_t pick = ref.size();
    if (!links.empty() && links.back().first + 1 == i) {
      const std::size_t next = links.back().second + 1;
      if (next < ref.size() && !used[next] && ref[next] == cand[i]) pick = next;
    }
    for (std::size_t j = 0; pick == ref.size() && j < ref.size(); ++j) {
      if (!used[j] && ref[j] == cand[i]) pick = j;
    }
    if (pick == ref.size()) continue;
    used[pick] = true;
    links.emplace_back(i, pick);
  }
  return count_chunks(links);
}

}  // namespace detail

/// Exact-match METEOR without stemming or synonyms: alpha 0.9, beta 3,
/// gamma 0.5. Chunks are minimised exhaustively up to exhaustive_limit
/// matches and greedily beyond (or when the search exceeds its node budget,
/// which only highly repetitive inputs reach). The mode used is reported.
inline MeteorDetail meteor_lite_detail(const TokenSequence& candidate, const TokenSequence& reference,
                                       std::size_t exhaustive_limit = 10) {
  constexpr std::size_t kNodeBudget = 2'000'000;
  MeteorDetail d;
  d.matches = detail::max_matches(candidate, reference);
  if (d.matches == 0) return d;
  std::optional<std::size_t> chunks;
  if (d.matches <= exhaustive_limit) {
    chunks = detail::ChunkSearch(candidate, reference, d.matches).run(kNodeBudget);
  }
  if (chunks) {
    d.mode = AlignmentMode::exhaustive;
    d.chunks = *chunks;
  } else {
    d.mode = AlignmentMode::greedy;
    d.chunks = detail::greedy_chunks(candidate, reference);
  }
  const double m = static_cast<double>(d.matches);
  d.precision = m / static_cast<double>(candidate.size());
  d.recall = m / static_cast<double>(reference.size());
  d.f_mean = 10.0 * d.precision * d.recall / (d.recall + 9.0 * d.precision);
  const double frag = static_cast<double>(d.chunks) / m;
  d.penalty = 0.5 * frag * frag * frag;
  d.score = d.f_mean * (1.0 - d.penalty);
  return d;
}

inline double meteor_lite(const TokenSequence& candidate, const TokenSequence& reference) {
  return meteor_lite_detail(candidate, reference).score;
}

struct PairScore {
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;
  BleuDetail bleu;
  std::size_t lcs = 0;
  MeteorDetail meteor_detail;
};

struct TextScore {
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;
  std::vector<PairScore> pairs;
  std::optional<double> corpus_bleu4;  // pooled counts, when requested
};

struct TextEvalOptions {
  BleuSmoothing smoothing = BleuSmoothing::none;
  bool corpus_bleu = false;
};

inline PairScore score_text_pair(const TokenSequence& cand, const TokenSequence& ref,
                                 const TextEvalOptions& options = {}) {
  PairScore s;
  s.bleu = bleu4_detail(cand, ref, options.smoothing);
  s.bleu4 = s.bleu.score;
  s.lcs = lcs_length(cand, ref);
  s.rouge_l = rouge_l(cand, ref);
  s.meteor_detail = meteor_lite_detail(cand, ref);
  s.meteor = s.meteor_detail.score;
  return s;
}

/// Macro average of per-pair scores. Per-pair details are kept in input order.
inline TextScore evaluate_corpus(std::span<const std::pair<TokenSequence, TokenSequence>> pairs,
                                 const TextEvalOptions& options = {}) {
  if (pairs.empty()) throw ValidationError("cannot evaluate an empty corpus");
  TextScore out;
  out.pairs.reserve(pairs.size());
  for (const auto& [cand, ref] : pairs) out.pairs.push_back(score_text_pair(cand, ref, options));
  double b = 0.0, r = 0.0, m = 0.0;
  for (const auto& p : out.pairs) {
    b += p.bleu4;
    r += p.rouge_l;
    m += p.meteor;
  }
  const double n = static_cast<double>(pairs.size());
  out.bleu4 = b / n;
  out.rouge_l = r / n;
  out.meteor = m / n;
  if (options.corpus_bleu) out.corpus_bleu4 = corpus_bleu4(pairs, options.smoothing).score;
  return out;
}

}  // namespace glakepos
