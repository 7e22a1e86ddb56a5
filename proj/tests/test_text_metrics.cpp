#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "glakepos/text_metrics.hpp"
#include "oracles.hpp"

using namespace glakepos;

namespace {

TokenSequence toks(std::initializer_list<const char*> words) { return {words.begin(), words.end()}; }

TokenSequence random_sequence(std::mt19937_64& rng, std::size_t len, std::size_t vocab) {
  static const char* words[] = {"the", "lake", "is", "in", "top", "left", "near", "far", "center", "a"};
  TokenSequence s;
  for (std::size_t i = 0; i < len; ++i) s.emplace_back(words[rng() % vocab]);
  return s;
}

}  // namespace

TEST(Tokenize, Rules) {
  EXPECT_EQ(tokenize("The 1st lake, top right."), toks({"the", "1st", "lake", "top", "right"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("A \"Quoted\" (Lake)!\tIs  HERE?"), tokenize("a quoted lake is here"));
  for (const auto& t : tokenize(" x\ny\t z ")) EXPECT_EQ(t.find_first_of(" \t\n"), std::string::npos);
}

TEST(Bleu, IdentityAndShortCandidate) {
  const auto s = toks({"the", "lake", "is", "in", "the", "top", "left"});
  EXPECT_DOUBLE_EQ(bleu4(s, s), 1.0);
  EXPECT_EQ(bleu4(toks({"the", "lake", "is"}), s), 0.0);
  EXPECT_EQ(bleu4(toks({"x", "y", "z", "w"}), s), 0.0);
}

TEST(Bleu, WorkedPairAgainstBruteForce) {
  const auto c = toks({"the", "lake", "is", "in", "the", "top", "left"});
  const auto r = toks({"the", "lake", "is", "in", "the", "bottom", "left"});
  const auto d = bleu4_detail(c, r);
  const std::pair<std::size_t, std::size_t> want[] = {{6, 7}, {4, 6}, {3, 5}, {2, 4}};
  for (std::size_t n = 0; n < 4; ++n) {
    EXPECT_EQ(oracle::brute_ngram_precision(c, r, n + 1), want[n]);
    EXPECT_EQ(d.matches[n], want[n].first);
    EXPECT_EQ(d.totals[n], want[n].second);
  }
  EXPECT_EQ(d.brevity_penalty, 1.0);
  // (6/7 * 4/6 * 3/5 * 2/4)^(1/4); the product is 6/35.
  EXPECT_NEAR(d.score, std::pow(6.0 / 35.0, 0.25), 1e-12);
  EXPECT_NEAR(d.score, 0.6434588841607617, 1e-12);
  EXPECT_NEAR(d.score, oracle::brute_bleu4(c, r), 1e-12);
}

TEST(Bleu, MatchesBruteForceOnRandomPairs) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto c = random_sequence(rng, 1 + rng() % 14, 4 + rng() % 6);
    const auto r = random_sequence(rng, 1 + rng() % 14, 4 + rng() % 6);
    EXPECT_NEAR(bleu4(c, r), oracle::brute_bleu4(c, r), 1e-12);
  }
}

TEST(Bleu, ClipsRepeatedWords) {
  const auto d = bleu4_detail(toks({"the", "the", "the", "the"}), toks({"the", "cat", "on", "mat"}));
  EXPECT_EQ(d.matches[0], 1u);
}

TEST(Bleu, AddOneSmoothingRescuesZeroHigherOrder) {
  const auto c = toks({"a", "b", "c", "d", "e"});
  const auto r = toks({"a", "c", "b", "e", "d"});
  EXPECT_EQ(bleu4(c, r), 0.0);
  const auto s = bleu4(c, r, BleuSmoothing::add_one);
  // p1 = 5/5; p2 = (0+1)/(4+1); p3 = 1/4; p4 = 1/3.
  EXPECT_NEAR(s, std::pow(1.0 * (1.0 / 5) * (1.0 / 4) * (1.0 / 3), 0.25), 1e-12);
}

TEST(Bleu, BrevityPenaltyNeverHelps) {
  const auto r = toks({"the", "lake", "is", "in", "the", "top", "left", "of", "the", "image"});
  auto c = toks({"the", "lake", "is", "in", "the", "top", "left", "of"});
  double last = bleu4(c, r);
  while (c.size() > 4) {
    c.pop_back();
    const double now = bleu4(c, r);
    EXPECT_LE(now, last + 1e-15);
    last = now;
  }
  EXPECT_LT(bleu4_detail(c, r).brevity_penalty, 1.0);
}

TEST(RougeL, Examples) {
  const auto a = toks({"the", "cat", "sat", "on", "the", "mat"});
  const auto b = toks({"the", "cat", "is", "on", "the", "mat"});
  EXPECT_EQ(lcs_length(a, b), 5u);
  EXPECT_NEAR(rouge_l(a, b), 5.0 / 6.0, 1e-12);
  EXPECT_EQ(rouge_l(a, a), 1.0);
  EXPECT_EQ(rouge_l(a, toks({"x", "y"})), 0.0);
  EXPECT_EQ(rouge_l({}, a), 0.0);
}

TEST(RougeL, LcsMatchesMemoizedOracleExhaustively) {
  // Every pair of sequences over a 3-letter alphabet with lengths 0..5, then
  // seeded samples up to length 8 over larger alphabets.
  const char* alpha[] = {"a", "b", "c"};
  std::vector<TokenSequence> all{{}};
  for (std::size_t len = 1, start = 0; len <= 5; ++len) {
    const std::size_t end = all.size();
    for (std::size_t i = start; i < end; ++i)
      for (const char* w : alpha) {
        auto s = all[i];
        s.emplace_back(w);
        all.push_back(s);
      }
    start = end;
  }
  for (std::size_t i = 0; i < all.size(); i += 3)
    for (std::size_t j = 0; j < all.size(); j += 5) ASSERT_EQ(lcs_length(all[i], all[j]), oracle::memo_lcs(all[i], all[j]));

  std::mt19937_64 rng(8);
  for (int i = 0; i < 3000; ++i) {
    const auto a = random_sequence(rng, rng() % 9, 2 + rng() % 5);
    const auto b = random_sequence(rng, rng() % 9, 2 + rng() % 5);
    ASSERT_EQ(lcs_length(a, b), oracle::memo_lcs(a, b));
    EXPECT_DOUBLE_EQ(rouge_l(a, b), rouge_l(b, a));
  }
}

TEST(Meteor, WorkedExamples) {
  EXPECT_EQ(meteor_lite(toks({"a"}), toks({"b"})), 0.0);
  const auto three = toks({"x", "y", "z"});
  const auto d = meteor_lite_detail(three, three);
  EXPECT_EQ(d.matches, 3u);
  EXPECT_EQ(d.chunks, 1u);
  EXPECT_EQ(d.f_mean, 1.0);
  EXPECT_NEAR(d.score, 1.0 - 0.5 / 27.0, 1e-12);
  EXPECT_NEAR(d.score, 0.9814814814814815, 1e-12);

  // Only one alignment exists and no two matched neighbours stay adjacent,
  // so every match is its own chunk.
  const auto swap = meteor_lite_detail(toks({"a", "b", "c", "d"}), toks({"a", "c", "b", "d"}));
  EXPECT_EQ(swap.matches, 4u);
  EXPECT_EQ(oracle::exhaustive_alignment(toks({"a", "b", "c", "d"}), toks({"a", "c", "b", "d"})),
            (std::pair<std::size_t, std::size_t>{4, 4}));
  EXPECT_EQ(swap.chunks, 4u);
  EXPECT_NEAR(swap.score, 0.5, 1e-12);
  EXPECT_EQ(swap.mode, AlignmentMode::exhaustive);
}

TEST(Meteor, ChunkMinimisationUsesRepeats) {
  // Greedy left-to-right links "the" to the first "the"; the best alignment
  // keeps "the lake" together.
  const auto c = toks({"the", "lake"});
  const auto r = toks({"the", "x", "the", "lake"});
  const auto d = meteor_lite_detail(c, r);
  EXPECT_EQ(d.chunks, 1u);
}

TEST(Meteor, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 400; ++i) {
    const auto c = random_sequence(rng, 1 + rng() % 7, 2 + rng() % 5);
    const auto r = random_sequence(rng, 1 + rng() % 7, 2 + rng() % 5);
    const auto [m, chunks] = oracle::exhaustive_alignment(c, r);
    const auto d = meteor_lite_detail(c, r);
    ASSERT_EQ(d.matches, m);
    if (m == 0) continue;
    ASSERT_EQ(d.chunks, chunks);
    EXPECT_NEAR(d.score, oracle::meteor_from(m, chunks, c.size(), r.size()), 1e-12);
  }
}

TEST(Meteor, GreedyBeyondLimitIsReported) {
  TokenSequence s;
  for (int i = 0; i < 12; ++i) s.push_back("w" + std::to_string(i));
  const auto d = meteor_lite_detail(s, s);
  EXPECT_EQ(d.mode, AlignmentMode::greedy);
  EXPECT_EQ(d.chunks, 1u);
  EXPECT_EQ(meteor_lite_detail(s, s, 12).mode, AlignmentMode::exhaustive);
}

TEST(Corpus, IdentityAndDisjoint) {
  std::vector<std::pair<TokenSequence, TokenSequence>> pairs;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    auto s = random_sequence(rng, 6 + rng() % 10, 10);
    pairs.emplace_back(s, s);
  }
  const auto id = evaluate_corpus(pairs);
  EXPECT_DOUBLE_EQ(id.bleu4, 1.0);
  EXPECT_DOUBLE_EQ(id.rouge_l, 1.0);
  EXPECT_GE(id.meteor, 0.95);
  EXPECT_LT(id.meteor, 1.0);

  const std::vector<std::pair<TokenSequence, TokenSequence>> disjoint{{toks({"a", "b", "c", "d"}), toks({"e", "f", "g", "h"})}};
  const auto z = evaluate_corpus(disjoint);
  EXPECT_EQ(z.bleu4, 0.0);
  EXPECT_EQ(z.rouge_l, 0.0);
  EXPECT_EQ(z.meteor, 0.0);
  EXPECT_THROW(evaluate_corpus({}), ValidationError);
}

TEST(Corpus, SingletonEqualsPairScore) {
  const std::vector<std::pair<TokenSequence, TokenSequence>> one{
      {tokenize("the lake is in the top left"), tokenize("the lake is in the bottom left")}};
  const auto agg = evaluate_corpus(one);
  const auto p = score_text_pair(one[0].first, one[0].second);
  EXPECT_EQ(agg.bleu4, p.bleu4);
  EXPECT_EQ(agg.rouge_l, p.rouge_l);
  EXPECT_EQ(agg.meteor, p.meteor);
}

TEST(Corpus, MacroMeanMatchesResummation) {
  std::mt19937_64 rng(100);
  std::vector<std::pair<TokenSequence, TokenSequence>> pairs;
  for (int i = 0; i < 100; ++i) {
    pairs.emplace_back(random_sequence(rng, 4 + rng() % 10, 6), random_sequence(rng, 4 + rng() % 10, 6));
  }
  TextEvalOptions opts;
  opts.smoothing = BleuSmoothing::add_one;
  opts.corpus_bleu = true;
  const auto agg = evaluate_corpus(pairs, opts);
  std::vector<double> b, r, m;
  for (const auto& [c, ref] : pairs) {
    b.push_back(bleu4(c, ref, BleuSmoothing::add_one));
    r.push_back(oracle::memo_lcs(c, ref) == 0 ? 0.0 : rouge_l(c, ref));
    m.push_back(meteor_lite(c, ref));
  }
  EXPECT_NEAR(agg.bleu4, oracle::compensated_sum(b) / 100.0, 1e-12);
  EXPECT_NEAR(agg.rouge_l, oracle::compensated_sum(r) / 100.0, 1e-12);
  EXPECT_NEAR(agg.meteor, oracle::compensated_sum(m) / 100.0, 1e-12);
  ASSERT_TRUE(agg.corpus_bleu4.has_value());
  EXPECT_GT(*agg.corpus_bleu4, 0.0);
  EXPECT_LE(*agg.corpus_bleu4, 1.0);
}
