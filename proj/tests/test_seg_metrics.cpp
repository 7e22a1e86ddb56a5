#include <random>

#include <gtest/gtest.h>

#include "glakepos/seg_metrics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace glakepos;

namespace {

BinaryMask half(std::size_t n, bool left) {
  std::vector<std::uint8_t> g(n * n, 0);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) g[y * n + x] = (left ? x < n / 2 : y < n / 2) ? 1 : 0;
  return BinaryMask(n, n, g);
}

}  // namespace

TEST(SegMetrics, Identity) {
  const auto m = half(10, true);
  const auto s = score_pair(m, m);
  EXPECT_EQ(s.iou, 1.0);
  EXPECT_EQ(s.dice, 1.0);
  EXPECT_FALSE(s.both_empty);
}

TEST(SegMetrics, Disjoint) {
  const auto a = BinaryMask(2, 1, {1, 0}), b = BinaryMask(2, 1, {0, 1});
  const auto s = score_pair(a, b);
  EXPECT_EQ(s.iou, 0.0);
  EXPECT_EQ(s.dice, 0.0);
}

TEST(SegMetrics, HalfOverlap) {
  const auto s = score_pair(half(100, true), half(100, false));
  EXPECT_EQ(s.tp, 2500u);
  EXPECT_EQ(s.fp, 2500u);
  EXPECT_EQ(s.fn, 2500u);
  EXPECT_NEAR(s.iou, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.dice, 0.5, 1e-12);
}

TEST(SegMetrics, BothEmptyIsOneAndFlagged) {
  const auto s = score_pair(BinaryMask::zeros(5, 5), BinaryMask::zeros(5, 5));
  EXPECT_EQ(s.iou, 1.0);
  EXPECT_EQ(s.dice, 1.0);
  EXPECT_TRUE(s.both_empty);
  const SegScore scores[] = {s, score_counts(0, 1, 0)};
  EXPECT_EQ(aggregate(scores).both_empty, 1u);
}

TEST(SegMetrics, DimensionMismatch) {
  EXPECT_THROW(score_pair(BinaryMask::zeros(3, 4), BinaryMask::zeros(4, 3)), ValidationError);
}

TEST(SegMetrics, SymmetryIdentityAndMonotonicity) {
  std::mt19937_64 rng(404);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t w = 1 + rng() % 20, h = 1 + rng() % 20;
    const double p = static_cast<double>(rng() % 100) / 100.0;
    auto gp = testing_support::random_grid(rng, w * h, p);
    const auto gg = testing_support::random_grid(rng, w * h, p);
    const BinaryMask a(w, h, gp), b(w, h, gg);
    const auto ab = score_pair(a, b), ba = score_pair(b, a);
    EXPECT_EQ(ab.iou, ba.iou);
    EXPECT_EQ(ab.dice, ba.dice);
    EXPECT_NEAR(ab.dice, 2.0 * ab.iou / (1.0 + ab.iou), 1e-12);
    EXPECT_GE(ab.iou, 0.0);
    EXPECT_LE(ab.dice, 1.0);
    // Turn one false negative into a true positive.
    for (std::size_t k = 0; k < gp.size(); ++k) {
      if (!gp[k] && gg[k]) {
        gp[k] = 1;
        const auto better = score_pair(BinaryMask(w, h, gp), b);
        EXPECT_GE(better.iou, ab.iou);
        EXPECT_GE(better.dice, ab.dice);
        break;
      }
    }
  }
}

TEST(SegMetrics, AggregateExamples) {
  const SegScore two[] = {score_counts(1, 0, 0), score_counts(0, 1, 1)};
  EXPECT_EQ(aggregate(two).mean_iou, 0.5);
  const SegScore one[] = {score_counts(3, 1, 2)};
  EXPECT_EQ(aggregate(one).mean_iou, one[0].iou);
  EXPECT_EQ(aggregate(one).mean_dice, one[0].dice);
  EXPECT_THROW(aggregate({}), ValidationError);
}

TEST(SegMetrics, AggregateMatchesCompensatedSum) {
  std::mt19937_64 rng(50);
  std::vector<SegScore> scores;
  std::vector<double> ious, dices;
  for (int i = 0; i < 50; ++i) {
    const auto a = testing_support::random_mask(rng, 32, 32, 0.4);
    const auto b = testing_support::random_mask(rng, 32, 32, 0.4);
    scores.push_back(score_pair(a, b));
    ious.push_back(scores.back().iou);
    dices.push_back(scores.back().dice);
  }
  const auto agg = aggregate(scores);
  EXPECT_NEAR(agg.mean_iou, oracle::compensated_sum(ious) / 50.0, 1e-12);
  EXPECT_NEAR(agg.mean_dice, oracle::compensated_sum(dices) / 50.0, 1e-12);
}

TEST(SegMetrics, MicroPoolsCounts) {
  const SegScore s[] = {score_counts(10, 0, 0), score_counts(0, 5, 5)};
  const auto micro = aggregate_micro(s);
  EXPECT_DOUBLE_EQ(micro.iou, 10.0 / 20.0);
  EXPECT_DOUBLE_EQ(micro.dice, 20.0 / 30.0);
}
