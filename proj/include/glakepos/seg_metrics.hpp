#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glakepos/error.hpp"
#include "glakepos/mask.hpp"

namespace glakepos {

/// Overlap of one prediction against its ground truth.
struct SegScore {
  double iou = 0.0;
  double dice = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  bool both_empty = false;  // scored 1.0 by convention
};

inline SegScore score_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  SegScore s{0.0, 0.0, tp, fp, fn, false};
  const std::uint64_t uni = tp + fp + fn;
  if (uni == 0) {
    s.iou = s.dice = 1.0;
    s.both_empty = true;
    return s;
  }
  s.iou = static_cast<double>(tp) / static_cast<double>(uni);
  s.dice = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  return s;
}

inline SegScore score_pair(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw ValidationError("dimension mismatch: pred " + std::to_string(pred.width()) + "x" +
                          std::to_string(pred.height()) + " vs gt " + std::to_string(gt.width()) + "x" +
                          std::to_string(gt.height()));
  }
  std::uint64_t tp = 0, fp = 0, fn = 0;
  const auto p = pred.data();
  const auto g = gt.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    tp += p[i] & g[i];
    fp += p[i] & (g[i] ^ 1u);
    fn += (p[i] ^ 1u) & g[i];
  }
  return score_counts(tp, fp, fn);
}

struct SegAggregate {
  double mean_iou = 0.0;
  double mean_dice = 0.0;
  std::size_t images = 0;
  std::size_t both_empty = 0;
};

/// Unweighted per-image mean (macro average).
inline SegAggregate aggregate(std::span<const SegScore> scores) {
  if (scores.empty()) throw ValidationError("cannot aggregate an empty score list");
  SegAggregate agg;
  double iou = 0.0, dice = 0.0;
  for (const auto& s : scores) {
    iou += s.iou;
    dice += s.dice;
    agg.both_empty += s.both_empty ? 1 : 0;
  }
  agg.images = scores.size();
  agg.mean_iou = iou / static_cast<double>(scores.size());
  agg.mean_dice = dice / static_cast<double>(scores.size());
  return agg;
}

/// Pooled-pixel IoU/Dice over the whole dataset.
inline SegScore aggregate_micro(std::span<const SegScore> scores) {
  if (scores.empty()) throw ValidationError("cannot aggregate an empty score list");
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (const auto& s : scores) {
    tp += s.tp;
    fp += s.fp;
    fn += s.fn;
  }
  return score_counts(tp, fp, fn);
}

}  // namespace glakepos
