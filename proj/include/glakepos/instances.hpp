#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glakepos/error.hpp"
#include "glakepos/mask.hpp"

namespace glakepos {

enum class Connectivity { four = 4, eight = 8 };
enum class CenterMode { bbox, mass };
enum class Quadrant { top_left, top_right, bottom_left, bottom_right, center };
enum class Proximity { near, far };

struct BoundingBox {
  std::size_t x = 0;  // left, 0-based
  std::size_t y = 0;  // top, 0-based
  std::size_t w = 0;
  std::size_t h = 0;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Pixel (i, j) covers [i, i+1) x [j, j+1), so a box center is x + w/2, y + h/2.
struct CenterPoint {
  double cx = 0.0;
  double cy = 0.0;
  friend bool operator==(const CenterPoint&, const CenterPoint&) = default;
};

/// Invariant: quadrant == center implies proximity == near.
struct PositionLabel {
  Quadrant quadrant = Quadrant::center;
  Proximity proximity = Proximity::near;
  friend bool operator==(const PositionLabel&, const PositionLabel&) = default;
};

struct LakeInstance {
  int ordinal_index = 0;  // 1-based, raster order of first pixel
  BoundingBox bbox;
  CenterPoint center;
  std::size_t area = 0;
  PositionLabel position;
  friend bool operator==(const LakeInstance&, const LakeInstance&) = default;
};

/// Knobs of the instance analysis. Echoed into every generated record.
struct AnalysisConfig {
  Connectivity connectivity = Connectivity::eight;
  double near_fraction = 0.25;
  CenterMode center_mode = CenterMode::bbox;
  std::size_t min_area = 1;
  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;

  void validate() const {
    if (!(near_fraction > 0.0 && near_fraction < 1.0)) {
      throw ValidationError("near_fraction must lie in (0,1), got " + std::to_string(near_fraction));
    }
    if (min_area < 1) throw ValidationError("min_area must be >= 1");
  }
};

// --- enum <-> text ---------------------------------------------------------

inline std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::top_left: return "top_left";
    case Quadrant::top_right: return "top_right";
    case Quadrant::bottom_left: return "bottom_left";
    case Quadrant::bottom_right: return "bottom_right";
    case Quadrant::center: return "center";
  }
  return "center";
}

inline std::string_view to_string(Proximity p) { return p == Proximity::near ? "near" : "far"; }
inline std::string_view to_string(CenterMode m) { return m == CenterMode::bbox ? "bbox" : "mass"; }

inline Quadrant parse_quadrant(std::string_view s) {
  if (s == "top_left") return Quadrant::top_left;
  if (s == "top_right") return Quadrant::top_right;
  if (s == "bottom_left") return Quadrant::bottom_left;
  if (s == "bottom_right") return Quadrant::bottom_right;
  if (s == "center") return Quadrant::center;
  throw ValidationError("unknown quadrant '" + std::string(s) + "'");
}

inline Proximity parse_proximity(std::string_view s) {
  if (s == "near") return Proximity::near;
  if (s == "far") return Proximity::far;
  throw ValidationError("unknown proximity '" + std::string(s) + "'");
}

inline CenterMode parse_center_mode(std::string_view s) {
  if (s == "bbox") return CenterMode::bbox;
  if (s == "mass") return CenterMode::mass;
  throw ValidationError("unknown center mode '" + std::string(s) + "' (expected bbox|mass)");
}

inline Connectivity parse_connectivity(int n) {
  if (n == 4) return Connectivity::four;
  if (n == 8) return Connectivity::eight;
  throw ValidationError("connectivity must be 4 or 8, got " + std::to_string(n));
}

// --- positions -------------------------------------------------------------

/// Quadrant by comparison with the image midlines (ties go right/bottom);
/// near iff the center lies within near_fraction * min(width, height) of the
/// image center. Distances are compared squared, so the label is exactly
/// invariant under power-of-two scaling and stable under decimal scaling of
/// half-integer inputs.
inline PositionLabel assign_position(const CenterPoint& center, double width, double height,
                                     double near_fraction) {
  const double mx = width / 2.0;
  const double my = height / 2.0;
  const double dx = center.cx - mx;
  const double dy = center.cy - my;
  const double dist_sq = dx * dx + dy * dy;
  if (dist_sq == 0.0) return {Quadrant::center, Proximity::near};

  Quadrant q;
  if (center.cy < my) {
    q = center.cx < mx ? Quadrant::top_left : Quadrant::top_right;
  } else {
    q = center.cx < mx ? Quadrant::bottom_left : Quadrant::bottom_right;
  }
  const double limit = near_fraction * std::min(width, height);
  return {q, dist_sq <= limit * limit ? Proximity::near : Proximity::far};
}

/// "bottom right, near the center", "top left, far from the center", "center".
inline std::string describe_position(const PositionLabel& label) {
  std::string text;
  switch (label.quadrant) {
    case Quadrant::top_left: text = "top left"; break;
    case Quadrant::top_right: text = "top right"; break;
    case Quadrant::bottom_left: text = "bottom left"; break;
    case Quadrant::bottom_right: text = "bottom right"; break;
    case Quadrant::center: return "center";
  }
  text += label.proximity == Proximity::near ? ", near the center" : ", far from the center";
  return text;
}

// --- connected components --------------------------------------------------

namespace detail {

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

struct ComponentStats {
  std::size_t min_x, min_y, max_x, max_y;
  std::size_t area = 0;
  double sum_x = 0.0;  // pixel-center coordinates, for center_mode = mass
  double sum_y = 0.0;
};

}  // namespace detail

/// Two-pass union-find labelling. Instances come out in raster order of each
/// component's first pixel, filtered by min_area, then numbered 1..N.
inline std::vector<LakeInstance> label_components(const BinaryMask& mask,
                                                  const AnalysisConfig& config = {}) {
  config.validate();
  const std::size_t w = mask.width();
  const std::size_t h = mask.height();
  constexpr std::uint32_t kNone = 0xffffffffu;
  std::vector<std::uint32_t> labels(w * h, kNone);
  detail::DisjointSet sets;
  const bool eight = config.connectivity == Connectivity::eight;

  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      std::uint32_t neighbours[4];
      int n = 0;
      auto take = [&](std::size_t nx, std::size_t ny) {
        const auto l = labels[ny * w + nx];
        if (l != kNone) neighbours[n++] = l;
      };
      if (x > 0) take(x - 1, y);
      if (y > 0) {
        take(x, y - 1);
        if (eight && x > 0) take(x - 1, y - 1);
        if (eight && x + 1 < w) take(x + 1, y - 1);
      }
      std::uint32_t label;
      if (n == 0) {
        label = sets.make();
      } else {
        label = neighbours[0];
        for (int i = 1; i < n; ++i) sets.unite(label, neighbours[i]);
      }
      labels[y * w + x] = label;
    }
  }

  // Second pass: resolve roots, number them on first raster encounter.
  std::vector<std::uint32_t> slot_of_root;
  std::vector<detail::ComponentStats> stats;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto l = labels[y * w + x];
      if (l == kNone) continue;
      const auto root = sets.find(l);
      if (root >= slot_of_root.size()) slot_of_root.resize(root + 1, kNone);
      if (slot_of_root[root] == kNone) {
        slot_of_root[root] = static_cast<std::uint32_t>(stats.size());
        stats.push_back({x, y, x, y});
      }
      auto& s = stats[slot_of_root[root]];
      s.min_x = std::min(s.min_x, x);
      s.max_x = std::max(s.max_x, x);
      s.max_y = y;
      ++s.area;
      s.sum_x += static_cast<double>(x) + 0.5;
      s.sum_y += static_cast<double>(y) + 0.5;
    }
  }

  std::vector<LakeInstance> out;
  for (const auto& s : stats) {
    if (s.area < config.min_area) continue;
    LakeInstance lake;
    lake.ordinal_index = static_cast<int>(out.size()) + 1;
    lake.bbox = {s.min_x, s.min_y, s.max_x - s.min_x + 1, s.max_y - s.min_y + 1};
    lake.area = s.area;
    if (config.center_mode == CenterMode::bbox) {
      lake.center = {static_cast<double>(lake.bbox.x) + static_cast<double>(lake.bbox.w) / 2.0,
                     static_cast<double>(lake.bbox.y) + static_cast<double>(lake.bbox.h) / 2.0};
    } else {
      lake.center = {s.sum_x / static_cast<double>(s.area), s.sum_y / static_cast<double>(s.area)};
    }
    lake.position = assign_position(lake.center, static_cast<double>(w), static_cast<double>(h),
                                    config.near_fraction);
    out.push_back(lake);
  }
  return out;
}

}  // namespace glakepos
