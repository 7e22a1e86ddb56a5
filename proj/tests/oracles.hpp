#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library code path they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Box {
  std::size_t x, y, w, h, area;
  bool operator==(const Box&) const = default;
};

// BFS flood fill from each unvisited foreground pixel in raster order.
inline std::vector<Box> flood_fill(const std::vector<std::uint8_t>& grid, std::size_t w, std::size_t h, bool eight) {
  std::vector<bool> seen(grid.size(), false);
  std::vector<Box> out;
  for (std::size_t y0 = 0; y0 < h; ++y0) {
    for (std::size_t x0 = 0; x0 < w; ++x0) {
      if (!grid[y0 * w + x0] || seen[y0 * w + x0]) continue;
      std::size_t minx = x0, maxx = x0, miny = y0, maxy = y0, area = 0;
      std::queue<std::pair<std::size_t, std::size_t>> q;
      q.push({x0, y0});
      seen[y0 * w + x0] = true;
      while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop();
        ++area;
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight && dx != 0 && dy != 0) continue;
            const long nx = static_cast<long>(x) + dx, ny = static_cast<long>(y) + dy;
            if (nx < 0 || ny < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(h)) continue;
            const auto idx = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
            if (grid[idx] && !seen[idx]) {
              seen[idx] = true;
              q.push({static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)});
            }
          }
        }
      }
      out.push_back({minx, miny, maxx - minx + 1, maxy - miny + 1, area});
    }
  }
  return out;
}

// Exact position labelling for half-integer centers, integer dims and
// near_fraction = k/64, in 64-bit integer arithmetic. Quadrant codes follow
// glakepos::Quadrant order: 0 TL, 1 TR, 2 BL, 3 BR, 4 center; near = true.
struct ExactLabel {
  int quadrant;
  bool near;
  bool operator==(const ExactLabel&) const = default;
};

inline ExactLabel exact_position(long twice_cx, long twice_cy, long width, long height, long frac64) {
  // Work in doubled coordinates: 2*cx vs width.
  const long dx2 = twice_cx - width;
  const long dy2 = twice_cy - height;
  if (dx2 == 0 && dy2 == 0) return {4, true};
  int q;
  if (dy2 < 0) {
    q = dx2 < 0 ? 0 : 1;
  } else {
    q = dx2 < 0 ? 2 : 3;
  }
  // dist <= frac64/64 * m  <=>  (dx2^2 + dy2^2) * 64^2 <= (2 * frac64 * m)^2
  const long m = std::min(width, height);
  const long lhs = (dx2 * dx2 + dy2 * dy2) * 64 * 64;
  const long rhs = (2 * frac64 * m) * (2 * frac64 * m);
  return {q, lhs <= rhs};
}

// All n-grams listed one by one, matched by linear search with clipping.
inline std::pair<std::size_t, std::size_t> brute_ngram_precision(const std::vector<std::string>& cand,
                                                                 const std::vector<std::string>& ref,
                                                                 std::size_t n) {
  auto list = [n](const std::vector<std::string>& s) {
    std::vector<std::vector<std::string>> grams;
    for (std::size_t i = 0; i + n <= s.size(); ++i) grams.emplace_back(s.begin() + i, s.begin() + i + n);
    return grams;
  };
  const auto c = list(cand);
  auto r = list(ref);
  std::vector<bool> used(r.size(), false);
  std::size_t matched = 0;
  for (const auto& g : c) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (!used[k] && r[k] == g) {
        used[k] = true;
        ++matched;
        break;
      }
    }
  }
  return {matched, c.size()};
}

inline double brute_bleu4(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  double prod = 1.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto [m, t] = brute_ngram_precision(cand, ref, n);
    if (m == 0 || t == 0) return 0.0;
    prod *= static_cast<double>(m) / static_cast<double>(t);
  }
  const double c = static_cast<double>(cand.size()), r = static_cast<double>(ref.size());
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return bp * std::pow(prod, 0.25);
}

// Textbook recursive LCS with memoisation.
inline std::size_t memo_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t v = a[i] == b[j] ? 1 + rec(i + 1, j + 1) : std::max(rec(i + 1, j), rec(i, j + 1));
    memo[key] = v;
    return v;
  };
  return rec(0, 0);
}

// Enumerates every partial injective map cand -> ref over equal tokens, keeps
// the alignments of maximum size, and returns (matches, fewest chunks).
inline std::pair<std::size_t, std::size_t> exhaustive_alignment(const std::vector<std::string>& cand,
                                                                const std::vector<std::string>& ref) {
  std::size_t best_m = 0, best_chunks = 0;
  std::vector<long> map(cand.size(), -1);
  std::vector<bool> used(ref.size(), false);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == cand.size()) {
      std::size_t m = 0, chunks = 0;
      long prev_c = -2, prev_r = -2;
      for (std::size_t k = 0; k < cand.size(); ++k) {
        if (map[k] < 0) continue;
        ++m;
        if (!(static_cast<long>(k) == prev_c + 1 && map[k] == prev_r + 1)) ++chunks;
        prev_c = static_cast<long>(k);
        prev_r = map[k];
      }
      if (m > best_m || (m == best_m && chunks < best_chunks)) {
        best_m = m;
        best_chunks = chunks;
      }
      return;
    }
    rec(i + 1);
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (used[j] || ref[j] != cand[i]) continue;
      used[j] = true;
      map[i] = static_cast<long>(j);
      rec(i + 1);
      map[i] = -1;
      used[j] = false;
    }
  };
  rec(0);
  return {best_m, best_chunks};
}

inline double meteor_from(std::size_t m, std::size_t chunks, std::size_t c, std::size_t r) {
  if (m == 0) return 0.0;
  const double P = static_cast<double>(m) / static_cast<double>(c);
  const double R = static_cast<double>(m) / static_cast<double>(r);
  const double f = 10.0 * P * R / (R + 9.0 * P);
  const double frag = static_cast<double>(chunks) / static_cast<double>(m);
  return f * (1.0 - 0.5 * frag * frag * frag);
}

// Neumaier-compensated sum.
inline double compensated_sum(const std::vector<double>& xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

}  // namespace oracle
