#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glakepos/dataset.hpp"
#include "glakepos/error.hpp"
#include "glakepos/hashing.hpp"
#include "glakepos/instances.hpp"
#include "glakepos/mask.hpp"
#include "glakepos/parallel.hpp"
#include "glakepos/raster_io.hpp"
#include "glakepos/templates.hpp"

namespace glakepos {

/// Layout of a synthetic corpus. Blobs never touch, even diagonally.
struct CorpusSpec {
  std::size_t count = 1;
  std::size_t width = 64;
  std::size_t height = 64;
  std::size_t lakes_min = 1;
  std::size_t lakes_max = 1;
  std::size_t blob_min = 8;  // side length range of a blob's box
  std::size_t blob_max = 8;
  std::uint64_t seed = 0;
  bool irregular = false;  // random polyominoes instead of filled rectangles
  std::string extension = ".png";
};

struct PlantedLake {
  BoundingBox bbox;
  std::size_t area = 0;
};

struct SynthImage {
  std::string image_id;
  std::vector<PlantedLake> lakes;  // in raster order of each blob's first pixel
};

struct SynthManifest {
  CorpusSpec spec;
  std::vector<SynthImage> images;
};

inline std::string synth_image_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "synth_%05zu", index);
  return buf;
}

namespace detail {

inline std::size_t draw_between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + uniform_index(rng, hi - lo + 1);
}

struct BlobPixels {
  std::vector<std::pair<std::size_t, std::size_t>> pixels;  // (x, y)
};

// Random 4-connected polyomino grown inside a w x h window at (x0, y0).
inline BlobPixels grow_polyomino(Rng& rng, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) {
  const std::size_t target = std::max<std::size_t>(1, (w * h + 1) / 2);
  std::vector<std::uint8_t> in(w * h, 0);
  BlobPixels blob;
  std::vector<std::pair<std::size_t, std::size_t>> frontier;
  auto add = [&](std::size_t lx, std::size_t ly) {
    in[ly * w + lx] = 1;
    blob.pixels.emplace_back(x0 + lx, y0 + ly);
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const auto nx = static_cast<long>(lx) + dx[k];
      const auto ny = static_cast<long>(ly) + dy[k];
      if (nx < 0 || ny < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(h)) continue;
      if (!in[static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx)]) {
        frontier.emplace_back(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
      }
    }
  };
  add(w / 2, h / 2);
  while (blob.pixels.size() < target && !frontier.empty()) {
    const auto k = uniform_index(rng, frontier.size());
    const auto [fx, fy] = frontier[k];
    frontier[k] = frontier.back();
    frontier.pop_back();
    if (!in[fy * w + fx]) add(fx, fy);
  }
  return blob;
}

}  // namespace detail

/// Renders one image of the corpus. Deterministic in (spec.seed, index).
inline std::pair<BinaryMask, SynthImage> synth_one(const CorpusSpec& spec, std::size_t index) {
  constexpr int kImageAttempts = 100;
  constexpr int kBlobAttempts = 500;
  SynthImage info;
  info.image_id = synth_image_id(index);
  Rng rng(stable_seed(spec.seed, info.image_id));
  const std::size_t W = spec.width, H = spec.height;
  const std::size_t n_lakes = detail::draw_between(rng, spec.lakes_min, spec.lakes_max);

  for (int attempt = 0; attempt < kImageAttempts; ++attempt) {
    std::vector<std::uint8_t> grid(W * H, 0);
    std::vector<std::uint8_t> blocked(W * H, 0);  // blobs dilated by one pixel
    std::vector<detail::BlobPixels> blobs;
    bool ok = true;
    for (std::size_t b = 0; b < n_lakes && ok; ++b) {
      bool placed = false;
      for (int tries = 0; tries < kBlobAttempts && !placed; ++tries) {
        const auto w = detail::draw_between(rng, spec.blob_min, spec.blob_max);
        const auto h = detail::draw_between(rng, spec.blob_min, spec.blob_max);
        const auto x = detail::draw_between(rng, 0, W - w);
        const auto y = detail::draw_between(rng, 0, H - h);
        detail::BlobPixels blob;
        if (spec.irregular) {
          blob = detail::grow_polyomino(rng, x, y, w, h);
        } else {
          for (std::size_t yy = y; yy < y + h; ++yy)
            for (std::size_t xx = x; xx < x + w; ++xx) blob.pixels.emplace_back(xx, yy);
        }
        const bool clear = std::none_of(blob.pixels.begin(), blob.pixels.end(),
                                        [&](const auto& p) { return blocked[p.second * W + p.first]; });
        if (!clear) continue;
        for (const auto& [px, py] : blob.pixels) {
          grid[py * W + px] = 1;
          for (std::size_t ny = py > 0 ? py - 1 : 0; ny <= std::min(H - 1, py + 1); ++ny)
            for (std::size_t nx = px > 0 ? px - 1 : 0; nx <= std::min(W - 1, px + 1); ++nx) blocked[ny * W + nx] = 1;
        }
        blobs.push_back(std::move(blob));
        placed = true;
      }
      ok = placed;
    }
    if (!ok) continue;

    std::vector<std::pair<std::pair<std::size_t, std::size_t>, PlantedLake>> keyed;
    for (const auto& blob : blobs) {
      std::size_t min_x = W, min_y = H, max_x = 0, max_y = 0;
      std::pair<std::size_t, std::size_t> first{H, W};  // (y, x) of raster-first pixel
      for (const auto& [px, py] : blob.pixels) {
        min_x = std::min(min_x, px);
        max_x = std::max(max_x, px);
        min_y = std::min(min_y, py);
        max_y = std::max(max_y, py);
        first = std::min(first, std::make_pair(py, px));
      }
      keyed.push_back({first, {{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1}, blob.pixels.size()}});
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& k : keyed) info.lakes.push_back(k.second);
    return {BinaryMask(W, H, std::move(grid), info.image_id), std::move(info)};
  }
  throw ValidationError("infeasible corpus spec: could not place " + std::to_string(n_lakes) +
                        " non-adjacent blobs in " + info.image_id + " after " + std::to_string(kImageAttempts) +
                        " attempts");
}

inline void validate(const CorpusSpec& spec) {
  if (spec.count == 0) throw ValidationError("corpus count must be >= 1");
  if (spec.width == 0 || spec.height == 0) throw ValidationError("corpus image size must be >= 1x1");
  if (spec.lakes_min == 0 || spec.lakes_min > spec.lakes_max) throw ValidationError("bad lakes range");
  if (spec.blob_min == 0 || spec.blob_min > spec.blob_max) throw ValidationError("bad blob size range");
  if (spec.blob_max > spec.width || spec.blob_max > spec.height) {
    throw ValidationError("blob size exceeds image size");
  }
  if (spec.extension != ".png" && spec.extension != ".pgm") throw ValidationError("extension must be .png or .pgm");
}

inline ojson synth_manifest_to_json(const SynthManifest& m) {
  ojson j;
  const auto& s = m.spec;
  j["spec"] = {{"count", s.count},         {"width", s.width},       {"height", s.height},
               {"lakes_min", s.lakes_min}, {"lakes_max", s.lakes_max}, {"blob_min", s.blob_min},
               {"blob_max", s.blob_max},   {"seed", s.seed},         {"irregular", s.irregular}};
  j["images"] = ojson::array();
  for (const auto& img : m.images) {
    ojson lakes = ojson::array();
    for (const auto& l : img.lakes) {
      lakes.push_back({{"x", l.bbox.x}, {"y", l.bbox.y}, {"w", l.bbox.w}, {"h", l.bbox.h}, {"area", l.area}});
    }
    j["images"].push_back({{"image_id", img.image_id}, {"lakes", lakes}});
  }
  return j;
}

/// Writes count masks plus manifest.json into out_dir (created if needed).
inline SynthManifest generate_corpus(const CorpusSpec& spec, const std::filesystem::path& out_dir,
                                     std::size_t jobs = 1) {
  validate(spec);
  std::filesystem::create_directories(out_dir);
  SynthManifest manifest;
  manifest.spec = spec;
  manifest.images.resize(spec.count);
  parallel_for(spec.count, jobs, [&](std::size_t i) {
    auto [mask, info] = synth_one(spec, i);
    save_mask(mask, out_dir / (info.image_id + spec.extension));
    manifest.images[i] = std::move(info);
  });
  write_text_file(out_dir / "manifest.json", synth_manifest_to_json(manifest).dump(2) + "\n");
  return manifest;
}

}  // namespace glakepos
