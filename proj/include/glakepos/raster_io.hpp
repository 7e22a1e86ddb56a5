#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "glakepos/error.hpp"
#include "glakepos/mask.hpp"

namespace glakepos {

namespace fs = std::filesystem;

namespace detail {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

inline std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// --- PGM -------------------------------------------------------------------

inline void skip_pgm_space(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline unsigned long read_pgm_uint(std::istream& in, const std::string& ctx, const char* what) {
  skip_pgm_space(in);
  unsigned long value = 0;
  if (!(in >> value)) throw ValidationError(ctx + ": malformed PGM header (" + what + ")");
  return value;
}

inline GrayImage read_pgm(const fs::path& path) {
  const std::string ctx = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(ctx + ": cannot open for reading");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
    throw ValidationError(ctx + ": not a P5/P2 PGM (P3/P6 colour formats are rejected)");
  }
  const bool binary = magic[1] == '5';
  GrayImage img;
  img.width = read_pgm_uint(in, ctx, "width");
  img.height = read_pgm_uint(in, ctx, "height");
  const unsigned long maxval = read_pgm_uint(in, ctx, "maxval");
  if (img.width == 0 || img.height == 0) throw ValidationError(ctx + ": zero-dimension image");
  if (maxval == 0 || maxval > 255) {
    throw ValidationError(ctx + ": maxval " + std::to_string(maxval) + " is not an 8-bit PGM");
  }
  img.pixels.resize(img.width * img.height);
  if (binary) {
    in.get();  // single whitespace after maxval
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
      throw IoError(ctx + ": truncated PGM raster");
    }
  } else {
    for (auto& p : img.pixels) {
      unsigned long v = read_pgm_uint(in, ctx, "pixel");
      if (v > maxval) throw ValidationError(ctx + ": pixel value exceeds maxval");
      p = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

inline void write_pgm(const fs::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

// --- PNG -------------------------------------------------------------------

struct PngErrorState {
  std::jmp_buf jump;
  char message[256] = {0};
};

extern "C" inline void png_error_to_state(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  std::longjmp(state->jump, 1);
}

extern "C" inline void png_warning_ignore(png_structp, png_const_charp) {}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

// Reads the header, then the raster, of an 8-bit grayscale PNG. Everything
// with a non-trivial destructor is created before setjmp so longjmp never
// skips one.
inline GrayImage read_png(const fs::path& path) {
  const std::string ctx = path.string();
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(ctx.c_str(), "rb"));
  if (!file) throw IoError(ctx + ": cannot open for reading");

  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw ValidationError(ctx + ": not a PNG file");
  }

  PngErrorState state;
  GrayImage img;
  std::vector<png_bytep> rows;
  std::string failure;
  volatile bool validation_failure = false;

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_to_state, png_warning_ignore);
  if (!png) throw IoError(ctx + ": libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError(ctx + ": libpng initialisation failed");
  }

  if (setjmp(state.jump)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(ctx + ": PNG decode error: " + state.message);
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (color_type != PNG_COLOR_TYPE_GRAY) {
    validation_failure = true;
    failure = color_type == PNG_COLOR_TYPE_PALETTE ? "paletted PNG rejected; expected 8-bit grayscale"
                                                   : "multi-channel PNG rejected; expected 8-bit grayscale";
  } else if (bit_depth != 8) {
    validation_failure = true;
    failure = "PNG bit depth " + std::to_string(bit_depth) + " rejected; expected 8";
  } else if (width == 0 || height == 0) {
    validation_failure = true;
    failure = "zero-dimension image";
  } else {
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<std::size_t>(width) * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = img.pixels.data() + static_cast<std::size_t>(y) * width;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (validation_failure) throw ValidationError(ctx + ": " + failure);
  return img;
}

inline void write_png(const fs::path& path, const GrayImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_GRAY;
  const std::string p = path.string();
  if (!png_image_write_to_file(&image, p.c_str(), 0, img.pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError(p + ": PNG write failed: " + msg);
  }
}

}  // namespace detail

/// True for the file extensions load_mask understands.
inline bool is_mask_file(const fs::path& path) {
  const auto ext = detail::lower_extension(path);
  return ext == ".png" || ext == ".pgm";
}

/// Loads an 8-bit single-channel PNG or PGM (P5/P2) and binarizes it:
/// source values > binarize_threshold become 1. image_id is the file stem.
inline BinaryMask load_mask(const fs::path& path, int binarize_threshold = 0) {
  if (binarize_threshold < 0 || binarize_threshold > 255) {
    throw ValidationError("binarize threshold " + std::to_string(binarize_threshold) +
                          " outside 0..255");
  }
  if (!fs::exists(path)) throw IoError(path.string() + ": no such file");
  const auto ext = detail::lower_extension(path);
  detail::GrayImage img;
  if (ext == ".png") {
    img = detail::read_png(path);
  } else if (ext == ".pgm") {
    img = detail::read_pgm(path);
  } else {
    throw ValidationError(path.string() + ": unsupported mask format '" + ext + "'");
  }
  for (auto& p : img.pixels) p = p > binarize_threshold ? 1 : 0;
  return BinaryMask(img.width, img.height, std::move(img.pixels), path.stem().string());
}

/// Writes lake pixels as 255, background as 0. Format follows the extension.
inline void save_mask(const BinaryMask& mask, const fs::path& path) {
  if (path.has_parent_path() && !fs::is_directory(path.parent_path())) {
    throw IoError(path.string() + ": parent directory does not exist");
  }
  detail::GrayImage img{mask.width(), mask.height(), {}};
  img.pixels.reserve(mask.data().size());
  for (auto v : mask.data()) img.pixels.push_back(v ? 255 : 0);
  const auto ext = detail::lower_extension(path);
  if (ext == ".png") {
    detail::write_png(path, img);
  } else if (ext == ".pgm") {
    detail::write_pgm(path, img);
  } else {
    throw ValidationError(path.string() + ": unsupported mask format '" + ext + "'");
  }
}

/// Mask files directly under dir, sorted by path for a stable order.
inline std::vector<fs::path> list_mask_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_mask_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Locates <dir>/<image_id>.png or .pgm; empty path when absent.
inline fs::path find_mask_file(const fs::path& dir, const std::string& image_id) {
  for (const char* ext : {".png", ".pgm", ".PNG", ".PGM"}) {
    fs::path candidate = dir / (image_id + ext);
    if (fs::is_regular_file(candidate)) return candidate;
  }
  return {};
}

}  // namespace glakepos
