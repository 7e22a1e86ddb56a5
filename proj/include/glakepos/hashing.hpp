#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "glakepos/error.hpp"

namespace glakepos {

/// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Per-item seed: platform-independent, independent of processing order.
constexpr std::uint64_t stable_seed(std::uint64_t global_seed, std::string_view key) noexcept {
  return mix64(mix64(global_seed) ^ fnv1a64(key));
}

/// Uniform value in [0,1) from the top 53 bits of a hash.
constexpr double unit_interval(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

enum class SplitPart { train, test };

inline std::string_view to_string(SplitPart p) { return p == SplitPart::train ? "train" : "test"; }

/// Hash-of-id train/test assignment: train when the id's hash falls below ratio.
inline SplitPart assign_split(std::string_view image_id, double train_ratio) {
  constexpr std::uint64_t kSplitSalt = 0x51a7e5eed0c0ffeeULL;
  return unit_interval(mix64(fnv1a64(image_id) ^ kSplitSalt)) < train_ratio ? SplitPart::train : SplitPart::test;
}

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file_bytes(path)); }

}  // namespace glakepos
