#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glakepos/error.hpp"

namespace glakepos {

/// Row-major H x W grid of {0,1}; 1 marks a lake pixel.
///
/// Construction validates every invariant, so a BinaryMask that exists is
/// always well formed. Instances are immutable once built.
class BinaryMask {
 public:
  BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> data,
             std::string image_id = {})
      : width_(width), height_(height), data_(std::move(data)), image_id_(std::move(image_id)) {
    if (width_ == 0 || height_ == 0) {
      throw ValidationError("mask '" + image_id_ + "' has a zero dimension");
    }
    if (data_.size() != width_ * height_) {
      throw ValidationError("mask '" + image_id_ + "' data length " + std::to_string(data_.size()) +
                            " != " + std::to_string(width_) + "x" + std::to_string(height_));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (data_[i] > 1) {
        throw ValidationError("mask '" + image_id_ + "' cell " + std::to_string(i) +
                              " holds " + std::to_string(data_[i]) + ", expected 0 or 1");
      }
    }
  }

  // All-background mask.
  static BinaryMask zeros(std::size_t width, std::size_t height, std::string image_id = {}) {
    return BinaryMask(width, height, std::vector<std::uint8_t>(width * height, 0), std::move(image_id));
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  const std::string& image_id() const noexcept { return image_id_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }

  std::uint8_t at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }

  std::size_t foreground_count() const noexcept {
    std::size_t n = 0;
    for (auto v : data_) n += v;
    return n;
  }

  BinaryMask with_id(std::string image_id) const {
    BinaryMask copy = *this;
    copy.image_id_ = std::move(image_id);
    return copy;
  }

  // Grid equality; the image id is a label, not content.
  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
  }

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> data_;
  std::string image_id_;
};

}  // namespace glakepos
