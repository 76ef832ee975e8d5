#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slideconv {

/// Raised when tensor, filter or matrix dimensions are inconsistent.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Row-major single-channel 2-D array. A height of 1 represents a 1-D signal.
template <typename T>
class BasicTensor2D {
 public:
  using value_type = T;

  BasicTensor2D(std::size_t height, std::size_t width)
      : height_(height), width_(width), data_(checked_size(height, width)) {}

  BasicTensor2D(std::size_t height, std::size_t width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (data_.size() != checked_size(height, width)) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(height) + "x" +
                       std::to_string(width));
    }
  }

  /// Height-1 tensor holding a 1-D signal.
  static BasicTensor2D row_vector(std::vector<T> data) {
    const auto n = data.size();
    return BasicTensor2D(1, n, std::move(data));
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::span<T> row(std::size_t r) noexcept {
    return {data_.data() + r * width_, width_};
  }
  std::span<const T> row(std::size_t r) const noexcept {
    return {data_.data() + r * width_, width_};
  }

  T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * width_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * width_ + c];
  }

  const std::vector<T>& values() const noexcept { return data_; }

  friend bool operator==(const BasicTensor2D&, const BasicTensor2D&) = default;

 private:
  static std::size_t checked_size(std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) {
      throw ShapeError("tensor dimensions must be positive");
    }
    return height * width;
  }

  std::size_t height_;
  std::size_t width_;
  std::vector<T> data_;
};

using Tensor2D = BasicTensor2D<float>;
using Tensor2D64 = BasicTensor2D<double>;

/// kh x kw filter taps, row-major. Applied as cross-correlation (no flip).
class Filter2D {
 public:
  Filter2D(std::size_t kh, std::size_t kw, std::vector<float> taps);

  static Filter2D ones(std::size_t kh, std::size_t kw);
  /// Single unit tap at the centre (kh, kw odd) or at (kh/2, kw/2).
  static Filter2D delta(std::size_t kh, std::size_t kw);
  static Filter2D row_vector(std::vector<float> taps);

  std::size_t kh() const noexcept { return kh_; }
  std::size_t kw() const noexcept { return kw_; }
  std::size_t size() const noexcept { return taps_.size(); }

  float operator()(std::size_t j, std::size_t i) const noexcept { return taps_[j * kw_ + i]; }
  std::span<const float> taps() const noexcept { return taps_; }
  std::span<const float> row(std::size_t j) const noexcept {
    return {taps_.data() + j * kw_, kw_};
  }

 private:
  std::size_t kh_;
  std::size_t kw_;
  std::vector<float> taps_;
};

/// Geometry of a valid, stride-1, undilated convolution.
struct ConvShape {
  std::size_t in_h = 0;
  std::size_t in_w = 0;
  std::size_t kh = 0;
  std::size_t kw = 0;

  /// Throws ShapeError when the filter does not fit inside the input.
  static ConvShape make(std::size_t in_h, std::size_t in_w, std::size_t kh, std::size_t kw);
  static ConvShape of(const Tensor2D& x, const Filter2D& f) {
    return make(x.height(), x.width(), f.kh(), f.kw());
  }

  std::size_t out_h() const noexcept { return in_h - kh + 1; }
  std::size_t out_w() const noexcept { return in_w - kw + 1; }

  friend bool operator==(const ConvShape&, const ConvShape&) = default;
};

}  // namespace slideconv
