#include "slideconv/tensor.hpp"

#include <string>

#include "slideconv/cost.hpp"

namespace slideconv {

Filter2D::Filter2D(std::size_t kh, std::size_t kw, std::vector<float> taps)
    : kh_(kh), kw_(kw), taps_(std::move(taps)) {
  if (kh == 0 || kw == 0) throw ShapeError("filter dimensions must be positive");
  if (taps_.size() != kh * kw) {
    throw ShapeError("filter has " + std::to_string(taps_.size()) + " taps, expected " +
                     std::to_string(kh) + "x" + std::to_string(kw));
  }
}

Filter2D Filter2D::ones(std::size_t kh, std::size_t kw) {
  return Filter2D(kh, kw, std::vector<float>(kh * kw, 1.0f));
}

Filter2D Filter2D::delta(std::size_t kh, std::size_t kw) {
  std::vector<float> taps(kh * kw, 0.0f);
  taps[(kh / 2) * kw + kw / 2] = 1.0f;
  return Filter2D(kh, kw, std::move(taps));
}

Filter2D Filter2D::row_vector(std::vector<float> taps) {
  const auto n = taps.size();
  return Filter2D(1, n, std::move(taps));
}

ConvShape ConvShape::make(std::size_t in_h, std::size_t in_w, std::size_t kh, std::size_t kw) {
  if (in_h == 0 || in_w == 0 || kh == 0 || kw == 0) {
    throw ShapeError("convolution dimensions must be positive");
  }
  if (kh > in_h || kw > in_w) {
    throw ShapeError("filter " + std::to_string(kh) + "x" + std::to_string(kw) +
                     " exceeds input " + std::to_string(in_h) + "x" + std::to_string(in_w));
  }
  return ConvShape{in_h, in_w, kh, kw};
}

std::uint64_t mac_count(const ConvShape& s) noexcept {
  return static_cast<std::uint64_t>(s.out_h()) * s.out_w() * s.kh * s.kw;
}

}  // namespace slideconv
