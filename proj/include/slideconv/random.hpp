#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "slideconv/tensor.hpp"

namespace slideconv {

/// Uniform values in [lo, hi] from a 64-bit Mersenne Twister.
inline std::vector<float> uniform_values(std::size_t n, std::mt19937_64& rng, float lo = -1.0f,
                                         float hi = 1.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> v(n);
  for (auto& e : v) e = dist(rng);
  return v;
}

inline Tensor2D random_tensor(std::size_t h, std::size_t w, std::mt19937_64& rng) {
  return Tensor2D(h, w, uniform_values(h * w, rng));
}

inline Filter2D random_filter(std::size_t kh, std::size_t kw, std::mt19937_64& rng) {
  return Filter2D(kh, kw, uniform_values(kh * kw, rng));
}

}  // namespace slideconv
