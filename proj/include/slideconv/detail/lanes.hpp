#pragma once

// Lane backends the kernels are written against. Both expose the same static
// interface; a kernel instantiated on either computes the same per-lane IEEE
// operations in the same order, so results are bit-identical as long as the
// compiler does not contract multiply-add pairs.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <utility>

#include "slideconv/vector_model.hpp"

namespace slideconv::detail {

template <std::size_t V>
struct ScalarLanes {
  static constexpr std::size_t lanes = V;
  static constexpr LaneBackend backend = LaneBackend::Scalar;

  struct vec {
    std::array<float, V> v;
  };

  static vec zero() noexcept { return vec{}; }

  static vec load(const float* p) noexcept {
    vec r;
    std::copy_n(p, V, r.v.begin());
    return r;
  }

  static vec load_partial(const float* p, std::size_t n) noexcept {
    vec r{};
    std::copy_n(p, n, r.v.begin());
    return r;
  }

  static void store(float* p, const vec& a) noexcept { std::copy_n(a.v.begin(), V, p); }

  static vec broadcast(float s) noexcept {
    vec r;
    r.v.fill(s);
    return r;
  }

  static vec add(const vec& a, const vec& b) noexcept {
    vec r;
    for (std::size_t l = 0; l < V; ++l) r.v[l] = a.v[l] + b.v[l];
    return r;
  }

  static vec mul(const vec& a, const vec& b) noexcept {
    vec r;
    for (std::size_t l = 0; l < V; ++l) r.v[l] = a.v[l] * b.v[l];
    return r;
  }

  static vec max(const vec& a, const vec& b) noexcept {
    vec r;
    for (std::size_t l = 0; l < V; ++l) r.v[l] = a.v[l] > b.v[l] ? a.v[l] : b.v[l];
    return r;
  }

  /// Lanes offset .. offset+V-1 of a || b, 0 <= offset <= V.
  static vec slide(const vec& a, const vec& b, std::size_t offset) noexcept {
    vec r;
    for (std::size_t l = 0; l < V; ++l) {
      const std::size_t idx = l + offset;
      r.v[l] = idx < V ? a.v[idx] : b.v[idx - V];
    }
    return r;
  }

  static float lane(const vec& a, std::size_t l) noexcept { return a.v[l]; }
};

// GCC drops vector_size on template-dependent aliases, so each width gets a
// concrete typedef.
typedef float f32x4 __attribute__((vector_size(16)));
typedef float f32x8 __attribute__((vector_size(32)));
typedef float f32x16 __attribute__((vector_size(64)));
typedef float f32x32 __attribute__((vector_size(128)));
typedef std::int32_t i32x4 __attribute__((vector_size(16)));
typedef std::int32_t i32x8 __attribute__((vector_size(32)));
typedef std::int32_t i32x16 __attribute__((vector_size(64)));
typedef std::int32_t i32x32 __attribute__((vector_size(128)));

template <std::size_t V>
struct simd_types;
template <>
struct simd_types<4> {
  using vec = f32x4;
  using index_vec = i32x4;
};
template <>
struct simd_types<8> {
  using vec = f32x8;
  using index_vec = i32x8;
};
template <>
struct simd_types<16> {
  using vec = f32x16;
  using index_vec = i32x16;
};
template <>
struct simd_types<32> {
  using vec = f32x32;
  using index_vec = i32x32;
};

template <std::size_t V>
struct SimdLanes {
  static constexpr std::size_t lanes = V;
  static constexpr LaneBackend backend = LaneBackend::Simd;

  using vec = typename simd_types<V>::vec;
  using index_vec = typename simd_types<V>::index_vec;

  static vec zero() noexcept { return vec{}; }

  static vec load(const float* p) noexcept {
    vec r;
    std::memcpy(&r, p, sizeof(vec));
    return r;
  }

  static vec load_partial(const float* p, std::size_t n) noexcept {
    vec r{};
    std::memcpy(&r, p, n * sizeof(float));
    return r;
  }

  static void store(float* p, const vec& a) noexcept { std::memcpy(p, &a, sizeof(vec)); }

  static vec broadcast(float s) noexcept {
    vec r;
    for (std::size_t l = 0; l < V; ++l) r[l] = s;
    return r;
  }

  static vec add(const vec& a, const vec& b) noexcept { return a + b; }
  static vec mul(const vec& a, const vec& b) noexcept { return a * b; }
  static vec max(const vec& a, const vec& b) noexcept { return a > b ? a : b; }

  static vec slide(const vec& a, const vec& b, std::size_t offset) noexcept {
    return __builtin_shuffle(a, b, kSlideIndex[offset]);
  }

  static float lane(const vec& a, std::size_t l) noexcept { return a[l]; }

 private:
  static std::array<index_vec, V + 1> make_slide_index() noexcept {
    std::array<index_vec, V + 1> table{};
    for (std::size_t off = 0; off <= V; ++off) {
      for (std::size_t l = 0; l < V; ++l) table[off][l] = static_cast<std::int32_t>(l + off);
    }
    return table;
  }

  static inline const std::array<index_vec, V + 1> kSlideIndex = make_slide_index();
};

/// Loads V lanes starting at `start`, zero-filling lanes at or past `width`.
template <class B>
typename B::vec load_bounded(const float* row, std::size_t start, std::size_t width) noexcept {
  if (start + B::lanes <= width) return B::load(row + start);
  return B::load_partial(row + start, start < width ? width - start : 0);
}

/// Invokes fn with a default-constructed backend tag matching vm.
template <class Fn>
decltype(auto) with_backend(const VectorModel& vm, Fn&& fn) {
  vm.validate();
  const bool simd = vm.backend == LaneBackend::Simd;
  switch (vm.lanes) {
    case 4:
      return simd ? std::forward<Fn>(fn)(SimdLanes<4>{}) : std::forward<Fn>(fn)(ScalarLanes<4>{});
    case 8:
      return simd ? std::forward<Fn>(fn)(SimdLanes<8>{}) : std::forward<Fn>(fn)(ScalarLanes<8>{});
    case 16:
      return simd ? std::forward<Fn>(fn)(SimdLanes<16>{}) : std::forward<Fn>(fn)(ScalarLanes<16>{});
    default:
      return simd ? std::forward<Fn>(fn)(SimdLanes<32>{}) : std::forward<Fn>(fn)(ScalarLanes<32>{});
  }
}

}  // namespace slideconv::detail
