#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slideconv/vector_model.hpp"

namespace slideconv {

struct PropertyResult {
  std::string name;
  bool passed = true;
  /// Largest relative error seen (0 for exact or counter-based properties).
  double worst_error = 0;
  std::size_t cases = 0;
  std::string detail;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;

  bool all_passed() const noexcept;
  const PropertyResult* find(const std::string& name) const noexcept;
};

struct VerifyOptions {
  /// Harness self-test: corrupts one SlideGeneric output element inside the
  /// oracle-agreement property only.
  bool inject_corruption = false;
};

/// Randomized self-check of the library: oracle agreement of every variant,
/// MAC parity, slide-count laws, pooling, boundary filter widths around V,
/// delta-filter crops and scalar/SIMD bit equality. Inputs are at most 64x64.
VerifyReport verify_suite(std::uint64_t seed, std::size_t trials, const VectorModel& vm,
                          VerifyOptions opts = {});

/// Elementwise tolerance for kh*kw taps: 1e-5 * max(1, kh*kw/64).
double conv_tolerance(std::size_t kh, std::size_t kw) noexcept;

/// max |got - want| / max(1, |want|).
double max_relative_error(std::span<const float> got, std::span<const double> want) noexcept;

}  // namespace slideconv
