#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slideconv/cost.hpp"

namespace slideconv {

/// How the lanes of a VectorModel are executed. Scalar emulation runs each
/// lane in a plain loop; Simd maps the vector onto compiler vector types.
enum class LaneBackend { Scalar, Simd };

/// Width of the (possibly emulated) hardware vector in 32-bit lanes.
struct VectorModel {
  std::size_t lanes = 16;
  LaneBackend backend = LaneBackend::Simd;

  static bool supported_lanes(std::size_t v) noexcept {
    return v == 4 || v == 8 || v == 16 || v == 32;
  }
  /// Throws std::invalid_argument for lane counts outside {4, 8, 16, 32}.
  void validate() const;
  /// Widest filter row the generic slide kernel accepts.
  std::size_t generic_capacity() const noexcept { return lanes + 1; }
};

enum class KernelVariant { Naive, Im2colGemm, SlideGeneric, SlideCompound, Custom3, Custom5 };

inline constexpr KernelVariant kAllVariants[] = {
    KernelVariant::Naive,         KernelVariant::Im2colGemm, KernelVariant::SlideGeneric,
    KernelVariant::SlideCompound, KernelVariant::Custom3,    KernelVariant::Custom5,
};

/// Stable identifier used in CSV output and on the command line.
std::string_view to_string(KernelVariant v) noexcept;
std::optional<KernelVariant> parse_variant(std::string_view name) noexcept;
/// Plot-series family: "generic", "compound", "custom", or the variant name.
std::string_view series_name(KernelVariant v) noexcept;

std::string_view to_string(LaneBackend b) noexcept;
std::optional<LaneBackend> parse_backend(std::string_view name) noexcept;

/// Raised when a filter row is wider than the generic slide kernel supports.
class FilterWidthError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a variant is requested for a filter it does not implement.
class VariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Slides a V-lane window by `offset` over the 2V-lane concatenation a || b.
/// a and b must both hold vm.lanes values and 0 <= offset <= V. Offsets 0 and
/// V reuse an input register and are not counted as slides.
std::vector<float> slide(std::span<const float> a, std::span<const float> b, std::size_t offset,
                         const VectorModel& vm, CostCounters* cost = nullptr);

}  // namespace slideconv
