#include "slideconv/vector_model.hpp"

#include <array>
#include <utility>

#include "slideconv/detail/lanes.hpp"

namespace slideconv {

void VectorModel::validate() const {
  if (!supported_lanes(lanes)) {
    throw std::invalid_argument("vector lanes must be one of 4, 8, 16, 32 (got " +
                                std::to_string(lanes) + ")");
  }
}

namespace {

constexpr std::array<std::pair<KernelVariant, std::string_view>, 6> kVariantNames{{
    {KernelVariant::Naive, "naive"},
    {KernelVariant::Im2colGemm, "im2col_gemm"},
    {KernelVariant::SlideGeneric, "slide_generic"},
    {KernelVariant::SlideCompound, "slide_compound"},
    {KernelVariant::Custom3, "custom3"},
    {KernelVariant::Custom5, "custom5"},
}};

}  // namespace

std::string_view to_string(KernelVariant v) noexcept {
  for (const auto& [variant, name] : kVariantNames) {
    if (variant == v) return name;
  }
  return "unknown";
}

std::optional<KernelVariant> parse_variant(std::string_view name) noexcept {
  for (const auto& [variant, n] : kVariantNames) {
    if (n == name) return variant;
  }
  return std::nullopt;
}

std::string_view series_name(KernelVariant v) noexcept {
  switch (v) {
    case KernelVariant::SlideGeneric:
      return "generic";
    case KernelVariant::SlideCompound:
      return "compound";
    case KernelVariant::Custom3:
    case KernelVariant::Custom5:
      return "custom";
    default:
      return to_string(v);
  }
}

std::string_view to_string(LaneBackend b) noexcept {
  return b == LaneBackend::Scalar ? "scalar" : "simd";
}

std::optional<LaneBackend> parse_backend(std::string_view name) noexcept {
  if (name == "scalar") return LaneBackend::Scalar;
  if (name == "simd") return LaneBackend::Simd;
  return std::nullopt;
}

std::vector<float> slide(std::span<const float> a, std::span<const float> b, std::size_t offset,
                         const VectorModel& vm, CostCounters* cost) {
  vm.validate();
  if (a.size() != vm.lanes || b.size() != vm.lanes) {
    throw ShapeError("slide operands must hold exactly " + std::to_string(vm.lanes) + " lanes");
  }
  if (offset > vm.lanes) {
    throw std::out_of_range("slide offset " + std::to_string(offset) + " exceeds lane count " +
                            std::to_string(vm.lanes));
  }
  if (cost != nullptr) {
    ++cost->slide_ops;
    if (offset != 0 && offset != vm.lanes) ++cost->slides;
  }
  return detail::with_backend(vm, [&](auto tag) {
    using B = decltype(tag);
    std::vector<float> out(B::lanes);
    B::store(out.data(), B::slide(B::load(a.data()), B::load(b.data()), offset));
    return out;
  });
}

}  // namespace slideconv
