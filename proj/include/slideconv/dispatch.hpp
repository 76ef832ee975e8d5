#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "slideconv/cost.hpp"
#include "slideconv/tensor.hpp"
#include "slideconv/vector_model.hpp"

namespace slideconv {

struct DispatchOptions {
  /// Route kw == V+1 to the generic kernel instead of the compound one.
  bool generic_at_boundary = false;
};

/// Default kernel for a kh x kw filter: Custom3 for 3x3, Custom5 for 5x5,
/// SlideGeneric for kw <= V, SlideCompound otherwise.
KernelVariant select_kernel(std::size_t kh, std::size_t kw, const VectorModel& vm,
                            DispatchOptions opts = {});

/// Whether `v` implements a kh x kw filter at lane count vm.lanes.
bool is_applicable(KernelVariant v, std::size_t kh, std::size_t kw, const VectorModel& vm) noexcept;

/// All applicable variants in enumeration order.
std::vector<KernelVariant> applicable_variants(std::size_t kh, std::size_t kw, const VectorModel& vm);

/// Runs one specific variant. Throws VariantError if it is not applicable.
KernelResult convolve(KernelVariant v, const Tensor2D& x, const Filter2D& f, const VectorModel& vm = {});

/// Runs the requested variant, or select_kernel's choice when none is given.
KernelResult convolve(const Tensor2D& x, const Filter2D& f, const VectorModel& vm = {},
                      std::optional<KernelVariant> requested = std::nullopt,
                      DispatchOptions opts = {});

}  // namespace slideconv
