#include "slideconv/dispatch.hpp"

#include <string>

#include "slideconv/gemm.hpp"
#include "slideconv/reference.hpp"
#include "slideconv/slide_kernels.hpp"

namespace slideconv {

KernelVariant select_kernel(std::size_t kh, std::size_t kw, const VectorModel& vm,
                            DispatchOptions opts) {
  vm.validate();
  if (kh == 3 && kw == 3) return KernelVariant::Custom3;
  if (kh == 5 && kw == 5) return KernelVariant::Custom5;
  if (kw <= vm.lanes) return KernelVariant::SlideGeneric;
  if (kw == vm.lanes + 1 && opts.generic_at_boundary) return KernelVariant::SlideGeneric;
  return KernelVariant::SlideCompound;
}

bool is_applicable(KernelVariant v, std::size_t kh, std::size_t kw, const VectorModel& vm) noexcept {
  if (kh == 0 || kw == 0 || !VectorModel::supported_lanes(vm.lanes)) return false;
  switch (v) {
    case KernelVariant::Naive:
    case KernelVariant::Im2colGemm:
      return true;
    case KernelVariant::SlideGeneric:
      return kw <= vm.generic_capacity();
    case KernelVariant::SlideCompound:
      return kw >= 2;
    case KernelVariant::Custom3:
      return kh == 3 && kw == 3;
    case KernelVariant::Custom5:
      return kh == 5 && kw == 5;
  }
  return false;
}

std::vector<KernelVariant> applicable_variants(std::size_t kh, std::size_t kw,
                                               const VectorModel& vm) {
  std::vector<KernelVariant> out;
  for (auto v : kAllVariants) {
    if (is_applicable(v, kh, kw, vm)) out.push_back(v);
  }
  return out;
}

KernelResult convolve(KernelVariant v, const Tensor2D& x, const Filter2D& f, const VectorModel& vm) {
  vm.validate();
  if (!is_applicable(v, f.kh(), f.kw(), vm)) {
    throw VariantError(std::string(to_string(v)) + " does not support a " +
                       std::to_string(f.kh()) + "x" + std::to_string(f.kw()) + " filter at " +
                       std::to_string(vm.lanes) + " lanes");
  }
  switch (v) {
    case KernelVariant::Naive:
      return conv2d_reference(x, f);
    case KernelVariant::Im2colGemm:
      return conv2d_im2col(x, f);
    case KernelVariant::SlideGeneric:
      return conv2d_slide_generic(x, f, vm);
    case KernelVariant::SlideCompound:
      return conv2d_slide_compound(x, f, vm);
    case KernelVariant::Custom3:
      return conv2d_custom3(x, f, vm);
    case KernelVariant::Custom5:
      return conv2d_custom5(x, f, vm);
  }
  throw VariantError("unknown kernel variant");
}

KernelResult convolve(const Tensor2D& x, const Filter2D& f, const VectorModel& vm,
                      std::optional<KernelVariant> requested, DispatchOptions opts) {
  const auto v = requested.value_or(select_kernel(f.kh(), f.kw(), vm, opts));
  return convolve(v, x, f, vm);
}

}  // namespace slideconv
