#pragma once

#include <cstddef>

#include "slideconv/cost.hpp"
#include "slideconv/tensor.hpp"
#include "slideconv/vector_model.hpp"

namespace slideconv {

// Vector-slide convolution kernels. All of them read the input in place (no
// im2col), accumulate taps in row-major (j, i) order, and finish output
// columns that do not fill a whole vector with a scalar epilogue.

/// 1-D slide convolution of a height-1 signal with a 1 x kw filter.
/// Throws FilterWidthError when kw > V+1.
KernelResult conv1d_slide(const Tensor2D& x, const Filter2D& f, const VectorModel& vm = {});

/// Straightforward 2-D kernel: one output vector at a time, each filter row
/// slid across two hardware vectors. Throws FilterWidthError when kw > V+1.
KernelResult conv2d_slide_generic(const Tensor2D& x, const Filter2D& f, const VectorModel& vm = {});

/// Number of hardware vectors in the compound vector used for a kw-wide
/// filter: ceil((V + kw - 1) / V).
std::size_t compound_width(std::size_t kw, std::size_t lanes) noexcept;

/// Compound-vector 2-D kernel for any kw >= 2. Outputs are produced
/// compound_width(kw, V) hardware vectors at a time; a logical slide by j is
/// one per-hardware-vector slide per output vector, carrying lanes in from
/// the neighbouring vector.
KernelResult conv2d_slide_compound(const Tensor2D& x, const Filter2D& f, const VectorModel& vm = {});

/// 3x3 kernel that slides each input row once and feeds the slid vectors to
/// all three output rows that consume it. Throws VariantError for other sizes.
KernelResult conv2d_custom3(const Tensor2D& x, const Filter2D& f, const VectorModel& vm = {});

/// 5x5 counterpart of conv2d_custom3.
KernelResult conv2d_custom5(const Tensor2D& x, const Filter2D& f, const VectorModel& vm = {});

}  // namespace slideconv
