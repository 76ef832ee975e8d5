#pragma once

#include "slideconv/cost.hpp"
#include "slideconv/tensor.hpp"

namespace slideconv {

/// Direct ("naive") valid cross-correlation in 32-bit arithmetic. Taps are
/// accumulated in row-major (j, i) order, the order every other variant
/// reproduces.
KernelResult conv2d_reference(const Tensor2D& x, const Filter2D& f);

/// 1-D form of conv2d_reference; x must have height 1 and f must have kh 1.
KernelResult conv1d_reference(const Tensor2D& x, const Filter2D& f);

/// Same formula evaluated entirely in 64-bit arithmetic. Ground truth for
/// every kernel.
Tensor2D64 oracle_conv2d(const Tensor2D& x, const Filter2D& f);

}  // namespace slideconv
