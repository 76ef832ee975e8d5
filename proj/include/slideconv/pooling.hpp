#pragma once

#include <cstddef>

#include "slideconv/cost.hpp"
#include "slideconv/tensor.hpp"
#include "slideconv/vector_model.hpp"

namespace slideconv {

/// y[i] = x[i] + ... + x[i+k-1] over a height-1 signal, built by doubling
/// (S_2t(i) = S_t(i) + S_t(i+t)) and then combining the powers of two in the
/// binary expansion of k, largest first. cost.stages counts slide-and-add
/// passes and never exceeds 2*ceil(log2 k).
KernelResult sliding_window_sum(const Tensor2D& x, std::size_t k, const VectorModel& vm = {});

/// y[i] = max(x[i], ..., x[i+k-1]). Exact; overlapping windows are combined
/// since max is idempotent. At most ceil(log2 k) passes.
KernelResult sliding_window_max(const Tensor2D& x, std::size_t k, const VectorModel& vm = {});

}  // namespace slideconv
