#pragma once

#include <cstdint>

#include "slideconv/tensor.hpp"

namespace slideconv {

/// Exact, deterministic operation counts for one kernel invocation.
struct CostCounters {
  std::uint64_t macs = 0;
  /// Vector slides at an offset other than 0 or V (real cross-lane shuffles).
  std::uint64_t slides = 0;
  /// Every per-hardware-vector slide issued, free offsets included.
  std::uint64_t slide_ops = 0;
  std::uint64_t loads = 0;
  /// Elements written by im2col; zero for every variant except the GEMM path.
  std::uint64_t im2col_elems = 0;
  /// Slide-and-combine passes made by the pooling primitives.
  std::uint64_t stages = 0;

  CostCounters& operator+=(const CostCounters& o) noexcept {
    macs += o.macs;
    slides += o.slides;
    slide_ops += o.slide_ops;
    loads += o.loads;
    im2col_elems += o.im2col_elems;
    stages += o.stages;
    return *this;
  }

  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

struct KernelResult {
  Tensor2D output;
  CostCounters cost;
};

/// Multiply-accumulates of a valid convolution: out_h * out_w * kh * kw.
/// Every variant performs exactly this many; FLOPs are twice this.
std::uint64_t mac_count(const ConvShape& shape) noexcept;

}  // namespace slideconv
