#pragma once

#include <cstddef>
#include <new>
#include <span>
#include <stdexcept>
#include <vector>

#include "slideconv/cost.hpp"
#include "slideconv/tensor.hpp"

namespace slideconv {

/// The column matrix did not fit in memory.
class AllocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major 32-bit matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}
  Matrix(std::size_t r, std::size_t c, std::vector<float> values);

  float& operator()(std::size_t r, std::size_t c) noexcept { return data[r * cols + c]; }
  float operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
  std::span<const float> row(std::size_t r) const noexcept { return {data.data() + r * cols, cols}; }
};

/// Expands every kh x kw patch of x into one row of an (out_h*out_w) x (kh*kw)
/// matrix. The full matrix is materialized. Adds rows*cols to
/// cost.im2col_elems.
Matrix im2col_2d(const Tensor2D& x, std::size_t kh, std::size_t kw, CostCounters& cost);

/// Cache-blocked C = A * B with packed panels. For every output element the
/// products are accumulated in ascending k. Adds M*N*K to cost.macs.
Matrix gemm(const Matrix& a, const Matrix& b, CostCounters& cost);

/// Convolution through im2col followed by gemm against the (kh*kw) x 1 filter.
KernelResult conv2d_im2col(const Tensor2D& x, const Filter2D& f);

/// Column-matrix elements per input element: out_h*out_w*kh*kw / (in_h*in_w).
double bloat_ratio(const ConvShape& shape) noexcept;

}  // namespace slideconv
