#include "slideconv/gemm.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

namespace slideconv {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<float> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != r * c) throw ShapeError("matrix data length does not match its dimensions");
}

namespace {

// Block sizes: an MC x KC panel of A stays in L2, a KC x NR sliver of B in L1.
constexpr std::size_t kMR = 16;
constexpr std::size_t kNR = 4;
constexpr std::size_t kMC = 256;
constexpr std::size_t kKC = 256;
constexpr std::size_t kNC = 512;

// A block packed as ceil(mc/MR) panels, each kc x MR, zero padded.
void pack_a(const Matrix& a, std::size_t ic, std::size_t mc, std::size_t pc, std::size_t kc,
            std::vector<float>& buf) {
  const std::size_t panels = (mc + kMR - 1) / kMR;
  buf.assign(panels * kc * kMR, 0.0f);
  for (std::size_t p = 0; p < panels; ++p) {
    float* dst = buf.data() + p * kc * kMR;
    const std::size_t rows = std::min(kMR, mc - p * kMR);
    for (std::size_t m = 0; m < rows; ++m) {
      const float* src = a.data.data() + (ic + p * kMR + m) * a.cols + pc;
      for (std::size_t k = 0; k < kc; ++k) dst[k * kMR + m] = src[k];
    }
  }
}

// B block packed as ceil(nc/NR) panels, each kc x NR, zero padded.
void pack_b(const Matrix& b, std::size_t pc, std::size_t kc, std::size_t jc, std::size_t nc,
            std::vector<float>& buf) {
  const std::size_t panels = (nc + kNR - 1) / kNR;
  buf.assign(panels * kc * kNR, 0.0f);
  for (std::size_t p = 0; p < panels; ++p) {
    float* dst = buf.data() + p * kc * kNR;
    const std::size_t cols = std::min(kNR, nc - p * kNR);
    for (std::size_t k = 0; k < kc; ++k) {
      const float* src = b.data.data() + (pc + k) * b.cols + jc + p * kNR;
      for (std::size_t n = 0; n < cols; ++n) dst[k * kNR + n] = src[n];
    }
  }
}

// C[0..mr, 0..NR) += Apanel * Bpanel with k ascending. The accumulator starts
// from the current C values, so splitting K into blocks keeps the per-element
// summation order.
template <std::size_t NR>
void micro_kernel(std::size_t kc, const float* ap, const float* bp, float* c, std::size_t ldc,
                  std::size_t mr) {
  std::array<std::array<float, kMR>, NR> acc{};
  for (std::size_t n = 0; n < NR; ++n) {
    for (std::size_t m = 0; m < mr; ++m) acc[n][m] = c[m * ldc + n];
  }
  for (std::size_t k = 0; k < kc; ++k) {
    const float* a = ap + k * kMR;
    const float* b = bp + k * kNR;
    for (std::size_t n = 0; n < NR; ++n) {
      const float bn = b[n];
      for (std::size_t m = 0; m < kMR; ++m) acc[n][m] += a[m] * bn;
    }
  }
  for (std::size_t n = 0; n < NR; ++n) {
    for (std::size_t m = 0; m < mr; ++m) c[m * ldc + n] = acc[n][m];
  }
}

void run_micro_kernel(std::size_t nr, std::size_t kc, const float* ap, const float* bp, float* c,
                      std::size_t ldc, std::size_t mr) {
  switch (nr) {
    case 1:
      return micro_kernel<1>(kc, ap, bp, c, ldc, mr);
    case 2:
      return micro_kernel<2>(kc, ap, bp, c, ldc, mr);
    case 3:
      return micro_kernel<3>(kc, ap, bp, c, ldc, mr);
    default:
      return micro_kernel<4>(kc, ap, bp, c, ldc, mr);
  }
}

}  // namespace

namespace {

std::size_t im2col_rows(const ConvShape& shape, std::size_t cols) {
  const std::size_t rows = shape.out_h() * shape.out_w();
  if (cols != 0 && rows > std::numeric_limits<std::size_t>::max() / sizeof(float) / cols) {
    throw AllocationError("im2col matrix size overflows");
  }
  return rows;
}

void resize_im2col(Matrix& m, std::size_t rows, std::size_t cols) {
  try {
    m.data.resize(rows * cols);
  } catch (const std::bad_alloc&) {
    throw AllocationError("cannot allocate " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " im2col matrix");
  }
  m.rows = rows;
  m.cols = cols;
}

void fill_im2col(const Tensor2D& x, const ConvShape& shape, Matrix& m) {
  const std::size_t kh = shape.kh, kw = shape.kw, cols = m.cols;
  for (std::size_t r = 0; r < shape.out_h(); ++r) {
    for (std::size_t c = 0; c < shape.out_w(); ++c) {
      float* dst = m.data.data() + (r * shape.out_w() + c) * cols;
      for (std::size_t j = 0; j < kh; ++j) {
        const auto src = x.row(r + j).subspan(c, kw);
        std::copy(src.begin(), src.end(), dst + j * kw);
      }
    }
  }
}

}  // namespace

Matrix im2col_2d(const Tensor2D& x, std::size_t kh, std::size_t kw, CostCounters& cost) {
  const auto shape = ConvShape::make(x.height(), x.width(), kh, kw);
  const std::size_t cols = kh * kw;
  const std::size_t rows = im2col_rows(shape, cols);
  Matrix m;
  resize_im2col(m, rows, cols);
  fill_im2col(x, shape, m);
  cost.im2col_elems += static_cast<std::uint64_t>(rows) * cols;
  return m;
}

Matrix gemm(const Matrix& a, const Matrix& b, CostCounters& cost) {
  if (a.cols != b.rows) {
    throw ShapeError("gemm inner dimensions differ: " + std::to_string(a.cols) + " vs " +
                     std::to_string(b.rows));
  }
  const std::size_t M = a.rows, N = b.cols, K = a.cols;
  Matrix c(M, N);
  std::vector<float> apack, bpack;
  for (std::size_t jc = 0; jc < N; jc += kNC) {
    const std::size_t nc = std::min(kNC, N - jc);
    for (std::size_t pc = 0; pc < K; pc += kKC) {
      const std::size_t kc = std::min(kKC, K - pc);
      pack_b(b, pc, kc, jc, nc, bpack);
      for (std::size_t ic = 0; ic < M; ic += kMC) {
        const std::size_t mc = std::min(kMC, M - ic);
        pack_a(a, ic, mc, pc, kc, apack);
        for (std::size_t jr = 0; jr < nc; jr += kNR) {
          const std::size_t nr = std::min(kNR, nc - jr);
          const float* bp = bpack.data() + (jr / kNR) * kc * kNR;
          for (std::size_t ir = 0; ir < mc; ir += kMR) {
            const std::size_t mr = std::min(kMR, mc - ir);
            const float* ap = apack.data() + (ir / kMR) * kc * kMR;
            float* cp = c.data.data() + (ic + ir) * N + jc + jr;
            run_micro_kernel(nr, kc, ap, bp, cp, N, mr);
          }
        }
      }
    }
  }
  cost.macs += static_cast<std::uint64_t>(M) * N * K;
  return c;
}

KernelResult conv2d_im2col(const Tensor2D& x, const Filter2D& f) {
  const auto shape = ConvShape::of(x, f);
  CostCounters cost;
  // Working buffer reused across calls, like a caller-provided GEMM workspace.
  thread_local Matrix cols;
  const std::size_t n = f.size();
  resize_im2col(cols, im2col_rows(shape, n), n);
  fill_im2col(x, shape, cols);
  cost.im2col_elems += static_cast<std::uint64_t>(cols.rows) * n;
  const Matrix taps(f.size(), 1, std::vector<float>(f.taps().begin(), f.taps().end()));
  Matrix y = gemm(cols, taps, cost);
  return {Tensor2D(shape.out_h(), shape.out_w(), std::move(y.data)), cost};
}

double bloat_ratio(const ConvShape& s) noexcept {
  return static_cast<double>(mac_count(s)) / (static_cast<double>(s.in_h) * s.in_w);
}

}  // namespace slideconv
