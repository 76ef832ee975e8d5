#include "slideconv/slide_kernels.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "slideconv/detail/lanes.hpp"

namespace slideconv {

namespace {

using detail::load_bounded;

// Scalar epilogue for output columns [c_begin, out_w), same tap order as the
// vector body.
void scalar_tail(const Tensor2D& x, const Filter2D& f, const ConvShape& s, std::size_t c_begin,
                 Tensor2D& out, CostCounters& cost) {
  if (c_begin >= s.out_w()) return;
  for (std::size_t r = 0; r < s.out_h(); ++r) {
    for (std::size_t c = c_begin; c < s.out_w(); ++c) {
      float acc = 0.0f;
      for (std::size_t j = 0; j < s.kh; ++j) {
        const auto xr = x.row(r + j);
        const auto fr = f.row(j);
        for (std::size_t i = 0; i < s.kw; ++i) acc += fr[i] * xr[c + i];
      }
      out(r, c) = acc;
    }
  }
  cost.macs += static_cast<std::uint64_t>(s.out_h()) * (s.out_w() - c_begin) * s.kh * s.kw;
}

// U adjacent output vectors of row r starting at column c. Each accumulator
// sums its taps in the same order as a single-vector pass; interleaving only
// hides add latency.
template <class B, std::size_t U>
void generic_block(const Tensor2D& x, const Filter2D& f, const ConvShape& s, std::size_t r,
                   std::size_t c, float* out_row) {
  constexpr std::size_t V = B::lanes;
  std::array<typename B::vec, U> acc;
  acc.fill(B::zero());
  for (std::size_t j = 0; j < s.kh; ++j) {
    const float* xr = x.row(r + j).data();
    const float* fr = f.row(j).data();
    std::array<typename B::vec, U> a, b;
    for (std::size_t u = 0; u < U; ++u) {
      a[u] = B::load(xr + c + u * V);
      acc[u] = B::add(acc[u], B::mul(B::broadcast(fr[0]), a[u]));
    }
    if (s.kw == 1) continue;
    for (std::size_t u = 0; u < U; ++u) b[u] = load_bounded<B>(xr, c + (u + 1) * V, s.in_w);
    for (std::size_t i = 1; i < s.kw; ++i) {
      const auto w = B::broadcast(fr[i]);
      for (std::size_t u = 0; u < U; ++u) {
        const auto slid = i == V ? b[u] : B::slide(a[u], b[u], i);
        acc[u] = B::add(acc[u], B::mul(w, slid));
      }
    }
  }
  for (std::size_t u = 0; u < U; ++u) B::store(out_row + c + u * V, acc[u]);
}

template <class B>
KernelResult generic_impl(const Tensor2D& x, const Filter2D& f) {
  constexpr std::size_t V = B::lanes;
  constexpr std::size_t kUnroll = 4;
  const auto s = ConvShape::of(x, f);
  if (s.kw > V + 1) {
    throw FilterWidthError("filter width " + std::to_string(s.kw) +
                           " exceeds the generic slide capacity " + std::to_string(V + 1) +
                           "; use the compound kernel");
  }
  KernelResult res{Tensor2D(s.out_h(), s.out_w()), {}};
  const std::size_t nvec = s.out_w() / V;

  for (std::size_t r = 0; r < s.out_h(); ++r) {
    float* out_row = res.output.row(r).data();
    std::size_t v = 0;
    for (; v + kUnroll <= nvec; v += kUnroll) generic_block<B, kUnroll>(x, f, s, r, v * V, out_row);
    for (; v < nvec; ++v) generic_block<B, 1>(x, f, s, r, v * V, out_row);
  }

  // Per output vector and filter row: one or two loads, kw-1 slide steps of
  // which offset V (a plain load) is free.
  CostCounters& cost = res.cost;
  const std::uint64_t vec_rows = static_cast<std::uint64_t>(s.out_h()) * nvec * s.kh;
  cost.loads += vec_rows * (s.kw == 1 ? 1 : 2);
  cost.slide_ops += vec_rows * (s.kw - 1);
  cost.slides += vec_rows * (s.kw - 1 - (s.kw == V + 1 ? 1 : 0));
  cost.macs += vec_rows * V * s.kw;
  scalar_tail(x, f, s, nvec * V, res.output, cost);
  return res;
}

// One block of M output vectors of output row r starting at column c0.
// Input lanes are read as windows of M+1 hardware vectors, one window per
// whole-vector shift q; tap i = q*V + o slides every window pair (t, t+1) by o.
template <class B, std::size_t M>
void compound_block(const Tensor2D& x, const Filter2D& f, const ConvShape& s, std::size_t r,
                    std::size_t c0, float* out_row, CostCounters& cost) {
  constexpr std::size_t V = B::lanes;
  std::array<typename B::vec, M> acc;
  for (auto& a : acc) a = B::zero();
  const std::size_t shifts = (s.kw + V - 1) / V;

  for (std::size_t j = 0; j < s.kh; ++j) {
    const float* xr = x.row(r + j).data();
    const float* fr = f.row(j).data();
    for (std::size_t q = 0; q < shifts; ++q) {
      const std::size_t taps = std::min(V, s.kw - q * V);
      std::array<typename B::vec, M + 1> win;
      for (std::size_t t = 0; t < M; ++t) win[t] = B::load(xr + c0 + (q + t) * V);
      // The last window vector only feeds nonzero offsets.
      win[M] = taps > 1 ? load_bounded<B>(xr, c0 + (q + M) * V, s.in_w) : B::zero();
      cost.loads += taps > 1 ? M + 1 : M;

      const auto w0 = B::broadcast(fr[q * V]);
      for (std::size_t t = 0; t < M; ++t) acc[t] = B::add(acc[t], B::mul(w0, win[t]));
      for (std::size_t o = 1; o < taps; ++o) {
        const auto w = B::broadcast(fr[q * V + o]);
        for (std::size_t t = 0; t < M; ++t) {
          acc[t] = B::add(acc[t], B::mul(w, B::slide(win[t], win[t + 1], o)));
        }
      }
      // Tap q*V (q >= 1) is a whole-vector shift: M free slide micro-ops.
      cost.slide_ops += M * (q == 0 ? taps - 1 : taps);
      cost.slides += M * (taps - 1);
    }
  }
  for (std::size_t t = 0; t < M; ++t) B::store(out_row + c0 + t * V, acc[t]);
}

template <class B, std::size_t... Ms>
void compound_dispatch(std::size_t m, std::index_sequence<Ms...>, const Tensor2D& x,
                       const Filter2D& f, const ConvShape& s, std::size_t r, std::size_t c0,
                       float* out_row, CostCounters& cost) {
  ((m == Ms + 1 ? compound_block<B, Ms + 1>(x, f, s, r, c0, out_row, cost) : void()), ...);
}

constexpr std::size_t kMaxBlockVectors = 8;

template <class B>
KernelResult compound_impl(const Tensor2D& x, const Filter2D& f) {
  constexpr std::size_t V = B::lanes;
  const auto s = ConvShape::of(x, f);
  if (s.kw < 2) throw VariantError("compound kernel needs a filter width of at least 2");
  KernelResult res{Tensor2D(s.out_h(), s.out_w()), {}};
  const std::size_t nvec = s.out_w() / V;
  // Wide filters exceed the register budget; their blocks are split, which
  // leaves the per-output-vector slide count unchanged.
  const std::size_t m = std::min(compound_width(s.kw, V), kMaxBlockVectors);

  for (std::size_t r = 0; r < s.out_h(); ++r) {
    float* out_row = res.output.row(r).data();
    for (std::size_t v = 0; v < nvec; v += m) {
      const std::size_t block = std::min(m, nvec - v);
      compound_dispatch<B>(block, std::make_index_sequence<kMaxBlockVectors>{}, x, f, s, r, v * V,
                           out_row, res.cost);
    }
  }
  res.cost.macs += static_cast<std::uint64_t>(s.out_h()) * nvec * V * s.kh * s.kw;
  scalar_tail(x, f, s, nvec * V, res.output, res.cost);
  return res;
}

// Rolling-row kernel for a K x K filter. Every input row is loaded and slid
// once per output vector column; the K slid vectors are multiplied into the
// K output rows that use that input row. acc[t] holds output row y-(K-1)+t,
// which receives filter row K-1-t from input row y.
template <class B, std::size_t K>
KernelResult custom_impl(const Tensor2D& x, const Filter2D& f) {
  constexpr std::size_t V = B::lanes;
  static_assert(K - 1 <= V, "custom kernels slide within two hardware vectors");
  if (f.kh() != K || f.kw() != K) {
    throw VariantError("custom" + std::to_string(K) + " kernel needs a " + std::to_string(K) +
                       "x" + std::to_string(K) + " filter, got " + std::to_string(f.kh()) + "x" +
                       std::to_string(f.kw()));
  }
  const auto s = ConvShape::of(x, f);
  KernelResult res{Tensor2D(s.out_h(), s.out_w()), {}};
  CostCounters& cost = res.cost;
  const std::size_t nvec = s.out_w() / V;
  const std::size_t out_h = s.out_h();

  std::array<std::array<typename B::vec, K>, K> w;
  for (std::size_t j = 0; j < K; ++j) {
    for (std::size_t i = 0; i < K; ++i) w[j][i] = B::broadcast(f(j, i));
  }

  for (std::size_t v = 0; v < nvec; ++v) {
    const std::size_t c = v * V;
    std::array<typename B::vec, K> acc;
    for (auto& a : acc) a = B::zero();

    for (std::size_t y = 0; y < s.in_h; ++y) {
      const float* xr = x.row(y).data();
      std::array<typename B::vec, K> slid;
      slid[0] = B::load(xr + c);
      const auto b = load_bounded<B>(xr, c + V, s.in_w);
      cost.loads += 2;
      for (std::size_t i = 1; i < K; ++i) {
        slid[i] = i == V ? b : B::slide(slid[0], b, i);
        cost.slides += i != V;
      }
      cost.slide_ops += K - 1;

      for (std::size_t t = 0; t < K; ++t) {
        // Output row y-(K-1)+t, guarded against the top and bottom edges.
        if (y + t < K - 1 || y + t - (K - 1) >= out_h) continue;
        const std::size_t j = K - 1 - t;
        for (std::size_t i = 0; i < K; ++i) acc[t] = B::add(acc[t], B::mul(w[j][i], slid[i]));
      }
      if (y >= K - 1) B::store(res.output.row(y - (K - 1)).data() + c, acc[0]);
      for (std::size_t t = 0; t + 1 < K; ++t) acc[t] = acc[t + 1];
      acc[K - 1] = B::zero();
    }
  }
  cost.macs += static_cast<std::uint64_t>(out_h) * nvec * V * K * K;
  scalar_tail(x, f, s, nvec * V, res.output, cost);
  return res;
}

}  // namespace

std::size_t compound_width(std::size_t kw, std::size_t lanes) noexcept {
  return (lanes + kw - 1 + lanes - 1) / lanes;
}

KernelResult conv1d_slide(const Tensor2D& x, const Filter2D& f, const VectorModel& vm) {
  if (x.height() != 1) throw ShapeError("1-D convolution needs a height-1 signal");
  if (f.kh() != 1) throw ShapeError("1-D convolution needs a filter with kh == 1");
  return conv2d_slide_generic(x, f, vm);
}

KernelResult conv2d_slide_generic(const Tensor2D& x, const Filter2D& f, const VectorModel& vm) {
  return detail::with_backend(vm, [&](auto tag) { return generic_impl<decltype(tag)>(x, f); });
}

KernelResult conv2d_slide_compound(const Tensor2D& x, const Filter2D& f, const VectorModel& vm) {
  return detail::with_backend(vm, [&](auto tag) { return compound_impl<decltype(tag)>(x, f); });
}

KernelResult conv2d_custom3(const Tensor2D& x, const Filter2D& f, const VectorModel& vm) {
  return detail::with_backend(vm, [&](auto tag) { return custom_impl<decltype(tag), 3>(x, f); });
}

KernelResult conv2d_custom5(const Tensor2D& x, const Filter2D& f, const VectorModel& vm) {
  return detail::with_backend(vm, [&](auto tag) { return custom_impl<decltype(tag), 5>(x, f); });
}

}  // namespace slideconv
