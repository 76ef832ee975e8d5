#include "slideconv/pooling.hpp"

#include <bit>
#include <string>
#include <vector>

#include "slideconv/detail/lanes.hpp"

namespace slideconv {

namespace {

struct Add {
  template <class B, class Vec>
  static Vec apply(const Vec& a, const Vec& b) noexcept {
    return B::add(a, b);
  }
  static float scalar(float a, float b) noexcept { return a + b; }
};

struct Max {
  template <class B, class Vec>
  static Vec apply(const Vec& a, const Vec& b) noexcept {
    return B::max(a, b);
  }
  static float scalar(float a, float b) noexcept { return a > b ? a : b; }
};

// One pass: y[i] = op(lhs[i], rhs[i + shift]) for i < n. The shifted operand
// is a slide of two hardware vectors of rhs (free when shift is a multiple
// of V).
template <class B, class Op>
std::vector<float> combine_shifted(const std::vector<float>& lhs, const std::vector<float>& rhs,
                                   std::size_t shift, std::size_t n, CostCounters& cost) {
  constexpr std::size_t V = B::lanes;
  std::vector<float> y(n);
  const std::size_t q = shift / V;
  const std::size_t o = shift % V;
  const std::size_t nvec = n / V;
  for (std::size_t v = 0; v < nvec; ++v) {
    const std::size_t base = v * V;
    const auto a = B::load(lhs.data() + base);
    const auto lo = B::load(rhs.data() + base + q * V);
    typename B::vec shifted;
    if (o == 0) {
      shifted = lo;
      cost.loads += 2;
    } else {
      const auto hi = detail::load_bounded<B>(rhs.data(), base + (q + 1) * V, rhs.size());
      shifted = B::slide(lo, hi, o);
      ++cost.slides;
      cost.loads += 3;
    }
    if (shift != 0) ++cost.slide_ops;
    B::store(y.data() + base, Op::template apply<B>(a, shifted));
  }
  for (std::size_t i = nvec * V; i < n; ++i) y[i] = Op::scalar(lhs[i], rhs[i + shift]);
  ++cost.stages;
  return y;
}

void check_window(const Tensor2D& x, std::size_t k) {
  if (x.height() != 1) throw ShapeError("sliding window pooling needs a height-1 signal");
  if (k < 1 || k > x.width()) {
    throw std::out_of_range("window width " + std::to_string(k) + " outside [1, " +
                            std::to_string(x.width()) + "]");
  }
}

template <class B>
KernelResult window_sum(const Tensor2D& x, std::size_t k) {
  const std::size_t n = x.width();
  KernelResult res{Tensor2D(1, n - k + 1), {}};
  // pow2[t] holds S_{2^t}, valid length n - 2^t + 1.
  std::vector<std::vector<float>> pow2;
  pow2.emplace_back(x.values());
  const std::size_t top = std::bit_width(k) - 1;
  for (std::size_t t = 1; t <= top; ++t) {
    const std::size_t half = std::size_t{1} << (t - 1);
    const auto& prev = pow2.back();
    pow2.push_back(combine_shifted<B, Add>(prev, prev, half, n - 2 * half + 1, res.cost));
  }
  // Binary expansion of k, largest power first.
  std::vector<float> acc = pow2[top];
  std::size_t covered = std::size_t{1} << top;
  for (std::size_t t = top; t-- > 0;) {
    if ((k >> t & 1) == 0) continue;
    const std::size_t width = covered + (std::size_t{1} << t);
    acc = combine_shifted<B, Add>(acc, pow2[t], covered, n - width + 1, res.cost);
    covered = width;
  }
  acc.resize(n - k + 1);
  std::copy(acc.begin(), acc.end(), res.output.data().begin());
  return res;
}

template <class B>
KernelResult window_max(const Tensor2D& x, std::size_t k) {
  const std::size_t n = x.width();
  KernelResult res{Tensor2D(1, n - k + 1), {}};
  std::vector<float> cur(x.values());
  const std::size_t top = std::bit_width(k) - 1;
  for (std::size_t t = 1; t <= top; ++t) {
    const std::size_t half = std::size_t{1} << (t - 1);
    cur = combine_shifted<B, Max>(cur, cur, half, n - 2 * half + 1, res.cost);
  }
  const std::size_t p = std::size_t{1} << top;
  if (p != k) {
    // Overlapping windows [i, i+p) and [i+k-p, i+k) cover [i, i+k).
    cur = combine_shifted<B, Max>(cur, cur, k - p, n - k + 1, res.cost);
  }
  cur.resize(n - k + 1);
  std::copy(cur.begin(), cur.end(), res.output.data().begin());
  return res;
}

}  // namespace

KernelResult sliding_window_sum(const Tensor2D& x, std::size_t k, const VectorModel& vm) {
  check_window(x, k);
  return detail::with_backend(vm, [&](auto tag) { return window_sum<decltype(tag)>(x, k); });
}

KernelResult sliding_window_max(const Tensor2D& x, std::size_t k, const VectorModel& vm) {
  check_window(x, k);
  return detail::with_backend(vm, [&](auto tag) { return window_max<decltype(tag)>(x, k); });
}

}  // namespace slideconv
