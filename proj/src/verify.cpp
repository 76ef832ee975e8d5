#include "slideconv/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "slideconv/dispatch.hpp"
#include "slideconv/pooling.hpp"
#include "slideconv/random.hpp"
#include "slideconv/reference.hpp"
#include "slideconv/slide_kernels.hpp"

namespace slideconv {

bool VerifyReport::all_passed() const noexcept {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed; });
}

const PropertyResult* VerifyReport::find(const std::string& name) const noexcept {
  for (const auto& p : properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

double conv_tolerance(std::size_t kh, std::size_t kw) noexcept {
  return 1e-5 * std::max(1.0, static_cast<double>(kh * kw) / 64.0);
}

double max_relative_error(std::span<const float> got, std::span<const double> want) noexcept {
  double worst = 0;
  for (std::size_t i = 0; i < got.size() && i < want.size(); ++i) {
    const double err = std::abs(static_cast<double>(got[i]) - want[i]) / std::max(1.0, std::abs(want[i]));
    worst = std::max(worst, std::isnan(err) ? INFINITY : err);
  }
  return worst;
}

namespace {

constexpr std::size_t kMaxDim = 64;

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string describe(KernelVariant v, std::size_t h, std::size_t w, std::size_t kh, std::size_t kw) {
  std::ostringstream os;
  os << to_string(v) << " on " << h << "x" << w << " with " << kh << "x" << kw;
  return os.str();
}

void fail(PropertyResult& p, const std::string& why) {
  if (p.passed) p.detail = why;
  p.passed = false;
}

// Expected counted slides for one output vector and one filter row in the
// slide kernels: offsets that are a multiple of V are free.
std::uint64_t counted_per_vector_row(std::size_t kw, std::size_t lanes) {
  return (kw - 1) - (kw - 1) / lanes;
}

void check_slide_counts(PropertyResult& p, KernelVariant v, const ConvShape& s,
                        const CostCounters& c, std::size_t lanes) {
  const std::uint64_t nvec = s.out_w() / lanes;
  const std::uint64_t vectors = nvec * s.out_h() * s.kh;
  std::uint64_t want_ops = 0, want_slides = 0;
  switch (v) {
    case KernelVariant::SlideGeneric:
    case KernelVariant::SlideCompound:
      want_ops = vectors * (s.kw - 1);
      want_slides = vectors * counted_per_vector_row(s.kw, lanes);
      break;
    case KernelVariant::Custom3:
    case KernelVariant::Custom5:
      want_ops = nvec * s.in_h * (s.kw - 1);
      want_slides = nvec * s.in_h * counted_per_vector_row(s.kw, lanes);
      break;
    default:
      if (c.slides != 0 || c.slide_ops != 0) fail(p, std::string(to_string(v)) + " reported slides");
      return;
  }
  ++p.cases;
  if (c.slide_ops != want_ops || c.slides != want_slides) {
    std::ostringstream os;
    os << describe(v, s.in_h, s.in_w, s.kh, s.kw) << ": slide_ops " << c.slide_ops << " (want "
       << want_ops << "), slides " << c.slides << " (want " << want_slides << ")";
    fail(p, os.str());
  }
}

PropertyResult named(std::string name) {
  PropertyResult p;
  p.name = std::move(name);
  return p;
}

bool bit_equal(const Tensor2D& a, const Tensor2D& b) {
  return a.height() == b.height() && a.width() == b.width() &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

VerifyReport verify_suite(std::uint64_t seed, std::size_t trials, const VectorModel& vm,
                          VerifyOptions opts) {
  vm.validate();
  const std::size_t V = vm.lanes;
  std::mt19937_64 rng(seed);

  PropertyResult agree = named("oracle_agreement");
  PropertyResult parity = named("flop_parity");
  PropertyResult counts = named("slide_counts");
  PropertyResult custom_fewer = named("custom_fewer_slides");
  PropertyResult pooling = named("pooling");
  PropertyResult boundary = named("boundary_shapes");
  PropertyResult delta = named("delta_crop");
  PropertyResult equiv = named("scalar_simd_equivalence");
  bool corrupted = false;

  auto check_instance = [&](const Tensor2D& x, const Filter2D& f, PropertyResult& target) {
    const auto s = ConvShape::of(x, f);
    const auto want = oracle_conv2d(x, f);
    const double tol = conv_tolerance(s.kh, s.kw);
    std::uint64_t generic_slides = 0;
    for (auto v : applicable_variants(s.kh, s.kw, vm)) {
      auto res = convolve(v, x, f, vm);
      if (opts.inject_corruption && !corrupted && &target == &agree &&
          v == KernelVariant::SlideGeneric) {
        res.output(0, 0) += 1.0f;
        corrupted = true;
      }
      const double err = max_relative_error(res.output.data(), want.data());
      ++target.cases;
      target.worst_error = std::max(target.worst_error, err);
      if (!(err <= tol)) {
        std::ostringstream os;
        os << describe(v, s.in_h, s.in_w, s.kh, s.kw) << ": relative error " << err << " > " << tol;
        fail(target, os.str());
      }
      ++parity.cases;
      const auto gemm_or_kernel_macs = res.cost.macs;
      if (gemm_or_kernel_macs != mac_count(s)) {
        fail(parity, describe(v, s.in_h, s.in_w, s.kh, s.kw) + ": macs " +
                         std::to_string(res.cost.macs) + " != " + std::to_string(mac_count(s)));
      }
      if (v != KernelVariant::Im2colGemm && res.cost.im2col_elems != 0) {
        fail(parity, describe(v, s.in_h, s.in_w, s.kh, s.kw) + ": nonzero im2col_elems");
      }
      check_slide_counts(counts, v, s, res.cost, V);
      if (v == KernelVariant::SlideGeneric) generic_slides = res.cost.slides;
      if ((v == KernelVariant::Custom3 || v == KernelVariant::Custom5) && s.out_h() >= 2 &&
          generic_slides > 0) {
        ++custom_fewer.cases;
        if (res.cost.slides >= generic_slides) {
          fail(custom_fewer, describe(v, s.in_h, s.in_w, s.kh, s.kw) + ": " +
                                 std::to_string(res.cost.slides) + " slides, generic used " +
                                 std::to_string(generic_slides));
        }
      }
    }
  };

  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = pick(rng, 1, std::min(V + 9, kMaxDim));
    // Every fourth instance uses a rectangular filter.
    const std::size_t kh = t % 4 == 3 ? pick(rng, 1, k) : k;
    const std::size_t h = pick(rng, kh, kMaxDim);
    const std::size_t w = pick(rng, k, kMaxDim);
    const auto x = random_tensor(h, w, rng);
    const auto f = random_filter(kh, k, rng);
    check_instance(x, f, agree);
    // Custom kernels always get a turn.
    if (t % 8 == 0) {
      for (std::size_t ck : {3, 5}) {
        const auto xc = random_tensor(pick(rng, ck + 1, kMaxDim), pick(rng, ck, kMaxDim), rng);
        check_instance(xc, random_filter(ck, ck, rng), agree);
      }
    }
  }

  // Pooling against direct 64-bit sums and a direct max.
  for (std::size_t t = 0; t < std::max<std::size_t>(trials / 4, 8); ++t) {
    const std::size_t n = pick(rng, 1, 512);
    const std::size_t k = pick(rng, 1, std::min<std::size_t>(n, 64));
    const auto x = random_tensor(1, n, rng);
    const auto sum = sliding_window_sum(x, k, vm);
    const auto mx = sliding_window_max(x, k, vm);
    std::vector<double> want_sum(n - k + 1);
    bool max_ok = true;
    for (std::size_t i = 0; i + k <= n; ++i) {
      double acc = 0;
      float m = x(0, i);
      for (std::size_t j = 0; j < k; ++j) {
        acc += x(0, i + j);
        m = std::max(m, x(0, i + j));
      }
      want_sum[i] = acc;
      max_ok = max_ok && mx.output(0, i) == m;
    }
    const double err = max_relative_error(sum.output.data(), want_sum);
    const auto log2k = static_cast<std::uint64_t>(std::bit_width(k - 1));  // ceil(log2 k)
    pooling.cases += 2;
    pooling.worst_error = std::max(pooling.worst_error, err);
    std::ostringstream os;
    os << "n=" << n << " k=" << k;
    if (!(err <= 1e-5)) fail(pooling, os.str() + ": window sum error " + std::to_string(err));
    if (sum.cost.stages > 2 * log2k) fail(pooling, os.str() + ": too many sum stages");
    if (!max_ok) fail(pooling, os.str() + ": window max differs from direct max");
    if (mx.cost.stages > log2k + 1) fail(pooling, os.str() + ": too many max stages");
  }

  // Filter widths straddling the generic/compound boundary on odd (hence
  // coprime with V) input dimensions.
  for (std::size_t k : {V - 1, V, V + 1, V + 2}) {
    for (int rep = 0; rep < 3; ++rep) {
      const std::size_t h = pick(rng, k, kMaxDim - 1) | 1;
      const std::size_t w = pick(rng, k, kMaxDim - 1) | 1;
      const auto x = random_tensor(h, w, rng);
      const std::size_t kh = rep == 2 ? 1 : k;
      check_instance(x, random_filter(kh, k, rng), boundary);
    }
    for (bool prefer_generic : {false, true}) {
      const auto chosen = select_kernel(k, k, vm, {prefer_generic});
      ++boundary.cases;
      if (!is_applicable(chosen, k, k, vm)) {
        fail(boundary, "select_kernel chose inapplicable " + std::string(to_string(chosen)) +
                           " for k=" + std::to_string(k));
      }
    }
  }
  for (std::size_t kw = 1; kw <= kMaxDim; ++kw) {
    const bool served = is_applicable(KernelVariant::SlideGeneric, 1, kw, vm) ||
                        is_applicable(KernelVariant::SlideCompound, 1, kw, vm);
    if (!served) fail(boundary, "no slide kernel serves kw=" + std::to_string(kw));
  }

  // A centred unit tap crops the input exactly.
  for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{5}, V - 1, V + 1}) {
    const auto x = random_tensor(pick(rng, k, kMaxDim), pick(rng, k, kMaxDim), rng);
    const auto f = Filter2D::delta(k, k);
    for (auto v : applicable_variants(k, k, vm)) {
      const auto res = convolve(v, x, f, vm);
      ++delta.cases;
      for (std::size_t r = 0; r < res.output.height(); ++r) {
        for (std::size_t c = 0; c < res.output.width(); ++c) {
          if (res.output(r, c) != x(r + k / 2, c + k / 2)) {
            fail(delta, describe(v, x.height(), x.width(), k, k) + ": crop mismatch");
          }
        }
      }
    }
  }

  // Scalar emulation and SIMD lanes must agree bit for bit.
  const VectorModel scalar{V, LaneBackend::Scalar};
  const VectorModel simd{V, LaneBackend::Simd};
  for (std::size_t t = 0; t < std::max<std::size_t>(trials / 4, 8); ++t) {
    const std::size_t k = t % 3 == 0 ? (t % 2 == 0 ? 3 : 5) : pick(rng, 1, std::min(V + 9, kMaxDim));
    const auto x = random_tensor(pick(rng, k, kMaxDim), pick(rng, k, kMaxDim), rng);
    const auto f = random_filter(k, k, rng);
    for (auto v : applicable_variants(k, k, vm)) {
      if (v == KernelVariant::Naive || v == KernelVariant::Im2colGemm) continue;
      ++equiv.cases;
      if (!bit_equal(convolve(v, x, f, scalar).output, convolve(v, x, f, simd).output)) {
        fail(equiv, describe(v, x.height(), x.width(), k, k) + ": scalar and SIMD outputs differ");
      }
    }
    const auto row = random_tensor(1, pick(rng, k, 512), rng);
    equiv.cases += 2;
    if (!bit_equal(sliding_window_sum(row, k, scalar).output, sliding_window_sum(row, k, simd).output) ||
        !bit_equal(sliding_window_max(row, k, scalar).output, sliding_window_max(row, k, simd).output)) {
      fail(equiv, "pooling k=" + std::to_string(k) + ": scalar and SIMD outputs differ");
    }
  }

  VerifyReport report;
  report.properties = {agree, parity, counts, custom_fewer, pooling, boundary, delta, equiv};
  return report;
}

}  // namespace slideconv
