#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "slideconv/dispatch.hpp"
#include "slideconv/random.hpp"
#include "slideconv/reference.hpp"
#include "slideconv/slide_kernels.hpp"
#include "test_support.hpp"

using namespace slideconv;
using slideconv::testing::brute_conv;
using slideconv::testing::ramp;
using slideconv::testing::rel_error;

namespace {

constexpr std::size_t kLaneCounts[] = {4, 8, 16, 32};

double tolerance(std::size_t kh, std::size_t kw) { return 1e-5 * std::max(1.0, kh * kw / 64.0); }

bool bit_equal(const Tensor2D& a, const Tensor2D& b) {
  return a.size() == b.size() && std::memcmp(a.data().data(), b.data().data(), a.size() * 4) == 0;
}

Tensor2D crop(const Tensor2D& x, std::size_t top, std::size_t left, std::size_t h, std::size_t w) {
  Tensor2D out(h, w);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) out(r, c) = x(r + top, c + left);
  return out;
}

}  // namespace

TEST(Slide, ConcatenationWindow) {
  const VectorModel vm{4, LaneBackend::Simd};
  const std::vector<float> a{1, 2, 3, 4}, b{5, 6, 7, 8};
  CostCounters cost;
  EXPECT_EQ(slide(a, b, 2, vm, &cost), (std::vector<float>{3, 4, 5, 6}));
  EXPECT_EQ(cost.slides, 1u);
  EXPECT_EQ(slide(a, b, 0, vm, &cost), a);
  EXPECT_EQ(slide(a, b, 4, vm, &cost), b);
  EXPECT_EQ(cost.slides, 1u);
  EXPECT_EQ(cost.slide_ops, 3u);
}

TEST(Slide, RejectsBadOperands) {
  const VectorModel vm{4, LaneBackend::Simd};
  const std::vector<float> a{1, 2, 3, 4}, b{5, 6, 7, 8};
  EXPECT_THROW(slide(a, b, 5, vm), std::out_of_range);
  EXPECT_THROW(slide(std::vector<float>{1, 2}, b, 1, vm), ShapeError);
  EXPECT_THROW(slide(a, b, 1, VectorModel{6, LaneBackend::Simd}), std::invalid_argument);
}

TEST(Slide, EveryOffsetMatchesScalarModel) {
  std::mt19937_64 rng(99);
  for (auto lanes : kLaneCounts) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = uniform_values(lanes, rng), b = uniform_values(lanes, rng);
      for (std::size_t off = 0; off <= lanes; ++off) {
        std::vector<float> want(lanes);
        for (std::size_t l = 0; l < lanes; ++l) want[l] = l + off < lanes ? a[l + off] : b[l + off - lanes];
        EXPECT_EQ(slide(a, b, off, {lanes, LaneBackend::Simd}), want);
        EXPECT_EQ(slide(a, b, off, {lanes, LaneBackend::Scalar}), want);
      }
    }
  }
}

TEST(Conv1dSlide, Examples) {
  const auto x = Tensor2D::row_vector({1, 2, 3, 4, 5});
  EXPECT_EQ(conv1d_slide(x, Filter2D::row_vector({1, 1, 1}), {4}).output,
            Tensor2D::row_vector({6, 9, 12}));
  EXPECT_EQ(conv1d_slide(x, Filter2D::row_vector({1}), {4}).output, x);
}

TEST(Conv1dSlide, RandomSignalAndSlideCount) {
  std::mt19937_64 rng(2);
  const auto x = random_tensor(1, 4096, rng);
  const auto f = random_filter(1, 11, rng);
  const auto res = conv1d_slide(x, f, {16});
  EXPECT_LE(rel_error(res.output, brute_conv(x, f)), 1e-5);
  // (kw - 1) slides per full output vector: 10 * floor(4086 / 16); the scalar
  // epilogue slides nothing.
  EXPECT_EQ(res.cost.slides, 2550u);
  EXPECT_EQ(res.cost.macs, 4086u * 11);
}

TEST(Conv1dSlide, TooWideDirectsToCompound) {
  const auto x = Tensor2D(1, 64);
  EXPECT_THROW(conv1d_slide(x, Filter2D::ones(1, 18), {16}), FilterWidthError);
  EXPECT_NO_THROW(conv1d_slide(x, Filter2D::ones(1, 17), {16}));
  EXPECT_THROW(conv1d_slide(Tensor2D(2, 8), Filter2D::ones(1, 3), {4}), ShapeError);
}

TEST(SlideGeneric, SmallExamples) {
  const Tensor2D x(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  EXPECT_EQ(conv2d_slide_generic(x, Filter2D::ones(2, 2), {4}).output, Tensor2D(2, 2, {12, 16, 24, 28}));
  const auto r = ramp(8, 8);
  for (auto lanes : kLaneCounts) {
    EXPECT_EQ(conv2d_slide_generic(r, Filter2D::delta(3, 3), {lanes}).output, crop(r, 1, 1, 6, 6));
  }
}

TEST(SlideGeneric, Large11x11MatchesOracle) {
  std::mt19937_64 rng(4);
  const auto x = random_tensor(512, 512, rng);
  const auto f = random_filter(11, 11, rng);
  const auto res = conv2d_slide_generic(x, f, {16});
  EXPECT_LE(rel_error(res.output, brute_conv(x, f)), tolerance(11, 11));
  EXPECT_EQ(res.cost.macs, mac_count(ConvShape::of(x, f)));
}

TEST(SlideGeneric, CapacityIsLanesPlusOne) {
  for (auto lanes : kLaneCounts) {
    const Tensor2D x(3, lanes + 8);
    EXPECT_NO_THROW(conv2d_slide_generic(x, Filter2D::ones(2, lanes + 1), {lanes}));
    EXPECT_THROW(conv2d_slide_generic(x, Filter2D::ones(2, lanes + 2), {lanes}), FilterWidthError);
  }
}

TEST(SlideCompound, AgreesWithGenericAtKwEqualsV) {
  std::mt19937_64 rng(6);
  for (auto lanes : kLaneCounts) {
    const auto x = random_tensor(40, 3 * lanes + 7, rng);
    const auto f = random_filter(3, lanes, rng);
    const auto g = conv2d_slide_generic(x, f, {lanes}).output;
    const auto c = conv2d_slide_compound(x, f, {lanes}).output;
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_LE(std::abs(g.data()[i] - c.data()[i]) / std::max(1.0f, std::abs(g.data()[i])), 1e-6);
    }
  }
}

TEST(SlideCompound, Large51x51MatchesOracle) {
  std::mt19937_64 rng(7);
  const auto x = random_tensor(512, 512, rng);
  const auto f = random_filter(51, 51, rng);
  ASSERT_EQ(compound_width(51, 16), 5u);
  const auto res = conv2d_slide_compound(x, f, {16});
  EXPECT_LE(rel_error(res.output, brute_conv(x, f)), tolerance(51, 51));
  EXPECT_EQ(res.cost.macs, mac_count(ConvShape::of(x, f)));
}

TEST(SlideCompound, MicroOpsPerCompoundVector) {
  // out_w = m * V exactly: one compound vector per output row and filter row.
  for (auto lanes : {4, 8, 16}) {
    for (std::size_t kw = 2; kw <= 3 * lanes; ++kw) {
      const std::size_t m = compound_width(kw, lanes);
      const Tensor2D x(4, m * lanes + kw - 1);
      const auto res = conv2d_slide_compound(x, Filter2D::ones(2, kw), {std::size_t(lanes)});
      const std::uint64_t compound_vectors = 3 /*out_h*/ * 2 /*kh*/;
      EXPECT_EQ(res.cost.slide_ops, compound_vectors * m * (kw - 1)) << "kw=" << kw;
      EXPECT_EQ(res.cost.slides, compound_vectors * m * ((kw - 1) - (kw - 1) / lanes)) << "kw=" << kw;
    }
  }
}

TEST(SlideCompound, AlignmentZigzag) {
  // Counted slides per MAC at V=16 drop at kw=33 (kw-1 a multiple of V) and
  // rise again at kw=37.
  std::vector<double> per_mac;
  for (std::size_t kw : {29, 33, 37}) {
    const Tensor2D x(kw + 2, kw - 1 + 96);
    const auto res = conv2d_slide_compound(x, Filter2D::ones(kw, kw), {16});
    per_mac.push_back(double(res.cost.slides) / double(res.cost.macs));
  }
  EXPECT_LT(per_mac[1], per_mac[0]);
  EXPECT_GT(per_mac[2], per_mac[1]);
}

TEST(SlideCompound, RequiresWidthTwo) {
  EXPECT_THROW(conv2d_slide_compound(Tensor2D(4, 4), Filter2D::ones(2, 1), {4}), VariantError);
}

TEST(CustomKernels, DeltaCrop) {
  const auto r = ramp(8, 8);
  for (auto lanes : kLaneCounts) {
    EXPECT_EQ(conv2d_custom3(r, Filter2D::delta(3, 3), {lanes}).output, crop(r, 1, 1, 6, 6));
    EXPECT_EQ(conv2d_custom5(r, Filter2D::delta(5, 5), {lanes}).output, crop(r, 2, 2, 4, 4));
  }
}

TEST(CustomKernels, MatchGenericWithFewerSlides) {
  std::mt19937_64 rng(10);
  const auto x = random_tensor(256, 256, rng);
  for (std::size_t k : {3, 5}) {
    const auto f = random_filter(k, k, rng);
    const auto generic = conv2d_slide_generic(x, f, {16});
    const auto custom = k == 3 ? conv2d_custom3(x, f, {16}) : conv2d_custom5(x, f, {16});
    for (std::size_t i = 0; i < generic.output.size(); ++i) {
      const float g = generic.output.data()[i], c = custom.output.data()[i];
      EXPECT_LE(std::abs(g - c) / std::max(1.0f, std::abs(g)), 1e-6);
    }
    EXPECT_LT(custom.cost.slides, generic.cost.slides);
    EXPECT_EQ(custom.cost.macs, generic.cost.macs);
    const std::size_t nvec = (256 - k + 1) / 16;
    // Each of the 256 input rows is slid once per output vector column.
    EXPECT_EQ(custom.cost.slides, (k - 1) * 256 * nvec);
    EXPECT_EQ(generic.cost.slides, (k - 1) * k * (256 - k + 1) * nvec);
  }
}

TEST(CustomKernels, WrongFilterSize) {
  const Tensor2D x(8, 8);
  EXPECT_THROW(conv2d_custom3(x, Filter2D::ones(5, 5)), VariantError);
  EXPECT_THROW(conv2d_custom3(x, Filter2D::ones(3, 4)), VariantError);
  EXPECT_THROW(conv2d_custom5(x, Filter2D::ones(3, 3)), VariantError);
}

TEST(Dispatch, SelectKernelTable) {
  for (std::size_t lanes : {4, 8, 16}) {
    const VectorModel vm{lanes};
    EXPECT_EQ(select_kernel(3, 3, vm), KernelVariant::Custom3);
    EXPECT_EQ(select_kernel(5, 5, vm), KernelVariant::Custom5);
    EXPECT_EQ(select_kernel(lanes, lanes, vm), KernelVariant::SlideGeneric);
    // At V=4 a square V+1 filter is 5x5 and goes to Custom5, so probe the
    // boundary with a single-row filter too.
    EXPECT_EQ(select_kernel(lanes + 1, lanes + 1, vm),
              lanes == 4 ? KernelVariant::Custom5 : KernelVariant::SlideCompound);
    EXPECT_EQ(select_kernel(1, lanes + 1, vm), KernelVariant::SlideCompound);
    EXPECT_EQ(select_kernel(1, lanes + 1, vm, {true}), KernelVariant::SlideGeneric);
    EXPECT_EQ(select_kernel(1, 2 * lanes + 3, vm), KernelVariant::SlideCompound);
  }
  EXPECT_EQ(select_kernel(11, 11, {16}), KernelVariant::SlideGeneric);
  EXPECT_EQ(select_kernel(17, 17, {16}), KernelVariant::SlideCompound);
}

TEST(Dispatch, SelectionIsAlwaysApplicable) {
  for (auto lanes : kLaneCounts) {
    for (std::size_t kh = 1; kh <= 12; ++kh) {
      for (std::size_t kw = 1; kw <= 80; ++kw) {
        for (bool g : {false, true}) {
          const VectorModel vm{lanes};
          EXPECT_TRUE(is_applicable(select_kernel(kh, kw, vm, {g}), kh, kw, vm));
        }
      }
    }
  }
}

TEST(Dispatch, ConvolveRejectsInapplicableVariant) {
  const Tensor2D x(10, 10);
  EXPECT_THROW(convolve(KernelVariant::Custom3, x, Filter2D::ones(4, 4)), VariantError);
  EXPECT_THROW(convolve(KernelVariant::SlideGeneric, Tensor2D(4, 40), Filter2D::ones(1, 10), {8}),
               VariantError);
  EXPECT_EQ(to_string(KernelVariant::Im2colGemm), "im2col_gemm");
  EXPECT_EQ(parse_variant("slide_compound"), KernelVariant::SlideCompound);
  EXPECT_FALSE(parse_variant("mlas").has_value());
}

TEST(CrossVariant, RandomShapesMatchOracle) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t lanes = kLaneCounts[trial % 4];
    const VectorModel vm{lanes, trial % 2 ? LaneBackend::Scalar : LaneBackend::Simd};
    const std::size_t kw = 1 + rng() % (lanes + 10);
    const std::size_t kh = 1 + rng() % 7;
    const auto x = random_tensor(kh + rng() % 30, kw + rng() % 70, rng);
    const auto f = random_filter(kh, kw, rng);
    const auto want = brute_conv(x, f);
    for (auto v : applicable_variants(kh, kw, vm)) {
      const auto res = convolve(v, x, f, vm);
      EXPECT_LE(rel_error(res.output, want), tolerance(kh, kw)) << to_string(v);
      EXPECT_EQ(res.cost.macs, mac_count(ConvShape::of(x, f))) << to_string(v);
    }
  }
}

TEST(CrossVariant, ScalarEmulationIsBitIdenticalToSimd) {
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t lanes = kLaneCounts[trial % 4];
    const std::size_t k = trial % 5 == 0 ? 3 : trial % 5 == 1 ? 5 : 1 + rng() % (lanes + 10);
    const auto x = random_tensor(k + rng() % 20, k + rng() % 50, rng);
    const auto f = random_filter(k, k, rng);
    for (auto v : applicable_variants(k, k, {lanes})) {
      const auto s = convolve(v, x, f, {lanes, LaneBackend::Scalar});
      const auto h = convolve(v, x, f, {lanes, LaneBackend::Simd});
      EXPECT_TRUE(bit_equal(s.output, h.output)) << to_string(v);
      EXPECT_EQ(s.cost, h.cost);
    }
  }
}

TEST(CrossVariant, SlideKernelsReproduceNaiveAccumulationOrder) {
  // Without contraction every variant sums taps in the same (j, i) order.
  std::mt19937_64 rng(77);
  const auto x = random_tensor(40, 70, rng);
  for (std::size_t k : {2, 3, 5, 9, 17, 20}) {
    const auto f = random_filter(k, k, rng);
    const auto naive = conv2d_reference(x, f).output;
    for (auto v : applicable_variants(k, k, {16})) {
      EXPECT_TRUE(bit_equal(convolve(v, x, f, {16}).output, naive)) << to_string(v) << " k=" << k;
    }
  }
}
