#include <gtest/gtest.h>

#include <random>

#include "slideconv/reference.hpp"
#include "slideconv/random.hpp"
#include "test_support.hpp"

using namespace slideconv;
using slideconv::testing::brute_conv;
using slideconv::testing::rel_error;

namespace {

Tensor2D three_by_three() { return Tensor2D(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9}); }

}  // namespace

TEST(Tensor2D, RejectsMismatchedData) {
  EXPECT_THROW(Tensor2D(2, 3, {1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor2D(0, 3), ShapeError);
  EXPECT_THROW(Filter2D(2, 2, {1, 2, 3}), ShapeError);
  EXPECT_THROW(Filter2D(0, 1, {}), ShapeError);
}

TEST(ConvShape, OutputDims) {
  const auto s = ConvShape::make(10, 12, 3, 5);
  EXPECT_EQ(s.out_h(), 8u);
  EXPECT_EQ(s.out_w(), 8u);
  EXPECT_THROW(ConvShape::make(2, 10, 3, 3), ShapeError);
  EXPECT_THROW(ConvShape::make(10, 2, 3, 3), ShapeError);
}

TEST(Conv2dReference, AllOnesGivesWindowSums) {
  const auto y = conv2d_reference(three_by_three(), Filter2D::ones(2, 2));
  EXPECT_EQ(y.output, Tensor2D(2, 2, {12, 16, 24, 28}));
  EXPECT_EQ(y.cost.macs, 16u);
}

TEST(Conv2dReference, UnitFilterIsBitExactIdentity) {
  std::mt19937_64 rng(3);
  const auto x = random_tensor(17, 23, rng);
  EXPECT_EQ(conv2d_reference(x, Filter2D(1, 1, {1.0f})).output, x);
}

TEST(Conv2dReference, MatchesOracle64x64With5x5) {
  std::mt19937_64 rng(11);
  const auto x = random_tensor(64, 64, rng);
  const auto f = random_filter(5, 5, rng);
  EXPECT_LE(rel_error(conv2d_reference(x, f).output, brute_conv(x, f)), 1e-5);
}

TEST(Conv2dReference, FilterLargerThanInputThrows) {
  EXPECT_THROW(conv2d_reference(three_by_three(), Filter2D::ones(4, 1)), ShapeError);
  EXPECT_THROW(conv2d_reference(three_by_three(), Filter2D::ones(1, 4)), ShapeError);
}

TEST(Conv2dReference, Linearity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_tensor(20, 30, rng);
    const auto f = random_filter(4, 6, rng);
    const auto g = random_filter(4, 6, rng);
    const float a = 0.75f, b = -1.25f;
    std::vector<float> combo(f.size());
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * f.taps()[i] + b * g.taps()[i];
    const auto lhs = conv2d_reference(x, Filter2D(4, 6, combo)).output;
    const auto yf = conv2d_reference(x, f).output;
    const auto yg = conv2d_reference(x, g).output;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double rhs = double(a) * yf.data()[i] + double(b) * yg.data()[i];
      EXPECT_LE(std::abs(lhs.data()[i] - rhs) / std::max(1.0, std::abs(rhs)), 1e-5);
    }
  }
}

TEST(Conv1dReference, Examples) {
  const auto y = conv1d_reference(Tensor2D::row_vector({1, 2, 3, 4, 5}), Filter2D::row_vector({1, 1, 1}));
  EXPECT_EQ(y.output, Tensor2D::row_vector({6, 9, 12}));
  EXPECT_THROW(conv1d_reference(Tensor2D::row_vector({1, 2}), Filter2D::row_vector({1, 1, 1})),
               ShapeError);
  EXPECT_THROW(conv1d_reference(Tensor2D(2, 4), Filter2D::row_vector({1})), ShapeError);
}

TEST(Conv1dReference, ImpulseReproducesReversedFilter) {
  const std::vector<float> taps{0.5f, -2.0f, 3.0f, 7.0f};
  const std::size_t n = 12, p = 6;
  std::vector<float> sig(n, 0.0f);
  sig[p] = 1.0f;
  const auto y = conv1d_reference(Tensor2D::row_vector(sig), Filter2D::row_vector(taps)).output;
  for (std::size_t i = 0; i < y.width(); ++i) {
    const float want = (i <= p && p - i < taps.size()) ? taps[p - i] : 0.0f;
    EXPECT_EQ(y(0, i), want) << "i=" << i;
  }
}

TEST(Conv1dReference, MatchesOracle1024With11Taps) {
  std::mt19937_64 rng(12);
  const auto x = random_tensor(1, 1024, rng);
  const auto f = random_filter(1, 11, rng);
  EXPECT_LE(rel_error(conv1d_reference(x, f).output, brute_conv(x, f)), 1e-5);
}

TEST(OracleConv2d, ExactOnIntegersAndZero) {
  EXPECT_EQ(oracle_conv2d(three_by_three(), Filter2D::ones(2, 2)), Tensor2D64(2, 2, {12, 16, 24, 28}));
  const auto z = oracle_conv2d(Tensor2D(9, 9), Filter2D::ones(3, 3));
  for (double v : z.data()) EXPECT_EQ(v, 0.0);
}

TEST(OracleConv2d, BoundsThe32BitReference) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t kh = 1 + rng() % 8, kw = 1 + rng() % 8;
    const auto x = random_tensor(kh + rng() % 40, kw + rng() % 40, rng);
    const auto f = random_filter(kh, kw, rng);
    const auto want = oracle_conv2d(x, f);
    EXPECT_EQ(std::vector<double>(want.data().begin(), want.data().end()), brute_conv(x, f));
    EXPECT_LE(rel_error(conv2d_reference(x, f).output, brute_conv(x, f)), 1e-5);
  }
}

TEST(MacCount, Counting) {
  EXPECT_EQ(mac_count(ConvShape::make(10, 1, 3, 1)), 24u);
  EXPECT_EQ(mac_count(ConvShape::make(512, 512, 3, 3)), 2340900u);
}
