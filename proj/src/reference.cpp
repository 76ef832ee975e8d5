#include "slideconv/reference.hpp"

namespace slideconv {

namespace {

template <typename Acc, typename Out>
void direct_conv(const Tensor2D& x, const Filter2D& f, const ConvShape& s, Out& out) {
  for (std::size_t r = 0; r < s.out_h(); ++r) {
    for (std::size_t c = 0; c < s.out_w(); ++c) {
      Acc acc = 0;
      for (std::size_t j = 0; j < s.kh; ++j) {
        const auto xr = x.row(r + j);
        const auto fr = f.row(j);
        for (std::size_t i = 0; i < s.kw; ++i) {
          acc += static_cast<Acc>(fr[i]) * static_cast<Acc>(xr[c + i]);
        }
      }
      out(r, c) = acc;
    }
  }
}

}  // namespace

KernelResult conv2d_reference(const Tensor2D& x, const Filter2D& f) {
  const auto shape = ConvShape::of(x, f);
  KernelResult result{Tensor2D(shape.out_h(), shape.out_w()), {}};
  direct_conv<float>(x, f, shape, result.output);
  result.cost.macs = mac_count(shape);
  return result;
}

KernelResult conv1d_reference(const Tensor2D& x, const Filter2D& f) {
  if (x.height() != 1) throw ShapeError("1-D convolution needs a height-1 signal");
  if (f.kh() != 1) throw ShapeError("1-D convolution needs a filter with kh == 1");
  return conv2d_reference(x, f);
}

Tensor2D64 oracle_conv2d(const Tensor2D& x, const Filter2D& f) {
  const auto shape = ConvShape::of(x, f);
  Tensor2D64 out(shape.out_h(), shape.out_w());
  direct_conv<double>(x, f, shape, out);
  return out;
}

}  // namespace slideconv
