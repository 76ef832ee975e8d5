#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "slideconv/bench.hpp"
#include "slideconv/dispatch.hpp"
#include "slideconv/gemm.hpp"
#include "slideconv/pooling.hpp"
#include "slideconv/reference.hpp"
#include "slideconv/slide_kernels.hpp"
#include "slideconv/verify.hpp"

namespace py = pybind11;
using namespace slideconv;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Tensor2D to_tensor(const FloatArray& a) {
  if (a.ndim() == 1) {
    return Tensor2D(1, a.shape(0), std::vector<float>(a.data(), a.data() + a.size()));
  }
  if (a.ndim() != 2) throw ShapeError("expected a 1-D or 2-D array");
  return Tensor2D(a.shape(0), a.shape(1), std::vector<float>(a.data(), a.data() + a.size()));
}

Filter2D to_filter(const FloatArray& a) {
  const auto t = to_tensor(a);
  return Filter2D(t.height(), t.width(), t.values());
}

template <typename T>
py::array_t<T> to_numpy(const BasicTensor2D<T>& t) {
  py::array_t<T> out({t.height(), t.width()});
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

py::dict counters(const CostCounters& c) {
  py::dict d;
  d["macs"] = c.macs;
  d["slides"] = c.slides;
  d["slide_ops"] = c.slide_ops;
  d["loads"] = c.loads;
  d["im2col_elems"] = c.im2col_elems;
  d["stages"] = c.stages;
  return d;
}

py::tuple result(const KernelResult& r) { return py::make_tuple(to_numpy(r.output), counters(r.cost)); }

VectorModel model(std::size_t lanes, const std::string& backend) {
  const auto b = parse_backend(backend);
  if (!b) throw std::invalid_argument("backend must be 'scalar' or 'simd'");
  VectorModel vm{lanes, *b};
  vm.validate();
  return vm;
}

KernelVariant variant(const std::string& name) {
  const auto v = parse_variant(name);
  if (!v) throw std::invalid_argument("unknown variant '" + name + "'");
  return *v;
}

}  // namespace

PYBIND11_MODULE(_slideconv, m) {
  m.doc() = "Sliding-window convolution kernels with im2col/GEMM and direct baselines.";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<FilterWidthError>(m, "FilterWidthError", PyExc_ValueError);
  py::register_exception<VariantError>(m, "VariantError", PyExc_ValueError);

  m.def("variants", [] {
    std::vector<std::string> names;
    for (auto v : kAllVariants) names.emplace_back(to_string(v));
    return names;
  });

  m.def(
      "conv2d",
      [](const FloatArray& x, const FloatArray& f, std::optional<std::string> name,
         std::size_t lanes, const std::string& backend) {
        std::optional<KernelVariant> v;
        if (name) v = variant(*name);
        return result(convolve(to_tensor(x), to_filter(f), model(lanes, backend), v));
      },
      py::arg("x"), py::arg("f"), py::arg("variant") = py::none(), py::arg("lanes") = 16,
      py::arg("backend") = "simd",
      "Valid cross-correlation; returns (output, counters). Without a variant the kernel is "
      "chosen by select_kernel.");

  m.def(
      "oracle_conv2d",
      [](const FloatArray& x, const FloatArray& f) { return to_numpy(oracle_conv2d(to_tensor(x), to_filter(f))); },
      py::arg("x"), py::arg("f"));

  m.def(
      "select_kernel",
      [](std::size_t kh, std::size_t kw, std::size_t lanes, bool generic_at_boundary) {
        return std::string(to_string(select_kernel(kh, kw, model(lanes, "simd"), {generic_at_boundary})));
      },
      py::arg("kh"), py::arg("kw"), py::arg("lanes") = 16, py::arg("generic_at_boundary") = false);

  m.def(
      "im2col",
      [](const FloatArray& x, std::size_t kh, std::size_t kw) {
        CostCounters cost;
        const auto mat = im2col_2d(to_tensor(x), kh, kw, cost);
        return to_numpy(Tensor2D(mat.rows, mat.cols, mat.data));
      },
      py::arg("x"), py::arg("kh"), py::arg("kw"));

  m.def(
      "mac_count",
      [](std::size_t in_h, std::size_t in_w, std::size_t kh, std::size_t kw) {
        return mac_count(ConvShape::make(in_h, in_w, kh, kw));
      },
      py::arg("in_h"), py::arg("in_w"), py::arg("kh"), py::arg("kw"));

  m.def(
      "bloat_ratio",
      [](std::size_t in_h, std::size_t in_w, std::size_t kh, std::size_t kw) {
        return bloat_ratio(ConvShape::make(in_h, in_w, kh, kw));
      },
      py::arg("in_h"), py::arg("in_w"), py::arg("kh"), py::arg("kw"));

  m.def(
      "slide",
      [](const FloatArray& a, const FloatArray& b, std::size_t offset, const std::string& backend) {
        const auto vm = model(static_cast<std::size_t>(a.size()), backend);
        return slide({a.data(), static_cast<std::size_t>(a.size())},
                     {b.data(), static_cast<std::size_t>(b.size())}, offset, vm);
      },
      py::arg("a"), py::arg("b"), py::arg("offset"), py::arg("backend") = "simd");

  m.def(
      "sliding_window_sum",
      [](const FloatArray& x, std::size_t k, std::size_t lanes, const std::string& backend) {
        return result(sliding_window_sum(to_tensor(x), k, model(lanes, backend)));
      },
      py::arg("x"), py::arg("k"), py::arg("lanes") = 16, py::arg("backend") = "simd");

  m.def(
      "sliding_window_max",
      [](const FloatArray& x, std::size_t k, std::size_t lanes, const std::string& backend) {
        return result(sliding_window_max(to_tensor(x), k, model(lanes, backend)));
      },
      py::arg("x"), py::arg("k"), py::arg("lanes") = 16, py::arg("backend") = "simd");

  m.def(
      "verify",
      [](std::uint64_t seed, std::size_t trials, std::size_t lanes) {
        const auto report = verify_suite(seed, trials, model(lanes, "simd"));
        py::dict out;
        for (const auto& p : report.properties) {
          py::dict d;
          d["passed"] = p.passed;
          d["cases"] = p.cases;
          d["worst_error"] = p.worst_error;
          d["detail"] = p.detail;
          out[py::str(p.name)] = d;
        }
        return out;
      },
      py::arg("seed") = 1, py::arg("trials") = 50, py::arg("lanes") = 16,
      "Runs the randomized self-check; returns {property: {passed, cases, worst_error, detail}}.");

  m.def(
      "benchmark",
      [](std::vector<std::size_t> filter_sizes, std::size_t input_h, std::size_t input_w,
         std::size_t reps, std::size_t warmup, std::uint64_t seed, std::size_t lanes) {
        BenchConfig cfg;
        cfg.filter_sizes = std::move(filter_sizes);
        cfg.input_h = input_h;
        cfg.input_w = input_w;
        cfg.reps = reps;
        cfg.warmup = warmup;
        cfg.seed = seed;
        cfg.vector_lanes = lanes;
        py::list rows;
        for (const auto& r : run_benchmark(cfg).records) {
          py::dict d;
          d["variant"] = std::string(to_string(r.variant));
          d["k"] = r.kw;
          d["median_ns"] = r.median_ns;
          d["min_ns"] = r.min_ns;
          d["macs"] = r.macs;
          d["slides"] = r.slides;
          d["im2col_elems"] = r.im2col_elems;
          d["gflops"] = r.gflops;
          d["speedup"] = r.speedup;
          d["checksum"] = r.checksum;
          rows.append(d);
        }
        return rows;
      },
      py::arg("filter_sizes"), py::arg("input_h") = 128, py::arg("input_w") = 128,
      py::arg("reps") = 5, py::arg("warmup") = 1, py::arg("seed") = 42, py::arg("lanes") = 16);
}
