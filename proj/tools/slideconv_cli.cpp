// slideconv: verification and single-core benchmarking of the convolution
// kernels.
//
//   slideconv verify --trials 200 --lanes 8
//   slideconv bench --filter-sizes 3,5,11 --input 512x512 --out results.csv --plot-dir plots

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slideconv/bench.hpp"
#include "slideconv/verify.hpp"

namespace {

bool parse_dim(const std::string& text, std::size_t& h, std::size_t& w) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) return false;
  try {
    h = std::stoul(text.substr(0, x));
    w = std::stoul(text.substr(x + 1));
  } catch (const std::exception&) {
    return false;
  }
  return h > 0 && w > 0;
}

int run_verify(std::uint64_t seed, std::size_t trials, std::size_t lanes) {
  const slideconv::VectorModel vm{lanes, slideconv::LaneBackend::Simd};
  const auto report = slideconv::verify_suite(seed, trials, vm);
  for (const auto& p : report.properties) {
    std::printf("%-26s %s  cases=%zu  worst_rel_err=%.3e%s%s\n", p.name.c_str(),
                p.passed ? "PASS" : "FAIL", p.cases, p.worst_error, p.detail.empty() ? "" : "  ",
                p.detail.c_str());
  }
  return report.all_passed() ? 0 : 1;
}

int run_bench(const slideconv::BenchConfig& cfg, const std::string& out,
              const std::string& plot_dir) {
  const auto run = slideconv::run_benchmark(cfg);
  std::printf("%-15s %4s %12s %12s %10s %9s\n", "variant", "k", "median_ns", "macs", "gflops",
              "speedup");
  for (const auto& r : run.records) {
    std::printf("%-15s %4zu %12.0f %12llu %10.3f %9.3f\n",
                std::string(slideconv::to_string(r.variant)).c_str(), r.kw, r.median_ns,
                static_cast<unsigned long long>(r.macs), r.gflops, r.speedup);
  }
  for (const auto& w : run.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!out.empty()) {
    slideconv::emit_csv(run.records, out);
    slideconv::emit_run_metadata(run, cfg, out + ".meta.json");
  }
  if (!plot_dir.empty()) slideconv::emit_plot_data(run.records, cfg, plot_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-window convolution kernels: verification and benchmarks"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "Run the randomized self-check suite");
  std::size_t trials = 100;
  std::uint64_t verify_seed = 1;
  std::size_t verify_lanes = 16;
  verify->add_option("--trials", trials, "Random instances")->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed, "RNG seed");
  verify->add_option("--lanes", verify_lanes, "Vector lanes (4, 8, 16, 32)")
      ->check(CLI::IsMember({4, 8, 16, 32}));

  auto* bench = app.add_subcommand("bench", "Time every applicable kernel variant");
  slideconv::BenchConfig cfg;
  std::string input = "512x512";
  std::string baseline = "im2col_gemm";
  std::vector<std::string> variants;
  std::string out, plot_dir;
  double roofline = 0;
  bench->add_option("--filter-sizes", cfg.filter_sizes, "Square filter sizes")->delimiter(',');
  bench->add_option("--input", input, "Input size HxW");
  bench->add_option("--reps", cfg.reps, "Timed repetitions (>= 3)");
  bench->add_option("--warmup", cfg.warmup, "Untimed warmup runs");
  bench->add_option("--seed", cfg.seed, "RNG seed");
  bench->add_option("--lanes", cfg.vector_lanes, "Vector lanes (4, 8, 16, 32)");
  bench->add_option("--baseline", baseline, "Variant the speedups are relative to");
  bench->add_option("--variant", variants, "Only measure this variant (repeatable)");
  bench->add_option("--out", out, "CSV output path");
  bench->add_option("--plot-dir", plot_dir, "Directory for speedup.dat / throughput.dat");
  bench->add_option("--roofline", roofline, "Reference peak GFLOPS drawn in throughput.dat");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return run_verify(verify_seed, trials, verify_lanes);

    if (!parse_dim(input, cfg.input_h, cfg.input_w)) {
      std::cerr << "error: --input expects HxW, got '" << input << "'\n";
      return 2;
    }
    const auto base = slideconv::parse_variant(baseline);
    if (!base) {
      std::cerr << "error: unknown baseline '" << baseline << "'\n";
      return 2;
    }
    cfg.baseline = *base;
    for (const auto& name : variants) {
      const auto v = slideconv::parse_variant(name);
      if (!v) {
        std::cerr << "error: unknown variant '" << name << "'\n";
        return 2;
      }
      cfg.variants.push_back(*v);
    }
    if (roofline > 0) cfg.roofline_gflops = roofline;
    return run_bench(cfg, out, plot_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
