#include "slideconv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

#include "slideconv/dispatch.hpp"
#include "slideconv/random.hpp"

#ifdef __linux__
#include <sched.h>
#endif

namespace slideconv {

void BenchConfig::validate() const {
  if (reps < 3) throw ConfigError("reps must be at least 3");
  if (filter_sizes.empty()) throw ConfigError("at least one filter size is required");
  if (input_h == 0 || input_w == 0) throw ConfigError("input dimensions must be positive");
  if (!VectorModel::supported_lanes(vector_lanes)) {
    throw ConfigError("vector lanes must be one of 4, 8, 16, 32");
  }
  const VectorModel vm{vector_lanes, LaneBackend::Simd};
  for (auto k : filter_sizes) {
    if (k == 0 || k >= std::min(input_h, input_w)) {
      throw ConfigError("filter size " + std::to_string(k) + " must be in [1, " +
                        std::to_string(std::min(input_h, input_w) - 1) + "]");
    }
    if (!is_applicable(baseline, k, k, vm)) {
      throw ConfigError("baseline " + std::string(to_string(baseline)) +
                        " cannot run filter size " + std::to_string(k));
    }
  }
  if (roofline_gflops && !(*roofline_gflops > 0)) throw ConfigError("roofline must be positive");
}

double gflops_of(std::uint64_t macs, double median_ns) noexcept {
  return 2.0 * static_cast<double>(macs) / (median_ns * 1e-9) / 1e9;
}

bool pin_to_current_core() noexcept {
#ifdef __linux__
  const int cpu = sched_getcpu();
  if (cpu < 0) return false;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  return sched_setaffinity(0, sizeof(set), &set) == 0;
#else
  return false;
#endif
}

namespace {

using Clock = std::chrono::steady_clock;

double measure_timer_granularity_ns() {
  double best = 1e9;
  for (int i = 0; i < 64; ++i) {
    const auto t0 = Clock::now();
    auto t1 = Clock::now();
    while (t1 == t0) t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::nano>(t1 - t0).count());
  }
  return best;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_field(std::string_view field, const std::filesystem::path& path, std::size_t line) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad numeric field '" +
                  std::string(field) + "'");
  }
  return value;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

BenchRun run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  BenchRun run;
  run.pinned = pin_to_current_core();
  if (!run.pinned) run.warnings.push_back("could not pin to a single core");
  run.timer_granularity_ns = measure_timer_granularity_ns();

  const VectorModel vm{cfg.vector_lanes, LaneBackend::Simd};
  std::mt19937_64 rng(cfg.seed);
  const Tensor2D x = random_tensor(cfg.input_h, cfg.input_w, rng);

  std::vector<std::size_t> sizes = cfg.filter_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  for (auto k : sizes) {
    // Filter taps depend only on (seed, k) so that runs with different size
    // lists agree on shared sizes.
    std::mt19937_64 frng(cfg.seed ^ (0x9E3779B97F4A7C15ull * k));
    const Filter2D f = random_filter(k, k, frng);

    std::vector<KernelVariant> variants;
    for (auto v : applicable_variants(k, k, vm)) {
      const bool requested = cfg.variants.empty() ||
                             std::find(cfg.variants.begin(), cfg.variants.end(), v) !=
                                 cfg.variants.end();
      if (requested || v == cfg.baseline) variants.push_back(v);
    }

    std::vector<BenchRecord> cell;
    for (auto v : variants) {
      for (std::size_t w = 0; w < cfg.warmup; ++w) (void)convolve(v, x, f, vm);
      std::vector<double> times;
      times.reserve(cfg.reps);
      KernelResult last{Tensor2D(1, 1), {}};
      for (std::size_t r = 0; r < cfg.reps; ++r) {
        const auto t0 = Clock::now();
        last = convolve(v, x, f, vm);
        const auto t1 = Clock::now();
        times.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
      }
      BenchRecord rec;
      rec.variant = v;
      rec.kh = rec.kw = k;
      rec.in_h = cfg.input_h;
      rec.in_w = cfg.input_w;
      rec.median_ns = median_of(times);
      rec.min_ns = *std::min_element(times.begin(), times.end());
      rec.macs = last.cost.macs;
      rec.slides = last.cost.slides;
      rec.im2col_elems = last.cost.im2col_elems;
      rec.gflops = gflops_of(rec.macs, rec.median_ns);
      rec.checksum = std::accumulate(last.output.data().begin(), last.output.data().end(), 0.0);
      if (rec.median_ns < 1000.0 * run.timer_granularity_ns) {
        run.warnings.push_back(std::string(to_string(v)) + " k=" + std::to_string(k) +
                               ": median time is under 1000 timer ticks");
      }
      cell.push_back(rec);
    }
    const auto base = std::find_if(cell.begin(), cell.end(),
                                   [&](const BenchRecord& r) { return r.variant == cfg.baseline; });
    for (auto& rec : cell) rec.speedup = base->median_ns / rec.median_ns;
    for (auto& rec : cell) {
      if (!cfg.variants.empty() && rec.variant == cfg.baseline &&
          std::find(cfg.variants.begin(), cfg.variants.end(), rec.variant) == cfg.variants.end()) {
        continue;
      }
      run.records.push_back(rec);
    }
  }
  return run;
}

void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw ConfigError("no records to write");
  auto out = open_for_write(path);
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.variant) << ',' << r.kh << ',' << r.kw << ',' << r.in_h << ',' << r.in_w
        << ',' << format_double(r.median_ns) << ',' << format_double(r.min_ns) << ',' << r.macs
        << ',' << r.slides << ',' << r.im2col_elems << ',' << format_double(r.gflops) << ','
        << format_double(r.speedup) << '\n';
  }
  finish_write(out, path);
}

std::vector<BenchRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw IoError(path.string() + ": missing or unexpected CSV header");
  }
  std::vector<BenchRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 12) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 12 fields");
    }
    const auto variant = parse_variant(f[0]);
    if (!variant) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": unknown variant '" +
                    std::string(f[0]) + "'");
    }
    BenchRecord r;
    r.variant = *variant;
    r.kh = parse_field<std::size_t>(f[1], path, lineno);
    r.kw = parse_field<std::size_t>(f[2], path, lineno);
    r.in_h = parse_field<std::size_t>(f[3], path, lineno);
    r.in_w = parse_field<std::size_t>(f[4], path, lineno);
    r.median_ns = parse_field<double>(f[5], path, lineno);
    r.min_ns = parse_field<double>(f[6], path, lineno);
    r.macs = parse_field<std::uint64_t>(f[7], path, lineno);
    r.slides = parse_field<std::uint64_t>(f[8], path, lineno);
    r.im2col_elems = parse_field<std::uint64_t>(f[9], path, lineno);
    r.gflops = parse_field<double>(f[10], path, lineno);
    r.speedup = parse_field<double>(f[11], path, lineno);
    records.push_back(r);
  }
  return records;
}

void emit_plot_data(const std::vector<BenchRecord>& records, const BenchConfig& cfg,
                    const std::filesystem::path& dir) {
  std::vector<std::size_t> sizes;
  for (const auto& r : records) sizes.push_back(r.kw);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.size() < 2) throw ConfigError("plot data needs at least two filter sizes");

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  // Series in enumeration order of their first variant; points sorted by k.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const BenchRecord*>> series;
  for (auto v : kAllVariants) {
    for (const auto& r : records) {
      if (r.variant != v) continue;
      const std::string name(series_name(v));
      if (series.find(name) == series.end()) order.push_back(name);
      series[name].push_back(&r);
    }
  }
  for (auto& [name, pts] : series) {
    std::stable_sort(pts.begin(), pts.end(),
                     [](const BenchRecord* a, const BenchRecord* b) { return a->kw < b->kw; });
  }

  auto write = [&](const std::filesystem::path& path, auto value_of, bool roofline) {
    auto out = open_for_write(path);
    bool first = true;
    for (const auto& name : order) {
      if (!first) out << '\n';
      first = false;
      out << "# " << name << '\n';
      for (const auto* r : series[name]) out << r->kw << ' ' << format_double(value_of(*r)) << '\n';
    }
    if (roofline && cfg.roofline_gflops) {
      out << "\n# roofline\n";
      for (auto k : sizes) out << k << ' ' << format_double(*cfg.roofline_gflops) << '\n';
    }
    finish_write(out, path);
  };
  write(dir / "speedup.dat", [](const BenchRecord& r) { return r.speedup; }, false);
  write(dir / "throughput.dat", [](const BenchRecord& r) { return r.gflops; }, true);
}

void emit_run_metadata(const BenchRun& run, const BenchConfig& cfg,
                       const std::filesystem::path& path) {
  nlohmann::json j;
  j["config"] = {
      {"filter_sizes", cfg.filter_sizes},
      {"input_h", cfg.input_h},
      {"input_w", cfg.input_w},
      {"reps", cfg.reps},
      {"warmup", cfg.warmup},
      {"seed", cfg.seed},
      {"vector_lanes", cfg.vector_lanes},
      {"baseline", std::string(to_string(cfg.baseline))},
  };
  if (cfg.roofline_gflops) j["config"]["roofline_gflops"] = *cfg.roofline_gflops;
  j["environment"] = {{"pinned_single_core", run.pinned},
                      {"timer_granularity_ns", run.timer_granularity_ns}};
  j["warnings"] = run.warnings;
  auto& sums = j["checksums"] = nlohmann::json::array();
  for (const auto& r : run.records) {
    sums.push_back({{"variant", std::string(to_string(r.variant))},
                    {"k", r.kw},
                    {"checksum", r.checksum}});
  }
  auto out = open_for_write(path);
  out << j.dump(2) << '\n';
  finish_write(out, path);
}

}  // namespace slideconv
