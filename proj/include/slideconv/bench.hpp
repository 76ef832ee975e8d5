#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slideconv/vector_model.hpp"

namespace slideconv {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be written or read; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  std::vector<std::size_t> filter_sizes{3, 5, 11, 17, 21, 29, 33, 37, 51};
  std::size_t input_h = 512;
  std::size_t input_w = 512;
  std::size_t reps = 30;
  std::size_t warmup = 5;
  std::uint64_t seed = 42;
  std::size_t vector_lanes = 16;
  KernelVariant baseline = KernelVariant::Im2colGemm;
  /// Restricts the measured variants; the baseline is always measured.
  std::vector<KernelVariant> variants;
  /// Peak FMA throughput of the reference machine, drawn as a flat series.
  std::optional<double> roofline_gflops;

  /// Throws ConfigError on reps < 3, empty or oversized filter sizes, bad
  /// lane counts or a baseline that cannot serve every filter size.
  void validate() const;
};

struct BenchRecord {
  KernelVariant variant = KernelVariant::Naive;
  std::size_t kh = 0;
  std::size_t kw = 0;
  std::size_t in_h = 0;
  std::size_t in_w = 0;
  double median_ns = 0;
  double min_ns = 0;
  std::uint64_t macs = 0;
  std::uint64_t slides = 0;
  std::uint64_t im2col_elems = 0;
  double gflops = 0;
  double speedup = 0;
  /// Sum of output elements in 64-bit arithmetic.
  double checksum = 0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct BenchRun {
  std::vector<BenchRecord> records;
  bool pinned = false;
  double timer_granularity_ns = 0;
  std::vector<std::string> warnings;
};

/// 2 * macs / (median_ns * 1e-9) / 1e9.
double gflops_of(std::uint64_t macs, double median_ns) noexcept;

/// Pins the calling thread to the core it is running on. Returns false when
/// the platform does not allow it.
bool pin_to_current_core() noexcept;

/// Times every applicable variant for every filter size on one seeded input,
/// single threaded. Records are sorted by (k, variant).
BenchRun run_benchmark(const BenchConfig& cfg);

inline constexpr const char* kCsvHeader =
    "variant,kh,kw,in_h,in_w,median_ns,min_ns,macs,slides,im2col_elems,gflops,speedup";

/// Header line plus one row per record. Doubles are written in shortest
/// round-trip form.
void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);
std::vector<BenchRecord> read_csv(const std::filesystem::path& path);

/// Writes speedup.dat and throughput.dat into dir: one whitespace-separated
/// "k value" block per plot series, blocks separated by a blank line, plus a
/// flat "roofline" block in throughput.dat when cfg.roofline_gflops is set.
void emit_plot_data(const std::vector<BenchRecord>& records, const BenchConfig& cfg,
                    const std::filesystem::path& dir);

/// Configuration, environment and checksums as JSON, next to the CSV.
void emit_run_metadata(const BenchRun& run, const BenchConfig& cfg,
                       const std::filesystem::path& path);

}  // namespace slideconv
