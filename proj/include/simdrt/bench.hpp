#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "simdrt/backend.hpp"
#include "simdrt/geom.hpp"
#include "simdrt/join.hpp"
#include "simdrt/rtree.hpp"
#include "simdrt/select.hpp"

namespace simdrt::bench {

/// n points i.i.d. uniform over [0, 1)^2, deterministic per seed.
std::vector<Point> gen_uniform(std::uint64_t n, std::uint64_t seed);

/// Square windows of side sqrt(s) placed uniformly inside the unit square.
std::vector<Rect> gen_queries(std::uint64_t count, double selectivity, std::uint64_t seed);

/// (x - eps, y - eps, x + eps, y + eps) clamped to the unit square.
std::vector<Rect> expand_points(std::span<const Point> points, double epsilon);

enum class Op { select, join };

Op parse_op(std::string_view name);
std::string_view to_string(Op op);

/// One benchmarkable algorithm + option set.
struct VariantSpec {
  std::string id;
  Op op = Op::select;
  bool scalar = false;
  bool bitwise = false;  // scalar select only
  SelectOptions select;
  JoinOptions join;

  bool needs_sorted() const { return join.o3 || join.o4 || join.o5; }
};

/// Known ids. select: scalar-logical scalar-bitwise v v-o1 v-o1-o2.
/// join: scalar scalar-o3 v v-o3 v-o4 v-o3-o4 v-o5 v-o3-o5.
std::vector<std::string> variant_ids(Op op);
VariantSpec parse_variant(Op op, std::string_view id);

struct BenchConfig {
  Op op = Op::select;
  std::string variant = "v";
  Layout layout = Layout::d1;  // vectorized variants; scalar variants always run on d0
  std::uint64_t n = 100000;
  std::uint32_t fanout = 64;
  double selectivity = 0.001;
  std::uint64_t queries = 1000;  // join: timed repetitions
  std::uint64_t seed = 42;
  Backend backend = Backend::emulated;
  std::uint32_t pf_distance = 8;
  int prefetch_level = 1;
  double epsilon = 1e-4;
  bool sorted = false;  // variants that need sorting are sorted regardless
  bool verify = false;
  bool perf_counters = false;
  std::string snapshot;  // base tree cache; join stores the inner tree at snapshot + ".inner"

  /// Throws std::invalid_argument on out-of-range fields.
  void check() const;
};

struct HwCounts {
  std::uint64_t instructions = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t branch_misses = 0;
};

struct BenchRow {
  BenchConfig cfg;
  Layout effective_layout = Layout::d0;
  bool effective_sorted = false;
  std::uint64_t query_index = 0;
  std::uint64_t latency_ns = 0;
  std::uint64_t result_count = 0;
  std::optional<std::uint64_t> oracle_count;
  std::uint64_t nodes_visited = 0;  // select: nodes; join: node pairs
  std::optional<vk::OpCounts> ops;  // counting backend, vectorized variants
  std::optional<std::uint64_t> formula_loads;  // select, vectorized variants
  std::optional<HwCounts> hw;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::uint64_t verification_failures = 0;
};

/// Stable CSV column list, one line, no trailing newline.
std::string csv_header();
void write_csv(std::ostream& out, const BenchReport& report);

/// Exceptions carrying the process exit code the CLI should use:
/// 2 for configuration problems and missing native support, 3 for I/O.
class BenchError : public std::runtime_error {
 public:
  BenchError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int exit_code() const { return code_; }

 private:
  int code_;
};

/// Keeps generated data and built trees across configs that share them.
class BenchSession {
 public:
  BenchSession();
  ~BenchSession();

  /// Appends rows for cfg to report. Verification mismatches are counted in
  /// report.verification_failures rather than thrown.
  void run(const BenchConfig& cfg, BenchReport& report);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

BenchReport run_bench(const BenchConfig& cfg);

/// Optional OS hardware-counter hook (Linux perf events).
class PerfCounters {
 public:
  PerfCounters();
  ~PerfCounters();
  PerfCounters(const PerfCounters&) = delete;
  PerfCounters& operator=(const PerfCounters&) = delete;

  /// False when the platform or the kernel refuses the events.
  bool available() const { return available_; }
  void start();
  HwCounts stop();

 private:
  int fds_[3] = {-1, -1, -1};
  bool available_ = false;
};

}  // namespace simdrt::bench
