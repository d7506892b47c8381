#include "simdrt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <locale>
#include <random>
#include <sstream>

namespace simdrt::bench {

namespace {

float unit_float(std::mt19937_64& rng) {
  // 24 random bits scaled by 2^-24: exact in binary32, never reaches 1.
  return static_cast<float>(rng() >> 40) * 0x1p-24f;
}

float clamp_unit(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

}  // namespace

std::vector<Point> gen_uniform(std::uint64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> pts(n);
  for (Point& p : pts) {
    p.x = unit_float(rng);
    p.y = unit_float(rng);
  }
  return pts;
}

std::vector<Rect> gen_queries(std::uint64_t count, double selectivity, std::uint64_t seed) {
  if (!(selectivity > 0.0 && selectivity <= 1.0)) {
    throw std::invalid_argument("selectivity must lie in (0, 1]");
  }
  const double side = std::sqrt(selectivity);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Rect> qs(count);
  for (Rect& q : qs) {
    const double x = u(rng) * (1.0 - side);
    const double y = u(rng) * (1.0 - side);
    q = {clamp_unit(x), clamp_unit(y), clamp_unit(x + side), clamp_unit(y + side)};
  }
  return qs;
}

std::vector<Rect> expand_points(std::span<const Point> points, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
  std::vector<Rect> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i].x, y = points[i].y;
    out[i] = {clamp_unit(x - epsilon), clamp_unit(y - epsilon), clamp_unit(x + epsilon),
              clamp_unit(y + epsilon)};
  }
  return out;
}

Op parse_op(std::string_view name) {
  if (name == "select") return Op::select;
  if (name == "join") return Op::join;
  throw std::invalid_argument("unknown operator '" + std::string(name) + "'");
}

std::string_view to_string(Op op) { return op == Op::select ? "select" : "join"; }

std::vector<std::string> variant_ids(Op op) {
  if (op == Op::select) return {"scalar-logical", "scalar-bitwise", "v", "v-o1", "v-o1-o2"};
  return {"scalar", "scalar-o3", "v", "v-o3", "v-o4", "v-o3-o4", "v-o5", "v-o3-o5"};
}

VariantSpec parse_variant(Op op, std::string_view id) {
  VariantSpec v;
  v.id = std::string(id);
  v.op = op;
  if (op == Op::select) {
    if (id == "scalar-logical") {
      v.scalar = true;
    } else if (id == "scalar-bitwise") {
      v.scalar = true;
      v.bitwise = true;
    } else if (id == "v") {
    } else if (id == "v-o1") {
      v.select.use_queue = true;
    } else if (id == "v-o1-o2") {
      v.select.use_queue = true;
      v.select.use_prefetch = true;
    } else {
      throw std::invalid_argument("unknown select variant '" + v.id + "'");
    }
    return v;
  }
  if (id == "scalar") {
    v.scalar = true;
  } else if (id == "scalar-o3") {
    v.scalar = true;
    v.join.o3 = true;
  } else if (id == "v") {
  } else if (id == "v-o3") {
    v.join.o3 = true;
  } else if (id == "v-o4") {
    v.join.o4 = true;
  } else if (id == "v-o3-o4") {
    v.join.o3 = v.join.o4 = true;
  } else if (id == "v-o5") {
    v.join.o5 = true;
  } else if (id == "v-o3-o5") {
    v.join.o3 = v.join.o5 = true;
  } else {
    throw std::invalid_argument("unknown join variant '" + v.id + "'");
  }
  return v;
}

void BenchConfig::check() const {
  parse_variant(op, variant);
  if (n == 0) throw std::invalid_argument("n must be at least 1");
  check_fanout(fanout);
  if (!(selectivity > 0.0 && selectivity <= 1.0)) throw std::invalid_argument("selectivity must lie in (0, 1]");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
  if (queries == 0) throw std::invalid_argument("queries must be at least 1");
  const VariantSpec v = parse_variant(op, variant);
  if (!v.scalar && layout == Layout::d0) {
    throw std::invalid_argument("vectorized variant '" + variant + "' needs layout d1 or d2");
  }
  if (v.join.o5 && layout != Layout::d1) throw std::invalid_argument("O5 variants need layout d1");
}

// --------------------------------------------------------------------------

std::string csv_header() {
  return "op,variant,layout,backend,n,fanout,selectivity,epsilon,seed,pf_distance,sorted,query,"
         "latency_ns,result_count,oracle_count,nodes_visited,"
         "loads,ref_loads,gathers,expand_loads,broadcasts,stores,compress_stores,permutes,blends,"
         "compares,xlow_compares,masked_adds,prefetches,loads_per_node,formula_loads,"
         "hw_instructions,hw_cache_misses,hw_branch_misses";
}

void write_csv(std::ostream& out, const BenchReport& report) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << csv_header() << '\n';
  for (const BenchRow& r : report.rows) {
    const BenchConfig& c = r.cfg;
    s << to_string(c.op) << ',' << c.variant << ',' << to_string(r.effective_layout) << ','
      << to_string(c.backend) << ',' << c.n << ',' << c.fanout << ',' << c.selectivity << ','
      << c.epsilon << ',' << c.seed << ',' << c.pf_distance << ',' << (r.effective_sorted ? 1 : 0)
      << ',' << r.query_index << ',' << r.latency_ns << ',' << r.result_count << ',';
    if (r.oracle_count) s << *r.oracle_count;
    s << ',' << r.nodes_visited;
    if (r.ops) {
      const vk::OpCounts& o = *r.ops;
      for (std::uint64_t v : {o.loads, o.ref_loads, o.gathers, o.expand_loads, o.broadcasts, o.stores,
                              o.compress_stores, o.permutes, o.blends, o.compares, o.xlow_compares,
                              o.masked_adds, o.prefetches}) {
        s << ',' << v;
      }
      s << ',';
      if (r.nodes_visited > 0) s << static_cast<double>(o.loads) / static_cast<double>(r.nodes_visited);
    } else {
      s << ",,,,,,,,,,,,,,";
    }
    s << ',';
    if (r.formula_loads) s << *r.formula_loads;
    if (r.hw) {
      s << ',' << r.hw->instructions << ',' << r.hw->cache_misses << ',' << r.hw->branch_misses;
    } else {
      s << ",,,";
    }
    s << '\n';
  }
  out << s.str();
}

// --------------------------------------------------------------------------

namespace {

std::uint64_t formula_loads(const RTree& tree, const SelectTrace& trace) {
  constexpr std::uint64_t W = kReferenceLanes;
  std::uint64_t total = 0;
  for (NodeRef r : trace.visited) {
    const std::uint64_t c = tree.header(r).count;
    total += tree.layout() == Layout::d1 ? 4 * ((c + W - 1) / W) : 2 * ((2 * c + W - 1) / W);
  }
  return total;
}

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point a, Clock::time_point b) {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
}

}  // namespace

struct BenchSession::Impl {
  struct Side {
    std::string key;
    std::vector<Rect> data;  // empty until needed
    std::map<std::pair<Layout, bool>, std::shared_ptr<const RTree>> trees;
  };
  Side sides[2];  // 0: select data / join outer, 1: join inner
  std::vector<Rect> queries;
  std::string query_key;

  static std::string data_key(const BenchConfig& c, int side) {
    std::ostringstream k;
    k.imbue(std::locale::classic());
    k << to_string(c.op) << '/' << c.n << '/' << c.fanout << '/' << c.seed << '/' << side << '/'
      << (c.op == Op::join ? c.epsilon : 0.0) << '/' << c.snapshot;
    return k.str();
  }

  const std::vector<Rect>& data(const BenchConfig& c, int side) {
    Side& s = sides[side];
    if (s.data.empty()) {
      const auto pts = gen_uniform(c.n, c.seed + static_cast<std::uint64_t>(side));
      s.data = c.op == Op::join ? expand_points(pts, c.epsilon) : expand_points(pts, 0.0);
    }
    return s.data;
  }

  std::shared_ptr<const RTree> base_tree(const BenchConfig& c, int side) {
    Side& s = sides[side];
    auto it = s.trees.find({Layout::d0, false});
    if (it != s.trees.end()) return it->second;

    std::shared_ptr<const RTree> t;
    const std::string path = c.snapshot.empty() ? "" : (side == 0 ? c.snapshot : c.snapshot + ".inner");
    if (!path.empty() && std::filesystem::exists(path)) {
      RTree loaded;
      try {
        loaded = load_snapshot(path);
      } catch (const std::exception& e) {
        throw BenchError(3, "snapshot '" + path + "': " + e.what());
      }
      if (loaded.fanout() != c.fanout || loaded.object_count() != c.n || loaded.layout() != Layout::d0 ||
          loaded.sorted_on_lo_x()) {
        throw BenchError(2, "snapshot '" + path + "' does not match --n/--fanout");
      }
      t = std::make_shared<const RTree>(std::move(loaded));
    } else {
      t = std::make_shared<const RTree>(build_str(data(c, side), c.fanout, Layout::d0));
      if (!path.empty()) {
        try {
          save_snapshot(*t, path);
        } catch (const std::exception& e) {
          throw BenchError(3, "snapshot '" + path + "': " + e.what());
        }
      }
    }
    s.trees[{Layout::d0, false}] = t;
    return t;
  }

  std::shared_ptr<const RTree> tree(const BenchConfig& c, int side, Layout layout, bool sorted) {
    Side& s = sides[side];
    const std::string key = data_key(c, side);
    if (s.key != key) {
      s = Side{};
      s.key = key;
    }
    auto it = s.trees.find({layout, sorted});
    if (it != s.trees.end()) return it->second;
    const auto base = base_tree(c, side);
    std::shared_ptr<const RTree> t = base;
    if (sorted) t = std::make_shared<const RTree>(sort_nodes_by_lo_x(*t));
    if (layout != Layout::d0) t = std::make_shared<const RTree>(convert_layout(*t, layout));
    s.trees[{layout, sorted}] = t;
    return t;
  }

  const std::vector<Rect>& query_set(const BenchConfig& c) {
    std::ostringstream k;
    k.imbue(std::locale::classic());
    k << c.queries << '/' << c.selectivity << '/' << c.seed;
    if (k.str() != query_key) {
      queries = gen_queries(c.queries, c.selectivity, c.seed ^ 0x5bd1e995u);
      query_key = k.str();
    }
    return queries;
  }

  void run_select(const BenchConfig& c, const VariantSpec& v, BenchReport& report);
  void run_join(const BenchConfig& c, const VariantSpec& v, BenchReport& report);
};

void BenchSession::Impl::run_select(const BenchConfig& c, const VariantSpec& v, BenchReport& report) {
  const bool sorted = c.sorted;
  const Layout layout = v.scalar ? Layout::d0 : c.layout;
  const auto tree = this->tree(c, 0, layout, sorted);
  const auto& qs = query_set(c);
  const bool counting = c.backend == Backend::counting && !v.scalar;

  SelectOptions opts = v.select;
  opts.pf_distance = c.pf_distance;
  opts.prefetch_level = cache_level_from_int(c.prefetch_level);
  SelectContext ctx;
  SelectTrace trace;
  std::vector<ObjectId> scalar_out;
  std::optional<PerfCounters> perf;
  if (c.perf_counters) perf.emplace();

  auto run_once = [&](const Rect& q, SelectTrace* tr) -> std::size_t {
    if (v.scalar) {
      if (v.bitwise) scalar_select_bitwise(*tree, q, scalar_out, tr);
      else scalar_select_logical(*tree, q, scalar_out, tr);
      return scalar_out.size();
    }
    ctx.trace = tr;
    return vec_select(*tree, q, opts, c.backend, ctx).size();
  };

  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    const Rect& q = qs[qi];
    BenchRow row;
    row.cfg = c;
    row.effective_layout = layout;
    row.effective_sorted = sorted;
    row.query_index = qi;

    trace.visited.clear();
    run_once(q, &trace);
    row.nodes_visited = trace.visited.size();
    if (!v.scalar) row.formula_loads = formula_loads(*tree, trace);
    if (c.verify) {
      std::vector<ObjectId> got = v.scalar ? scalar_out : std::vector<ObjectId>(ctx.results.view().begin(), ctx.results.view().end());
      std::sort(got.begin(), got.end());
      const auto want = oracle_select(data(c, 0), q);
      row.oracle_count = want.size();
      if (got != want) ++report.verification_failures;
    }

    if (counting) vk::counter_reset();
    if (perf && perf->available()) perf->start();
    const auto t0 = Clock::now();
    row.result_count = run_once(q, nullptr);
    const auto t1 = Clock::now();
    if (perf && perf->available()) row.hw = perf->stop();
    row.latency_ns = elapsed_ns(t0, t1);
    if (counting) row.ops = vk::counter_snapshot();
    report.rows.push_back(std::move(row));
  }
}

void BenchSession::Impl::run_join(const BenchConfig& c, const VariantSpec& v, BenchReport& report) {
  const bool sorted = c.sorted || v.needs_sorted();
  const Layout layout = v.scalar ? Layout::d0 : c.layout;
  const auto outer = tree(c, 0, layout, sorted);
  const auto inner = tree(c, 1, layout, sorted);
  const bool counting = c.backend == Backend::counting && !v.scalar;

  JoinContext ctx;
  std::vector<JoinPair> scalar_pairs;
  JoinStats stats;
  std::optional<PerfCounters> perf;
  if (c.perf_counters) perf.emplace();

  auto run_once = [&]() -> std::size_t {
    if (v.scalar) {
      scalar_pairs = scalar_join(*outer, *inner, v.join, &stats);
      return scalar_pairs.size();
    }
    vec_join(*outer, *inner, v.join, c.backend, ctx);
    stats = ctx.stats;
    return ctx.out_outer.size();
  };

  std::optional<std::uint64_t> oracle_count;
  for (std::uint64_t rep = 0; rep < c.queries; ++rep) {
    BenchRow row;
    row.cfg = c;
    row.effective_layout = layout;
    row.effective_sorted = sorted;
    row.query_index = rep;

    run_once();
    row.nodes_visited = stats.node_pairs;
    if (c.verify && rep == 0) {
      std::vector<JoinPair> got = v.scalar ? scalar_pairs : ctx.pairs();
      std::sort(got.begin(), got.end());
      const auto want = oracle_join(data(c, 0), data(c, 1));
      oracle_count = want.size();
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i) {
        same = got[i].outer_id == want[i].first && got[i].inner_id == want[i].second;
      }
      if (!same) ++report.verification_failures;
    }
    row.oracle_count = oracle_count;

    if (counting) vk::counter_reset();
    if (perf && perf->available()) perf->start();
    const auto t0 = Clock::now();
    row.result_count = run_once();
    const auto t1 = Clock::now();
    if (perf && perf->available()) row.hw = perf->stop();
    row.latency_ns = elapsed_ns(t0, t1);
    if (counting) row.ops = vk::counter_snapshot();
    report.rows.push_back(std::move(row));
  }
}

BenchSession::BenchSession() : impl_(std::make_unique<Impl>()) {}
BenchSession::~BenchSession() = default;

void BenchSession::run(const BenchConfig& cfg, BenchReport& report) {
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw BenchError(2, e.what());
  }
  if (cfg.backend == Backend::native && !native_available()) {
    throw BenchError(2, "native backend is not available on this machine");
  }
  const VariantSpec v = parse_variant(cfg.op, cfg.variant);
  if (cfg.op == Op::select) {
    impl_->run_select(cfg, v, report);
  } else {
    impl_->run_join(cfg, v, report);
  }
}

BenchReport run_bench(const BenchConfig& cfg) {
  BenchReport report;
  BenchSession session;
  session.run(cfg, report);
  return report;
}

}  // namespace simdrt::bench
