// Benchmark driver: sweeps select/join variants and writes one CSV row per
// measurement. Exit codes: 0 ok, 1 verification failure, 2 bad config or
// missing native backend, 3 I/O error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "simdrt/bench.hpp"

namespace {

using namespace simdrt;

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  for (const std::string& item : split(s)) {
    std::istringstream in(item);
    in.imbue(std::locale::classic());
    T v{};
    if (!(in >> v) || !in.eof()) throw std::invalid_argument(std::string("bad ") + what + " '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(std::string("empty ") + what + " list");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Spatial select/join benchmark over the vectorized R-tree"};

  std::string op_name = "select";
  std::string variants = "all";
  std::string layouts = "d1";
  std::string ns = "100000";
  std::string fanouts = "64";
  std::string selectivities = "0.001";
  std::uint64_t queries = 1000;
  bench::BenchConfig base;
  std::string backend_name = "emulated";
  std::string csv_path = "-";

  app.add_option("--op", op_name, "select or join")->check(CLI::IsMember({"select", "join"}));
  app.add_option("--variant", variants, "comma-separated variant ids, or 'all'");
  app.add_option("--layout", layouts, "comma-separated layouts among d0,d1,d2");
  app.add_option("--n", ns, "dataset size(s)");
  app.add_option("--fanout", fanouts, "fanout(s), powers of two in [4, 4096]");
  app.add_option("--selectivity", selectivities, "select window selectivity(s) in (0, 1]");
  auto* q_opt = app.add_option("--queries", queries, "select: queries per config; join: timed repetitions (default 1)");
  app.add_option("--seed", base.seed, "generator seed");
  app.add_option("--backend", backend_name, "emulated, counting or native")
      ->check(CLI::IsMember({"emulated", "counting", "native"}));
  app.add_option("--pf-distance", base.pf_distance, "prefetch distance for v-o1-o2");
  app.add_option("--prefetch-level", base.prefetch_level, "prefetch cache level hint (1, 2, 3)");
  app.add_option("--epsilon", base.epsilon, "join rectangle half-extent");
  app.add_flag("--sorted", base.sorted, "sort node entries on lo_x for every variant");
  app.add_flag("--verify", base.verify, "check every result against the linear-scan oracle");
  app.add_flag("--perf-counters", base.perf_counters, "attach Linux perf hardware counters when permitted");
  app.add_option("--csv", csv_path, "output path, '-' for stdout");
  app.add_option("--snapshot", base.snapshot, "tree snapshot path: loaded if present, written otherwise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::vector<bench::BenchConfig> configs;
  try {
    base.op = bench::parse_op(op_name);
    base.backend = parse_backend(backend_name);
    base.queries = q_opt->count() > 0 ? queries : (base.op == bench::Op::join ? 1 : queries);

    const std::vector<std::string> ids = variants == "all" ? bench::variant_ids(base.op) : split(variants);
    std::vector<Layout> lays;
    for (const std::string& l : split(layouts)) lays.push_back(parse_layout(l));
    if (lays.empty()) throw std::invalid_argument("empty layout list");

    for (std::uint64_t n : parse_list<std::uint64_t>(ns, "n")) {
      for (std::uint32_t f : parse_list<std::uint32_t>(fanouts, "fanout")) {
        for (double s : parse_list<double>(selectivities, "selectivity")) {
          for (const std::string& id : ids) {
            const bench::VariantSpec v = bench::parse_variant(base.op, id);
            std::set<Layout> run_on;
            for (Layout l : lays) {
              if (v.scalar) run_on.insert(Layout::d0);
              else if (l == Layout::d1 || (l == Layout::d2 && !v.join.o5)) run_on.insert(l);
            }
            if (run_on.empty() && variants != "all") {
              throw std::invalid_argument("variant '" + id + "' cannot run on the requested layouts");
            }
            for (Layout l : run_on) {
              bench::BenchConfig c = base;
              c.n = n;
              c.fanout = f;
              c.selectivity = s;
              c.variant = id;
              c.layout = l;
              c.check();
              configs.push_back(c);
            }
          }
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 2;
  }

  bench::BenchReport report;
  bench::BenchSession session;
  try {
    for (const bench::BenchConfig& c : configs) {
      std::cerr << "bench: " << bench::to_string(c.op) << ' ' << c.variant << " n=" << c.n << " F=" << c.fanout
                << " s=" << c.selectivity << '\n';
      session.run(c, report);
    }
  } catch (const bench::BenchError& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 2;
  }

  if (csv_path == "-") {
    bench::write_csv(std::cout, report);
  } else {
    std::ofstream out(csv_path);
    if (!out) {
      std::cerr << "bench: cannot open '" << csv_path << "' for writing\n";
      return 3;
    }
    bench::write_csv(out, report);
    if (!out) {
      std::cerr << "bench: write to '" << csv_path << "' failed\n";
      return 3;
    }
  }

  std::map<std::string, std::pair<double, std::uint64_t>> mean;
  for (const bench::BenchRow& r : report.rows) {
    auto& m = mean[r.cfg.variant + "/" + std::string(to_string(r.effective_layout)) + "/F" +
                   std::to_string(r.cfg.fanout)];
    m.first += static_cast<double>(r.latency_ns);
    ++m.second;
  }
  for (const auto& [k, m] : mean) {
    std::cerr << "bench: mean " << k << " " << m.first / static_cast<double>(m.second) << " ns\n";
  }

  if (report.verification_failures > 0) {
    std::cerr << "bench: " << report.verification_failures << " verification failure(s)\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
