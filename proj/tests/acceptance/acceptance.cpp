// Acceptance suite: one PASS/FAIL line per criterion, tolerances and time
// limits pinned below. Exit status is non-zero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "gradient_check.hpp"
#include "lonas/errors.hpp"
#include "lonas/fitness.hpp"
#include "lonas/landscape.hpp"
#include "lonas/lon.hpp"
#include "lonas/search.hpp"
#include "lonas/trainer.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using lonas::ArchSpec;
using lonas::SpaceConfig;

namespace {

const std::string kCli = LONAS_CLI_PATH;
const fs::path kData = LONAS_DATA_DIR;
const unsigned kThreads = std::max(1u, std::thread::hardware_concurrency());

struct Result {
  bool pass = false;
  std::string detail;
};

int run_cli(const std::string& args) {
  const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lonas_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

lonas::Landscape synthetic(const lonas::FitnessProvider& p, int d, int w) {
  return lonas::Landscape(lonas::tabulate(p, SpaceConfig(d, w), kThreads));
}

oracle::Tuple tuple(const ArchSpec& s) { return {s.widths().begin(), s.widths().end()}; }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

Result space_cardinality() {
  const auto dir = scratch("c1");
  const int code = run_cli("--depth 3 --width 10 --out-dir " + dir.string() + " enumerate");
  const auto text = slurp(dir / "space.csv");
  fs::remove_all(dir);
  const auto rows = std::count(text.begin(), text.end(), '\n') - 1;
  return {code == 0 && rows == 1110, "exit " + std::to_string(code) + ", " + std::to_string(rows) + " architectures"};
}

Result adjacency_count() {
  const auto adj = lonas::adjacency_pairs(SpaceConfig(3, 10));
  const double mean = adj.mean_degree(1110);
  std::ostringstream s;
  s << adj.pairs.size() << " symmetrised pairs, " << adj.directed_relations << " directed relations, mean degree "
    << mean;
  const bool ok = adj.pairs.size() == 5879 && std::abs(mean - 10.59) < 0.005;
  if (!ok) s << " (expected 5879 pairs, mean degree 10.59)";
  return {ok, s.str()};
}

Result basin_partition() {
  bool ok = true;
  std::ostringstream s;
  for (bool linear : {true, false}) {
    const auto land = linear ? synthetic(lonas::SyntheticLinearProvider{}, 3, 10)
                             : synthetic(lonas::SyntheticBimodalProvider{}, 3, 10);
    const auto basins = lonas::compute_basins(land);
    std::size_t total = 0;
    for (auto b : basins.basin_sizes()) total += b;
    const auto scan = lonas::find_local_optima(land);
    std::vector<ArchSpec> image;
    for (auto i : basins.optima()) image.push_back(land.space().spec(i));
    ok = ok && total == 1110 && scan.optima == image;
    s << (linear ? "linear" : "bimodal") << ": sum " << total << ", " << image.size() << " optima"
      << (scan.optima == image ? "" : " (scan disagrees)") << "; ";
  }
  return {ok, s.str()};
}

// The required (2,5) case has a single optimum, so the larger spaces are
// checked as well to exercise multi-node graphs.
Result lon_oracle_equivalence() {
  bool ok = true;
  std::ostringstream s;
  for (auto [d, w] : {std::pair{2, 5}, {2, 10}, {3, 10}}) {
    const auto land = synthetic(lonas::SyntheticBimodalProvider{}, d, w);
    const auto lon = lonas::build_lon(lonas::compute_basins(land), land, 2, kThreads);
    const auto table =
        oracle::tabulate([](const oracle::Tuple& t) { return lonas::synthetic_bimodal(ArchSpec(t)); }, d, w);
    const auto want = oracle::lon_edges(table, d, w, 2);
    oracle::EdgeMap got;
    for (const auto& e : lon.edges) {
      got[{tuple(lon.nodes[e.source].arch), tuple(lon.nodes[e.target].arch)}] = e.weight;
    }
    ok = ok && got == want;
    s << "(" << d << "," << w << "): " << got.size() << " edges built, " << want.size() << " enumerated"
      << (got == want ? "" : " MISMATCH") << "; ";
  }
  return {ok, s.str()};
}

Result mlon_structure() {
  bool ok = true;
  std::ostringstream s;
  for (bool linear : {false, true}) {
    const auto land = linear ? synthetic(lonas::SyntheticLinearProvider{}, 3, 10)
                             : synthetic(lonas::SyntheticBimodalProvider{}, 3, 10);
    const auto lon = lonas::build_lon(lonas::compute_basins(land), land, 2, kThreads);
    const auto mlon = lonas::derive_mlon(lon);
    const auto m = lonas::compute_metrics(lon, mlon);
    const bool dag = lonas::topological_order(mlon).has_value();
    const auto go = *lon.node_of(m.global_optimum);
    const bool go_sink = std::find(mlon.sinks.begin(), mlon.sinks.end(), go) != mlon.sinks.end();
    std::vector<std::size_t> out(mlon.nodes.size(), 0);
    for (const auto& e : mlon.edges) ++out[e.source];
    const auto zero_out = static_cast<std::size_t>(std::count(out.begin(), out.end(), 0u));
    ok = ok && dag && go_sink && m.funnel_count == zero_out && m.funnel_count == m.sink_count;
    if (linear) ok = ok && m.node_count == 1 && m.funnel_count == 1 && m.edge_count == 0;
    s << (linear ? "linear" : "bimodal") << ": dag=" << dag << " go_sink=" << go_sink << " LO=" << m.node_count
      << " Edg=" << m.edge_count << " Fnl=" << m.funnel_count << "; ";
  }
  return {ok, s.str()};
}

Result weight_conservation() {
  std::size_t sources = 0;
  std::size_t bad = 0;
  for (auto [d, w] : {std::pair{2, 5}, {2, 10}, {3, 10}}) {
    const auto land = synthetic(lonas::SyntheticBimodalProvider{}, d, w);
    const auto lon = lonas::build_lon(lonas::compute_basins(land), land, 2, kThreads);
    std::vector<std::uint64_t> out(lon.nodes.size(), 0);
    for (const auto& e : lon.edges) out[e.source] += e.weight;
    for (std::size_t i = 0; i < lon.nodes.size(); ++i) {
      ++sources;
      if (out[i] != oracle::sequence_count(tuple(lon.nodes[i].arch), 2, d, w)) ++bad;
    }
  }
  return {bad == 0, std::to_string(sources - bad) + "/" + std::to_string(sources) +
                        " sources conserve weight over (2,5), (2,10), (3,10)"};
}

Result ils_effectiveness() {
  lonas::IlsConfig cfg;  // k = 2, t = 20, 100 runs, base seed 0
  const auto linear = synthetic(lonas::SyntheticLinearProvider{}, 3, 10);
  const auto lt = lonas::run_ils_batch(linear, cfg, kThreads);
  const auto go = lonas::top_m_indices(linear, 1).front();
  std::size_t reached = 0;
  for (const auto& t : lt) reached += t.final_optimum == linear.space().spec(go) ? 1 : 0;

  const auto bimodal = synthetic(lonas::SyntheticBimodalProvider{}, 3, 10);
  const auto a = lonas::aggregate_ils(lonas::run_ils_batch(bimodal, cfg, kThreads));
  const auto b = lonas::aggregate_ils(lonas::run_ils_batch(bimodal, cfg, 1));
  const bool stable = same_bits(a.global_fraction, b.global_fraction) && a.median_first_top_m_hit.has_value() &&
                      b.median_first_top_m_hit.has_value() &&
                      same_bits(*a.median_first_top_m_hit, *b.median_first_top_m_hit);
  std::ostringstream s;
  s << "linear " << reached << "/100; bimodal GO fraction " << a.global_fraction << ", median first top-5 hit "
    << (a.median_first_top_m_hit ? std::to_string(*a.median_first_top_m_hit) : "none")
    << (stable ? " (bitwise stable)" : " (unstable)");
  return {reached == 100 && stable, s.str()};
}

Result trainer_determinism() {
  const auto data =
      lonas::ingest_dataset(kData / "linear.csv", lonas::DatasetSchema::load(kData / "linear.schema.json"));
  lonas::TrainConfig cfg;
  const auto a = lonas::evaluate_batch(ArchSpec({3}), data, cfg, kThreads);
  const auto b = lonas::evaluate_batch(ArchSpec({3}), data, cfg, kThreads);
  const double reg = gradcheck::max_relative_error(lonas::TaskKind::regression);
  const double cls = gradcheck::max_relative_error(lonas::TaskKind::classification);
  std::ostringstream s;
  s.precision(17);
  s << "mean R2 " << a.mean_r2 << " vs " << b.mean_r2 << "; gradient rel. error " << std::max(reg, cls);
  return {std::abs(a.mean_r2 - b.mean_r2) <= 1e-12 && a.mean_r2 > 0.99 && reg < 1e-5 && cls < 1e-5, s.str()};
}

Result r_squared_identities() {
  const std::vector<double> y{1.0, 4.0, 2.0, 8.0, 5.0};
  const std::vector<double> mean(y.size(), 4.0);
  const bool identities = lonas::r_squared(y, y) == 1.0 && lonas::r_squared(y, mean) == 0.0;
  lonas::Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + lonas::uniform_index(rng, 50);
    const double scale = lonas::uniform_real(rng, 0.1, 10.0);
    const double shift = lonas::uniform_real(rng, -100.0, 100.0);
    std::vector<double> a(n), p(n), a2(n), p2(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = lonas::uniform_real(rng, -5.0, 5.0);
      p[i] = a[i] + lonas::uniform_real(rng, -1.0, 1.0);
      a2[i] = scale * a[i] + shift;
      p2[i] = scale * p[i] + shift;
    }
    worst = std::max(worst, std::abs(lonas::r_squared(a, p) - lonas::r_squared(a2, p2)));
  }
  std::ostringstream s;
  s << "identities " << (identities ? "hold" : "fail") << ", max affine drift " << worst;
  return {identities && worst <= 1e-12, s.str()};
}

Result report_from_ingested_table() {
  const auto dir = scratch("c10");
  const auto base = "--depth 1 --width 3 --out-dir " + dir.string() + " ";
  int code = run_cli(base + "evaluate --provider trainer --batch-runs 2 --dataset " + (kData / "linear.csv").string() +
                     " --schema " + (kData / "linear.schema.json").string() + " --output " +
                     (dir / "linear.csv").string());
  if (code == 0) code = run_cli(base + "report --fitness " + (dir / "linear.csv").string());
  const auto table = slurp(dir / "table.csv");
  const auto problems = lonas::validate_report_json(slurp(dir / "report_linear.json"));
  fs::remove_all(dir);
  const bool header = table.rfind("dataset,go_arch,go_fitness,LO,Edg,Fnl\nlinear,", 0) == 0;
  std::string detail = "exit " + std::to_string(code) + ", " + std::to_string(problems.size()) + " schema problems";
  if (!problems.empty()) detail += " (first: " + problems.front() + ")";
  return {code == 0 && header && problems.empty(), detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0 = no limit
    std::function<Result()> check;
  };
  const Criterion criteria[] = {
      {1, "space cardinality", 1.0, space_cardinality},
      {2, "adjacency count", 5.0, adjacency_count},
      {3, "basin partition", 10.0, basin_partition},
      {4, "LON oracle equivalence", 10.0, lon_oracle_equivalence},
      {5, "MLON structure", 0.0, mlon_structure},
      {6, "weight conservation", 0.0, weight_conservation},
      {7, "ILS effectiveness", 0.0, ils_effectiveness},
      {8, "trainer determinism", 60.0, trainer_determinism},
      {9, "R2 identities", 0.0, r_squared_identities},
      {10, "report from ingested table", 0.0, report_from_ingested_table},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      r.pass = false;
      r.detail += "; exceeded " + std::to_string(c.limit_seconds) + " s";
    }
    failures += r.pass ? 0 : 1;
    std::ostringstream t;
    t.precision(3);
    t << std::fixed << secs;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ") [" << t.str()
              << " s]: " << r.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
