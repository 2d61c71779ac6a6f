#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "lonas/errors.hpp"
#include "lonas/landscape.hpp"
#include "oracles.hpp"

using lonas::ArchSpec;
using lonas::SpaceConfig;

namespace {

lonas::Landscape synthetic(const lonas::FitnessProvider& p, int d, int w) {
  return lonas::Landscape(lonas::tabulate(p, SpaceConfig(d, w)));
}

lonas::Landscape linear3() { return synthetic(lonas::SyntheticLinearProvider{}, 3, 10); }
lonas::Landscape bimodal3() { return synthetic(lonas::SyntheticBimodalProvider{}, 3, 10); }

oracle::Tuple tuple(const ArchSpec& s) { return {s.widths().begin(), s.widths().end()}; }

}  // namespace

TEST(HillClimb, LinearReachesFullSpec) {
  const auto land = linear3();
  EXPECT_EQ(lonas::hill_climb({1, 1, 1}, land), ArchSpec({10, 10, 10}));
  EXPECT_EQ(lonas::hill_climb({10, 10, 10}, land), ArchSpec({10, 10, 10}));
  EXPECT_EQ(lonas::hill_climb_trace({10, 10, 10}, land).size(), 1u);
}

TEST(HillClimb, BimodalTerminusIsLocalOptimum) {
  const auto land = bimodal3();
  const auto end = lonas::hill_climb({10}, land);
  const double f_end = land.fitness().at(end);
  for (const auto& t : oracle::neighbours(tuple(end), 3, 10)) {
    EXPECT_GE(f_end, land.fitness().at(ArchSpec(t)));
  }
}

TEST(HillClimb, TraceStrictlyIncreasesAndIsIdempotent) {
  const auto land = bimodal3();
  for (const auto& s : land.space().specs()) {
    const auto trace = lonas::hill_climb_trace(s, land);
    ASSERT_LE(trace.size(), land.size());
    for (std::size_t i = 1; i < trace.size(); ++i) {
      EXPECT_GT(land.fitness().at(trace[i]), land.fitness().at(trace[i - 1]));
    }
    const auto end = lonas::hill_climb(s, land);
    EXPECT_EQ(trace.back(), end);
    EXPECT_EQ(lonas::hill_climb(end, land), end);
  }
}

TEST(HillClimb, AgreesWithOracleClimb) {
  for (auto [d, w] : {std::pair{2, 5}, {3, 10}}) {
    const auto land = synthetic(lonas::SyntheticBimodalProvider{}, d, w);
    const auto table = oracle::tabulate([](const oracle::Tuple& t) { return lonas::synthetic_bimodal(ArchSpec(t)); }, d, w);
    for (const auto& s : land.space().specs()) {
      EXPECT_EQ(tuple(lonas::hill_climb(s, land)), oracle::climb(tuple(s), table, d, w));
    }
  }
}

TEST(HillClimb, TieBreaksToCanonicallySmallest) {
  // (1) has neighbours (2) and (1,1) with equal fitness; (2) is canonically smaller.
  const SpaceConfig cfg(2, 2);
  std::vector<double> v(cfg.size(), 0.0);
  v[lonas::canonical_index({2}, cfg)] = 5.0;
  v[lonas::canonical_index({1, 1}, cfg)] = 5.0;
  const lonas::Landscape land(lonas::FitnessTable(cfg, v));
  const auto trace = lonas::hill_climb_trace({1}, land);
  ASSERT_GE(trace.size(), 2u);
  EXPECT_EQ(trace[1], ArchSpec({2}));
}

TEST(LocalOptima, LinearIsUnimodal) {
  const auto scan = lonas::find_local_optima(linear3());
  EXPECT_EQ(scan.optima, std::vector<ArchSpec>{ArchSpec({10, 10, 10})});
  EXPECT_FALSE(scan.neutral());
}

TEST(LocalOptima, ConstantFitnessIsAllOptimaWithWarning) {
  const SpaceConfig cfg(1, 3);
  const lonas::Landscape land(lonas::FitnessTable(cfg, {1.0, 1.0, 1.0}));
  const auto scan = lonas::find_local_optima(land);
  EXPECT_EQ(scan.optima.size(), 3u);
  EXPECT_TRUE(scan.neutral());
}

TEST(LocalOptima, BimodalScanAgreesWithBasinImageAndOracle) {
  const auto land = bimodal3();
  const auto scan = lonas::find_local_optima(land);
  ASSERT_FALSE(scan.neutral());
  const auto basins = lonas::compute_basins(land);
  std::vector<ArchSpec> image;
  for (auto i : basins.optima()) image.push_back(land.space().spec(i));
  EXPECT_EQ(scan.optima, image);

  const auto table = oracle::tabulate([](const oracle::Tuple& t) { return lonas::synthetic_bimodal(ArchSpec(t)); }, 3, 10);
  const auto want = oracle::local_optima(table, 3, 10);
  ASSERT_EQ(scan.optima.size(), want.size());
  std::size_t k = 0;
  for (const auto& t : want) EXPECT_EQ(tuple(scan.optima[k++]), t);
  EXPECT_EQ(scan.optima.size(), 8u);
}

TEST(Basins, LinearSingleBasin) {
  const auto basins = lonas::compute_basins(linear3());
  ASSERT_EQ(basins.optima().size(), 1u);
  EXPECT_EQ(basins.basin_sizes()[0], 1110u);
}

TEST(Basins, TwoNodeChain) {
  const SpaceConfig cfg(1, 2);
  const lonas::Landscape land(lonas::FitnessTable(cfg, {0.0, 1.0}));
  const auto basins = lonas::compute_basins(land);
  EXPECT_EQ(basins.terminus_of(ArchSpec({1})), ArchSpec({2}));
  EXPECT_EQ(basins.terminus_of(ArchSpec({2})), ArchSpec({2}));
  ASSERT_EQ(basins.basin_sizes().size(), 1u);
  EXPECT_EQ(basins.basin_sizes()[0], 2u);
}

TEST(Basins, PartitionAndMemoisationMatchIndependentClimbs) {
  const auto land = bimodal3();
  const auto basins = lonas::compute_basins(land);
  std::size_t total = 0;
  for (auto s : basins.basin_sizes()) total += s;
  EXPECT_EQ(total, 1110u);
  for (std::size_t i = 0; i < land.size(); ++i) {
    EXPECT_EQ(land.space().spec(basins.terminus_of(i)), lonas::hill_climb(land.space().spec(i), land));
    EXPECT_TRUE(basins.is_optimum(basins.terminus_of(i)));
  }
}

TEST(Basins, InvariantUnderMonotoneTransform) {
  const auto land = bimodal3();
  std::vector<double> warped(land.fitness().values().begin(), land.fitness().values().end());
  for (double& v : warped) v = std::exp(v / 3.0) - 7.0;
  const lonas::Landscape other(lonas::FitnessTable(land.config(), warped));
  EXPECT_EQ(lonas::compute_basins(land).terminus(), lonas::compute_basins(other).terminus());
  EXPECT_EQ(lonas::find_local_optima(land).optima, lonas::find_local_optima(other).optima);
}

TEST(Basins, RejectsNonFixedPointTerminus) {
  const SpaceConfig cfg(1, 2);
  EXPECT_THROW(lonas::BasinMap(cfg, {1, 0}), lonas::GraphError);
}

TEST(Basins, CsvExports) {
  const SpaceConfig cfg(1, 2);
  const lonas::Landscape land(lonas::FitnessTable(cfg, {0.0, 1.0}));
  const auto basins = lonas::compute_basins(land);
  EXPECT_EQ(basins.to_csv(), "architecture,terminus,is_optimum\n1,2,false\n2,2,true\n");
  EXPECT_EQ(basins.summary_csv(land.fitness()), "optimum,fitness,basin_size\n2,1,2\n");
}
