#include <gtest/gtest.h>

#include <random>
#include <set>

#include "lonas/arch_space.hpp"
#include "lonas/errors.hpp"
#include "oracles.hpp"

using lonas::ArchSpec;
using lonas::SpaceConfig;

namespace {

std::vector<ArchSpec> specs(std::initializer_list<std::initializer_list<int>> list) {
  std::vector<ArchSpec> out;
  for (auto l : list) out.emplace_back(l);
  std::sort(out.begin(), out.end());
  return out;
}

oracle::Tuple tuple(const ArchSpec& s) { return {s.widths().begin(), s.widths().end()}; }

}  // namespace

TEST(SpaceConfig, RejectsNonPositiveBounds) {
  EXPECT_THROW(SpaceConfig(0, 10), lonas::InputError);
  EXPECT_THROW(SpaceConfig(3, 0), lonas::InputError);
  EXPECT_THROW(SpaceConfig(-1, -1), lonas::InputError);
}

TEST(EnumerateSpace, Cardinality) {
  EXPECT_EQ(lonas::enumerate_space(SpaceConfig(3, 10)).size(), 1110u);
  EXPECT_EQ(lonas::enumerate_space(SpaceConfig(1, 1)), specs({{1}}));
  EXPECT_EQ(lonas::enumerate_space(SpaceConfig(2, 3)).size(), 12u);
  EXPECT_EQ(SpaceConfig(3, 10).size(), 1110u);
  EXPECT_EQ(SpaceConfig(4, 7).size(), 7u + 49u + 343u + 2401u);
}

TEST(EnumerateSpace, CanonicalOrderMatchesOracle) {
  for (auto [d, w] : {std::pair{1, 1}, {2, 3}, {3, 10}, {4, 4}}) {
    const SpaceConfig cfg(d, w);
    const auto got = lonas::enumerate_space(cfg);
    const auto want = oracle::all_tuples(d, w);
    ASSERT_EQ(got.size(), want.size());
    std::size_t i = 0;
    for (const auto& t : want) {
      EXPECT_EQ(tuple(got[i]), t);
      EXPECT_EQ(lonas::canonical_index(got[i], cfg), i);
      EXPECT_EQ(lonas::spec_at(i, cfg), got[i]);
      ++i;
    }
  }
}

TEST(ArchSpec, EncodeDecode) {
  EXPECT_EQ(ArchSpec({4, 3}).encode(), "4-3");
  EXPECT_EQ(ArchSpec({10, 1, 10}).encode(), "10-1-10");
  EXPECT_EQ(ArchSpec::decode("4-3"), ArchSpec({4, 3}));
  EXPECT_EQ(ArchSpec::decode("10"), ArchSpec({10}));
  for (const char* bad : {"", "-", "4-", "-4", "4--3", "a", "4-x", "0", "4-0", "3.5"}) {
    EXPECT_THROW(ArchSpec::decode(bad), lonas::FormatError) << bad;
  }
}

TEST(ArchSpec, EncodeDecodeIsIdentityOverSpace) {
  for (const auto& s : lonas::enumerate_space(SpaceConfig(3, 12))) {
    ASSERT_EQ(ArchSpec::decode(s.encode()), s);
  }
}

TEST(ArchSpec, Validity) {
  const SpaceConfig cfg(3, 10);
  EXPECT_TRUE(ArchSpec({10, 10, 10}).valid_in(cfg));
  EXPECT_FALSE(ArchSpec({11}).valid_in(cfg));
  EXPECT_FALSE(ArchSpec({1, 1, 1, 1}).valid_in(cfg));
  EXPECT_FALSE(ArchSpec().valid_in(cfg));
}

TEST(WidthOffsets, Examples) {
  const SpaceConfig cfg(3, 10);
  EXPECT_EQ(lonas::width_offsets({4, 3}, cfg), specs({{3, 3}, {5, 3}, {4, 2}, {4, 4}}));
  EXPECT_EQ(lonas::width_offsets({1}, cfg), specs({{2}}));
  EXPECT_EQ(lonas::width_offsets({10, 10, 10}, cfg), specs({{9, 10, 10}, {10, 9, 10}, {10, 10, 9}}));
}

TEST(DepthOffsets, Examples) {
  const SpaceConfig cfg(3, 10);
  EXPECT_EQ(lonas::depth_offsets({4, 3}, cfg), specs({{4, 4, 3}, {4, 3, 3}, {4}, {3}}));
  EXPECT_EQ(lonas::depth_offsets({5}, cfg), specs({{5, 5}}));
  EXPECT_EQ(lonas::depth_offsets({2, 2, 8}, cfg), specs({{2, 8}, {2, 2}}));
}

TEST(Neighborhood, Examples) {
  const SpaceConfig cfg(3, 10);
  const auto n43 = lonas::neighborhood({4, 3}, cfg);
  EXPECT_EQ(n43.size(), 8u);
  EXPECT_EQ(n43, specs({{3, 3}, {5, 3}, {4, 2}, {4, 4}, {4, 4, 3}, {4, 3, 3}, {4}, {3}}));
  EXPECT_EQ(lonas::neighborhood({1}, cfg), specs({{2}, {1, 1}}));

  const auto n228 = lonas::neighborhood({2, 2, 8}, cfg);
  EXPECT_NE(std::find(n228.begin(), n228.end(), ArchSpec({2, 2})), n228.end());
  const auto n22 = lonas::neighborhood({2, 2}, cfg);
  EXPECT_EQ(std::find(n22.begin(), n22.end(), ArchSpec({2, 2, 8})), n22.end());
}

TEST(Neighborhood, MatchesOracleEverywhere) {
  for (auto [d, w] : {std::pair{1, 1}, {2, 5}, {3, 10}, {4, 3}}) {
    const SpaceConfig cfg(d, w);
    for (const auto& s : lonas::enumerate_space(cfg)) {
      const auto got = lonas::neighborhood(s, cfg);
      const auto want = oracle::neighbours(tuple(s), d, w);
      ASSERT_EQ(got.size(), want.size()) << s;
      std::size_t i = 0;
      for (const auto& t : want) EXPECT_EQ(tuple(got[i++]), t) << s;
    }
  }
}

TEST(Neighborhood, Properties) {
  const SpaceConfig cfg(3, 10);
  const lonas::ArchSpace space(cfg);
  for (const auto& s : space.specs()) {
    const auto wo = lonas::width_offsets(s, cfg);
    const auto n = lonas::neighborhood(s, cfg);
    // Irreflexive and closed.
    EXPECT_EQ(std::find(n.begin(), n.end(), s), n.end());
    for (const auto& t : n) EXPECT_TRUE(t.valid_in(cfg));
    // Width moves are symmetric.
    for (const auto& t : wo) {
      const auto back = lonas::width_offsets(t, cfg);
      EXPECT_NE(std::find(back.begin(), back.end(), s), back.end());
    }
    // Cloning can always be undone by pruning.
    if (s.depth() < 3) {
      for (std::size_t i = 0; i < s.depth(); ++i) {
        std::vector<int> clone(s.widths().begin(), s.widths().end());
        clone.insert(clone.begin() + static_cast<std::ptrdiff_t>(i), s[i]);
        const auto back = lonas::depth_offsets(ArchSpec(clone), cfg);
        EXPECT_NE(std::find(back.begin(), back.end(), s), back.end());
      }
    }
    // The precomputed index table agrees.
    const auto ids = space.neighbors(space.index_of(s));
    ASSERT_EQ(ids.size(), n.size());
    for (std::size_t k = 0; k < n.size(); ++k) EXPECT_EQ(space.spec(ids[k]), n[k]);
  }
  // Pruning then cloning does not always come back.
  const auto pruned = lonas::depth_offsets({2, 2, 8}, cfg);
  for (const auto& t : pruned) {
    if (t == ArchSpec({2, 2})) {
      const auto back = lonas::depth_offsets(t, cfg);
      EXPECT_EQ(std::find(back.begin(), back.end(), ArchSpec({2, 2, 8})), back.end());
    }
  }
}

TEST(Neighborhood, Deterministic) {
  const SpaceConfig cfg(3, 10);
  std::mt19937 rng(5);
  const auto all = lonas::enumerate_space(cfg);
  for (int i = 0; i < 50; ++i) {
    const auto& s = all[rng() % all.size()];
    EXPECT_EQ(lonas::neighborhood(s, cfg), lonas::neighborhood(s, cfg));
  }
}

TEST(AdjacencyPairs, SmallSpace) {
  const auto adj = lonas::adjacency_pairs(SpaceConfig(1, 2));
  ASSERT_EQ(adj.pairs.size(), 1u);
  EXPECT_EQ(adj.pairs[0], std::make_pair(ArchSpec({1}), ArchSpec({2})));
  EXPECT_EQ(adj.directed_relations, 2u);
}

TEST(AdjacencyPairs, FullSpaceMatchesOracleCount) {
  const auto adj = lonas::adjacency_pairs(SpaceConfig(3, 10));
  std::set<std::pair<oracle::Tuple, oracle::Tuple>> pairs;
  std::size_t directed = 0;
  for (const auto& s : oracle::all_tuples(3, 10)) {
    for (const auto& t : oracle::neighbours(s, 3, 10)) {
      ++directed;
      pairs.emplace(std::min(s, t), std::max(s, t));
    }
  }
  EXPECT_EQ(adj.pairs.size(), pairs.size());
  EXPECT_EQ(adj.directed_relations, directed);
  EXPECT_EQ(adj.pairs.size(), 5879u);
  EXPECT_NEAR(adj.mean_degree(1110), 10.59, 0.005);
}

TEST(SpaceCsv, HeaderAndRows) {
  const auto csv = lonas::space_to_csv(SpaceConfig(2, 2));
  EXPECT_EQ(csv, "architecture\n1\n2\n1-1\n1-2\n2-1\n2-2\n");
}
