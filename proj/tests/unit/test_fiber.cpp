#include <gtest/gtest.h>

#include <map>
#include <random>

#include "rt/fiber.hpp"
#include "rt/index_set_parser.hpp"
#include "support/harmonic_oracle.hpp"
#include "support/random_sets.hpp"

using rt::Index;
using rt::IndexSet;

namespace {

IndexSet S(const char* src) { return rt::parse_index_set(src); }

bool thick(const char* src, std::vector<Index> prefix) { return rt::is_thick(S(src), prefix); }

}  // namespace

TEST(Fiber, ThickAndThinExamples) {
  EXPECT_TRUE(thick("FULL x FULL", {5}));
  EXPECT_FALSE(thick("FULL x GEO(2)", {5}));
  EXPECT_FALSE(thick("AP(1,2) x FIN(7)", {3}));
  EXPECT_FALSE(thick("AP(1,2) x FULL", {4}));  // empty fiber
  EXPECT_TRUE(thick("FULL x FULL", {}));
  EXPECT_FALSE(thick("GEO(2) x FULL", {}));
  EXPECT_TRUE(thick("FULL x AP(2,3) x FIN(4)", {1}));
  EXPECT_FALSE(thick("FULL x AP(2,3) x (FIN(4) & !FIN(4))", {1}));
}

TEST(Fiber, PinsPrefixCoordinates) {
  const auto f = rt::fiber(S("AP(1,2) x FULL | FIN(3,5) x GEO(2)"), std::vector<Index>{3});
  EXPECT_TRUE(f.contains(std::vector<Index>{3, 8}));
  EXPECT_TRUE(f.contains(std::vector<Index>{3, 7}));
  EXPECT_FALSE(f.contains(std::vector<Index>{5, 8}));
}

TEST(ConditionI, Examples) {
  EXPECT_TRUE(rt::satisfies_condition_I(S("FULL x FULL")).holds);
  EXPECT_TRUE(rt::satisfies_condition_I(S("AP(2,2) x FULL")).holds);
  EXPECT_FALSE(rt::satisfies_condition_I(S("GEO(2) x FULL")).holds);
  EXPECT_FALSE(rt::satisfies_condition_I(S("FULL x POW(2)")).holds);
  EXPECT_FALSE(rt::satisfies_condition_I(S("EMPTY(3)")).holds);
  EXPECT_TRUE(rt::satisfies_condition_I(S("FULL")).holds);
  EXPECT_FALSE(rt::satisfies_condition_I(S("FIN(1,2,3)")).holds);
}

TEST(ConditionI, WitnessIsVerified) {
  const auto set = S("AP(1,1) x FULL | FIN(1) x GEO(3) | GEO(2) x FULL");
  const auto r = rt::satisfies_condition_I(set);
  ASSERT_TRUE(r.holds);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(rt::verify_witness(*r.witness, set));
  EXPECT_FALSE(r.witness->contains(std::vector<Index>{0, 4}));
  EXPECT_FALSE(rt::verify_witness(S("FULL x FULL"), S("AP(1,1) x FULL")));
  EXPECT_FALSE(rt::verify_witness(S("GEO(2) x AP(1,1)"), S("FULL x FULL")));
}

TEST(Deletion, FullSquareKeepsEverything) {
  const auto d = rt::deletion_process(S("FULL x FULL"));
  EXPECT_TRUE(d.condition_holds);
  EXPECT_TRUE(rt::same_set(d.E(0), S("FULL x FULL")));
  EXPECT_TRUE(rt::is_empty(d.F(1)));
  EXPECT_TRUE(rt::is_empty(d.F(2)));
}

TEST(Deletion, ThinSecondCoordinateIsDeletedFirst) {
  const auto E = S("FULL x GEO(2)");
  const auto d = rt::deletion_process(E);
  EXPECT_TRUE(rt::same_set(d.F(2), E));
  EXPECT_TRUE(rt::is_empty(d.E(1)));
  EXPECT_TRUE(rt::is_empty(d.E(0)));
  EXPECT_FALSE(d.condition_holds);
}

TEST(Deletion, MixedUnionAgreesWithEnumeration) {
  const auto E = S("AP(1,1) x FULL | FIN(1) x GEO(3)");
  const auto d = rt::deletion_process(E);
  EXPECT_TRUE(rt::is_empty(d.F(2)));
  EXPECT_TRUE(rt::same_set(d.E(0), E));
  for (Index a = 1; a <= 200; ++a)
    for (Index b = 1; b <= 200; ++b) {
      const std::vector<Index> p{a, b};
      ASSERT_EQ(d.E(0).contains(p), E.contains(p));
    }
}

TEST(Locate, Examples) {
  {
    const std::vector<IndexSet> sets{S("GEO(2) x FULL"), S("AP(1,1) x FULL")};
    EXPECT_EQ(rt::locate_condition_I(sets).index, 1u);
  }
  {
    const std::vector<IndexSet> sets{S("FULL x FULL"), S("FULL x GEO(2)")};
    EXPECT_EQ(rt::locate_condition_I(sets).index, 0u);
  }
  {
    const std::vector<IndexSet> sets{S("AP(1,2) x FULL"), S("AP(2,2) x FULL")};
    const auto r = rt::locate_condition_I(sets);
    EXPECT_EQ(r.index, 0u);
    EXPECT_TRUE(rt::verify_witness(r.witness, sets[0]));
  }
  {
    const std::vector<IndexSet> sets{S("GEO(2) x FULL"), S("FULL x GEO(3)")};
    try {
      rt::locate_condition_I(sets);
      FAIL();
    } catch (const rt::ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find("precondition failed"), std::string::npos);
    }
  }
}

TEST(ConditionI, AgreesWithHarmonicOracleOnRandomUnions) {
  std::mt19937_64 rng(77);
  int holds = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto set = rt::testing::random_set(rng, 2, 2);
    rt::testing::HarmonicOracle oracle(set);
    const auto d = rt::deletion_process(set);
    ASSERT_EQ(d.condition_holds, oracle.holds) << set.to_string();
    for (Index a = 1; a <= 60; ++a)
      for (Index b = 1; b <= 60; ++b)
        ASSERT_EQ(d.E(0).contains(std::vector<Index>{a, b}), oracle.in_E0(a, b)) << set.to_string() << " at " << a << "," << b;
    holds += oracle.holds;
  }
  EXPECT_GT(holds, 5);
  EXPECT_LT(holds, 35);
}

TEST(Deletion, LayersNestAndPartitionTheSet) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const auto set = rt::testing::random_set(rng, n, 2 + trial % 2);
    const auto d = rt::deletion_process(set);
    ASSERT_EQ(d.layers.size(), n + 1);
    EXPECT_TRUE(rt::same_set(d.E(n), set));
    for (std::size_t j = 1; j <= n; ++j) {
      EXPECT_TRUE(rt::is_subset(d.E(j - 1), d.E(j)));
      EXPECT_TRUE(rt::same_set(d.F(j), rt::subtract(d.E(j), d.E(j - 1))));
    }
    // Sampled: every point of E lies in exactly one of E_0, F_1, ..., F_n.
    std::uniform_int_distribution<Index> c(0, 500);
    for (int s = 0; s < 300; ++s) {
      std::vector<Index> p(n);
      for (auto& v : p) v = c(rng);
      int hits = d.E(0).contains(p);
      for (std::size_t j = 1; j <= n; ++j) hits += d.F(j).contains(p);
      EXPECT_EQ(hits, set.contains(p) ? 1 : 0);
    }
    if (d.condition_holds) {
      const auto r = rt::satisfies_condition_I(set);
      EXPECT_TRUE(rt::verify_witness(*r.witness, set)) << set.to_string();
    }
  }
}

TEST(ConditionI, MonotoneUnderEnlargement) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = rt::testing::random_set(rng, 2, 2);
    const auto b = rt::unite(a, rt::testing::random_set(rng, 2, 1));
    if (rt::satisfies_condition_I(a).holds) EXPECT_TRUE(rt::satisfies_condition_I(b).holds) << a.to_string();
  }
}

TEST(ConditionI, SetOrComplementSatisfiesIt) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto z1 = rt::testing::random_set(rng, n, 1 + trial % 3);
    const auto z2 = rt::complement(z1);
    const std::vector<IndexSet> pair{z1, z2};
    const auto r = rt::locate_condition_I(pair);
    EXPECT_TRUE(rt::verify_witness(r.witness, pair[r.index])) << z1.to_string();
  }
}
