#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "rt/multi_index.hpp"
#include "rt/text.hpp"

using rt::Index;
using rt::IndexBox;
using rt::MultiIndex;
using rt::TruncationLattice;

TEST(MultiIndex, ArithmeticAndUnit) {
  MultiIndex a{1, -2, 3};
  MultiIndex b{0, 4, -1};
  EXPECT_EQ(a + b, (MultiIndex{1, 2, 2}));
  EXPECT_EQ(a - b, (MultiIndex{1, -6, 4}));
  EXPECT_EQ(MultiIndex::unit(3, 1), (MultiIndex{0, 1, 0}));
  EXPECT_EQ(a.total(), 2);
  EXPECT_FALSE(a.is_natural());
  EXPECT_THROW(a + (MultiIndex{1, 2}), rt::ConfigError);
}

TEST(MultiIndex, StrictOrderNeedsEveryComponent) {
  EXPECT_TRUE(rt::all_leq(MultiIndex{1, 2}, MultiIndex{1, 3}));
  EXPECT_FALSE(rt::all_less(MultiIndex{1, 2}, MultiIndex{1, 3}));
  EXPECT_TRUE(rt::all_less(MultiIndex{0, 2}, MultiIndex{1, 3}));
  EXPECT_FALSE(rt::all_leq(MultiIndex{2, 0}, MultiIndex{1, 3}));
}

TEST(MultiIndex, ComponentwiseOrderIsPartialOrder) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Index> v(-2, 2);
  auto draw = [&] { return MultiIndex{v(rng), v(rng), v(rng)}; };
  for (int trial = 0; trial < 5000; ++trial) {
    const auto a = draw(), b = draw(), c = draw();
    EXPECT_TRUE(rt::all_leq(a, a));
    if (rt::all_leq(a, b) && rt::all_leq(b, c)) EXPECT_TRUE(rt::all_leq(a, c));
    if (rt::all_leq(a, b) && rt::all_leq(b, a)) EXPECT_EQ(a, b);
    if (rt::all_less(a, b)) EXPECT_TRUE(rt::all_leq(a, b));
  }
}

TEST(IndexBox, DimensionsAndCardinality) {
  IndexBox r(MultiIndex{0, 0}, MultiIndex{3, 2});
  EXPECT_EQ(r.dimensions(), (MultiIndex{3, 2}));
  EXPECT_EQ(r.cardinality(), 6u);
  IndexBox empty(MultiIndex{2, 0}, MultiIndex{1, 5});
  EXPECT_TRUE(empty.empty());
  EXPECT_TRUE(empty.points().empty());
}

TEST(IndexBox, EnumerationIsLexicographic) {
  IndexBox r(MultiIndex{0, 5}, MultiIndex{2, 7});
  const auto pts = r.points();
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_EQ(pts[0], (MultiIndex{0, 5}));
  EXPECT_EQ(pts[1], (MultiIndex{0, 6}));
  EXPECT_EQ(pts[2], (MultiIndex{1, 5}));
  EXPECT_EQ(pts[3], (MultiIndex{1, 6}));
}

// Axes are 0-based in the API.
TEST(BoxTopSlice, Examples) {
  IndexBox r(MultiIndex{0, 0}, MultiIndex{3, 2});
  EXPECT_EQ(rt::box_top_slice(r, 0, 0), IndexBox(MultiIndex{2, 0}, MultiIndex{3, 2}));
  EXPECT_EQ(rt::box_top_slice(r, 0, 2), IndexBox(MultiIndex{0, 0}, MultiIndex{1, 2}));
  IndexBox q(MultiIndex{1, 5}, MultiIndex{2, 8});
  EXPECT_EQ(rt::box_top_slice(q, 1, 1), IndexBox(MultiIndex{1, 6}, MultiIndex{2, 7}));
}

TEST(BoxTopSlice, Errors) {
  IndexBox r(MultiIndex{0, 0}, MultiIndex{3, 2});
  EXPECT_THROW(rt::box_top_slice(r, 2, 0), rt::ConfigError);
  try {
    rt::box_top_slice(r, 1, 2);
    FAIL();
  } catch (const rt::ConfigError& e) {
    EXPECT_STREQ(e.what(), "slice outside box");
  }
}

TEST(BoxTopSlice, SlicesPartitionTheBox) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Index> lo(-3, 3), len(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    MultiIndex a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = lo(rng);
      b[j] = a[j] + len(rng);
    }
    IndexBox box(a, b);
    ASSERT_LE(box.cardinality(), 10000u);
    const std::size_t axis = trial % n;
    std::map<MultiIndex, int> hits;
    for (Index s = 0; s < b[axis] - a[axis]; ++s) {
      const auto slice = rt::box_top_slice(box, axis, s);
      EXPECT_EQ(slice.dimensions()[axis], 1);
      slice.for_each([&](const MultiIndex& k) { ++hits[k]; });
    }
    EXPECT_EQ(hits.size(), box.cardinality());
    for (const auto& [k, c] : hits) {
      EXPECT_EQ(c, 1);
      EXPECT_TRUE(box.contains(k));
    }
  }
}

namespace {

// Enumeration oracle: bounding box of every k + prefix with k in L, clipped to N^n.
MultiIndex shifted_bound_by_enumeration(const TruncationLattice& lattice, const std::vector<MultiIndex>& shifts) {
  std::vector<MultiIndex> prefixes{MultiIndex(lattice.dim(), 0)};
  for (const auto& s : shifts) prefixes.push_back(prefixes.back() + s);
  MultiIndex bound(lattice.dim(), 0);
  lattice.for_each([&](const MultiIndex& k) {
    for (const auto& p : prefixes) {
      const auto moved = k + p;
      for (std::size_t j = 0; j < moved.size(); ++j) bound[j] = std::max(bound[j], moved[j]);
    }
  });
  return bound;
}

}  // namespace

TEST(ShiftedLattice, MatchesEnumeration) {
  TruncationLattice lattice(MultiIndex{4, 4});
  const std::vector<MultiIndex> shifts{{-1, 0}, {2, 1}};
  const auto expected = shifted_bound_by_enumeration(lattice, shifts);
  EXPECT_EQ(expected, (MultiIndex{5, 5}));
  EXPECT_EQ(rt::shifted_lattice(lattice, shifts).max_index(), expected);
}

TEST(ShiftedLattice, IdentityCases) {
  TruncationLattice one(MultiIndex{3});
  EXPECT_EQ(rt::shifted_lattice(one, {}), one);
  TruncationLattice two(MultiIndex{2, 2});
  const std::vector<MultiIndex> zeros{{0, 0}, {0, 0}};
  EXPECT_EQ(rt::shifted_lattice(two, zeros), two);
}

TEST(ShiftedLattice, RandomAgainstEnumeration) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Index> sh(-3, 3), mx(0, 5);
  for (int trial = 0; trial < 100; ++trial) {
    TruncationLattice lattice(MultiIndex{mx(rng), mx(rng)});
    std::vector<MultiIndex> shifts(static_cast<std::size_t>(trial % 4));
    for (auto& s : shifts) s = MultiIndex{sh(rng), sh(rng)};
    EXPECT_EQ(rt::shifted_lattice(lattice, shifts).max_index(), shifted_bound_by_enumeration(lattice, shifts));
  }
}

TEST(TruncationLattice, RejectsNegativeBound) {
  EXPECT_THROW(TruncationLattice(MultiIndex{2, -1}), rt::ConfigError);
  TruncationLattice l(MultiIndex{1, 2});
  EXPECT_EQ(l.size(), 6u);
  EXPECT_TRUE(l.contains(MultiIndex{1, 0}));
  EXPECT_FALSE(l.contains(MultiIndex{-1, 0}));
}

TEST(Text, ParseTuple) {
  EXPECT_EQ(rt::text::parse_tuple("(10, -2)"), (MultiIndex{10, -2}));
  EXPECT_EQ(rt::text::parse_tuple("3"), (MultiIndex{3}));
  EXPECT_EQ(rt::text::parse_tuple("(3,)"), (MultiIndex{3}));
  EXPECT_THROW(rt::text::parse_tuple("(1,,2)"), rt::ParseError);
}
