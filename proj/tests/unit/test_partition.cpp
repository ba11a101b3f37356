#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "regulattice/errors.hpp"
#include "regulattice/partition.hpp"

using namespace regulattice;

namespace {

IndexList iota_list(std::size_t n) {
  IndexList v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST(Partition, ValidatesCover) {
  EXPECT_THROW(Partition(iota_list(4), {{0, 1}, {1, 2, 3}}), DomainError);
  EXPECT_THROW(Partition(iota_list(4), {{0, 1}, {2}}), DomainError);
  EXPECT_THROW(Partition(iota_list(4), {{0, 1}, {}, {2, 3}}), DomainError);
  EXPECT_THROW(Partition(iota_list(4), {{0, 1}}, {1, 2, 3}), DomainError);
  EXPECT_NO_THROW(Partition(iota_list(4), {{3, 1}}, {2, 0}));
}

TEST(Partition, EqualBlocks) {
  const auto p = Partition::equal_blocks(11, 3);
  EXPECT_EQ(p.class_count(), 3u);
  EXPECT_EQ(p[1], (IndexList{3, 4, 5}));
  EXPECT_EQ(p.exceptional(), (IndexList{9, 10}));
  EXPECT_TRUE(p.balanced());
  EXPECT_THROW(Partition::equal_blocks(2, 3), DomainError);
}

TEST(IsRefinement, DefinitionCases) {
  const auto p = Partition(iota_list(8), {{0, 1, 2, 3}, {4, 5, 6}}, {7});
  EXPECT_TRUE(is_refinement(p, p));
  EXPECT_TRUE(is_refinement(Partition::singletons(8), Partition::equal_blocks(8, 2)));
  const auto split = Partition(iota_list(8), {{0, 1}, {2}, {4, 5, 6}}, {3, 7});
  EXPECT_TRUE(is_refinement(split, p));
  EXPECT_FALSE(is_refinement(p, split));
  // Losing a coarse exceptional element is not a refinement.
  EXPECT_FALSE(is_refinement(Partition(iota_list(8), {{0, 1, 2, 3}, {4, 5, 6}, {7}}), p));
  // A class straddling two coarse classes is not a refinement.
  EXPECT_FALSE(is_refinement(Partition(iota_list(8), {{0, 1, 2}, {3, 4}, {5, 6}}, {7}), p));
  EXPECT_THROW(is_refinement(Partition::trivial(3), Partition::trivial(4)), DomainError);
}

TEST(IsRefinement, AgreesWithOracleOnRandomPairs) {
  oracle::Gen g(21);
  for (int t = 0; t < 300; ++t) {
    const auto p = oracle::random_partition(g, 12, true);
    const auto q = t % 2 ? oracle::random_refinement(g, p, true) : oracle::random_partition(g, 12, true);
    EXPECT_EQ(is_refinement(q, p), oracle::refines(q, p));
  }
}

TEST(CommonRefinement, SingleInputAndVennCells) {
  const auto p = Partition(iota_list(6), {{0, 4}, {1, 2, 3, 5}});
  EXPECT_EQ(common_refinement({p}), p);
  const auto a = Partition(iota_list(8), {{0, 1, 2, 3}, {4, 5, 6, 7}});
  const auto b = Partition(iota_list(8), {{0, 1, 4, 5}, {2, 3, 6, 7}});
  const auto c = common_refinement({a, b});
  ASSERT_EQ(c.class_count(), 4u);
  for (const auto& cl : c.classes()) EXPECT_EQ(cl.size(), 2u);
  EXPECT_THROW(common_refinement({Partition::equal_blocks(5, 2)}), DomainError);
}

TEST(CommonRefinement, CellCountMatchesDirectEnumeration) {
  oracle::Gen g(22);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = oracle::pick(g, 4, 30);
    const std::size_t l = oracle::pick(g, 2, 5);
    std::vector<Partition> bisections;
    for (std::size_t s = 0; s + 1 < l; ++s) {
      IndexList in, out;
      for (Index v = 0; v < n; ++v) (g() & 1 ? in : out).push_back(v);
      std::vector<IndexList> cls;
      if (!in.empty()) cls.push_back(in);
      if (!out.empty()) cls.push_back(out);
      bisections.emplace_back(iota_list(n), cls);
    }
    const auto c = common_refinement(bisections);
    std::set<std::vector<bool>> cells;
    for (Index v = 0; v < n; ++v) {
      std::vector<bool> key;
      for (const auto& b : bisections) key.push_back(std::binary_search(b[0].begin(), b[0].end(), v));
      cells.insert(key);
    }
    EXPECT_EQ(c.class_count(), cells.size());
    EXPECT_LE(c.class_count(), std::size_t{1} << (l - 1));
    for (const auto& b : bisections) EXPECT_TRUE(is_refinement(c, b));
  }
}

TEST(SplitExceptional, AddsOneClassPerElement) {
  EXPECT_EQ(split_exceptional_to_singletons(Partition::trivial(6)), Partition::trivial(6));
  const auto q = Partition(iota_list(6), {{0, 1, 2}}, {3, 4, 5});
  const auto s = split_exceptional_to_singletons(q);
  EXPECT_EQ(s.class_count(), q.class_count() + 3);
  EXPECT_TRUE(s.exceptional().empty());
}

TEST(Rebalance, ArithmeticCases) {
  const auto even = rebalance(Partition(iota_list(8), {{0, 1, 2, 3}, {4, 5, 6, 7}}), 2);
  EXPECT_EQ(even.class_count(), 4u);
  EXPECT_TRUE(even.exceptional().empty());
  const auto odd = rebalance(Partition(iota_list(9), {{0, 1, 2, 3, 4}, {5, 6, 7}}, {8}), 2);
  EXPECT_EQ(odd.class_count(), 3u);
  EXPECT_EQ(odd.exceptional().size(), 3u);
  EXPECT_TRUE(odd.balanced());
  EXPECT_THROW(rebalance(Partition::trivial(3), 0), DomainError);
  EXPECT_THROW(rebalance(Partition::trivial(3), 4), RebalanceError);
}

TEST(Rebalance, ExceptionalGrowthBoundedByChunkPerClass) {
  oracle::Gen g(23);
  for (int t = 0; t < 20; ++t) {
    const auto p = oracle::random_partition(g, 1000, true);
    const std::size_t chunk = oracle::pick(g, 1, 20);
    Partition r;
    try {
      r = rebalance(p, chunk);
    } catch (const RebalanceError&) {
      continue;
    }
    const std::size_t growth = r.exceptional().size() - p.exceptional().size();
    EXPECT_LE(growth, (chunk - 1) * p.class_count());
    EXPECT_TRUE(r.balanced());
    EXPECT_TRUE(oracle::refines(r, p));
  }
}
