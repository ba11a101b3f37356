#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "regulattice/errors.hpp"
#include "regulattice/matrix.hpp"
#include "regulattice/partition.hpp"

using namespace regulattice;

TEST(RealMatrix, RejectsBadShapesAndValues) {
  EXPECT_THROW(RealMatrix(0, 3, {}), DomainError);
  EXPECT_THROW(RealMatrix(2, 2, {1.0, 2.0, 3.0}), DomainError);
  EXPECT_THROW(RealMatrix(1, 2, {1.0, std::nan("")}), DomainError);
  EXPECT_THROW(RealMatrix(1, 1, {INFINITY}), DomainError);
  EXPECT_THROW(RealMatrix::from_rows({{1.0, 2.0}, {3.0}}), DomainError);
}

TEST(RealMatrix, TransposeAndSymmetry) {
  const auto a = RealMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  const auto t = a.transposed();
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_EQ(t(2, 1), 6.0);
  EXPECT_FALSE(a.symmetric());
  EXPECT_TRUE(RealMatrix::from_rows({{0, 2}, {2, 1}}).symmetric());
}

TEST(TotalMass, SmallCases) {
  EXPECT_EQ(total_mass(RealMatrix::constant(2, 3, 1.0)), 6.0);
  EXPECT_EQ(total_mass(RealMatrix::from_rows({{1, -2}, {3, 0}})), 6.0);
}

TEST(TotalMass, MatchesNaiveLoop) {
  oracle::Gen g(11);
  const auto a = oracle::random_real(g, 50, 50, 0.0, 1.0);
  EXPECT_NEAR(total_mass(a), oracle::mass(a), 1e-12 * oracle::mass(a));
}

TEST(BlockDensity, SmallCases) {
  const auto c = RealMatrix::constant(5, 4, 2.5);
  EXPECT_DOUBLE_EQ(block_density(c, IndexList{0, 3}, IndexList{1, 2, 3}), 2.5);
  const auto id = RealMatrix::from_rows({{1, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(block_density(id, IndexList{0, 1}, IndexList{0, 1}), 0.5);
  EXPECT_THROW(block_density(id, IndexList{}, IndexList{0}), DomainError);
}

TEST(BlockDensity, MatchesNaiveLoopOnRandomSubsets) {
  oracle::Gen g(12);
  const auto a = oracle::random_real(g, 20, 20);
  for (int t = 0; t < 100; ++t) {
    const auto x = oracle::random_partition(g, 20, false)[0];
    const auto y = oracle::random_partition(g, 20, false)[0];
    EXPECT_NEAR(block_density(a, x, y), oracle::density(a, x, y), 1e-12);
  }
}

TEST(Normalize, SmallCases) {
  EXPECT_EQ(normalize(RealMatrix::constant(4, 4, 0.5)), RealMatrix::constant(4, 4, 1.0));
  const auto d = RealMatrix::from_rows({{2, 0}, {0, 2}});
  EXPECT_EQ(normalize(d), d);
  EXPECT_THROW(normalize(RealMatrix::constant(2, 2, 0.0)), NormalizationError);
}

TEST(Normalize, MeanModulusIsOneOnRandomGraph) {
  oracle::Gen g(13);
  const auto a = oracle::symmetric_01(g, 60, 0.1);
  const auto s = normalize(a);
  EXPECT_NEAR(oracle::mass(s) / (60.0 * 60.0), 1.0, 1e-12);
}

TEST(Normalize, ScaleInvariant) {
  oracle::Gen g(14);
  const auto a = oracle::random_wild(g, 17, 9);
  const auto s1 = normalize(a);
  const auto s2 = normalize(a.scaled(10.0));
  for (std::size_t i = 0; i < s1.entries().size(); ++i)
    EXPECT_NEAR(s1.entries()[i], s2.entries()[i], 1e-12 * (1.0 + std::abs(s1.entries()[i])));
}

TEST(MakeSubset, SortsAndValidates) {
  EXPECT_EQ(make_subset({3, 1, 2}, 4), (IndexList{1, 2, 3}));
  EXPECT_THROW(make_subset({1, 1}, 4), DomainError);
  EXPECT_THROW(make_subset({4}, 4), DomainError);
}

TEST(AveragedMatrix, TrivialAndSingletonPartitions) {
  oracle::Gen g(15);
  const auto a = oracle::random_real(g, 6, 7);
  const auto t = averaged_matrix(a, Partition::trivial(6), Partition::trivial(7));
  const double d = oracle::density(a, {0, 1, 2, 3, 4, 5}, {0, 1, 2, 3, 4, 5, 6});
  for (double v : t.entries()) EXPECT_NEAR(v, d, 1e-12);
  const auto s = averaged_matrix(a, Partition::singletons(6), Partition::singletons(7));
  EXPECT_EQ(s, a);
}

TEST(AveragedMatrix, MatchesEntrywiseOracle) {
  oracle::Gen g(16);
  for (int t = 0; t < 30; ++t) {
    const auto a = oracle::random_wild(g, 12, 9);
    const auto p = oracle::random_partition(g, 12, false);
    const auto q = oracle::random_partition(g, 9, false);
    const auto got = averaged_matrix(a, p, q);
    const auto want = oracle::averaged(a, p, q);
    for (std::size_t i = 0; i < want.size(); ++i)
      EXPECT_NEAR(got.entries()[i], want[i], 1e-12 * (1.0 + std::abs(want[i])));
  }
}

TEST(AveragedMatrix, RejectsExceptionalSets) {
  const auto a = RealMatrix::constant(4, 4, 1.0);
  EXPECT_THROW(averaged_matrix(a, Partition::equal_blocks(4, 3), Partition::trivial(4)),
               DomainError);
}

TEST(BlockWeightTable, MatchesNaiveWeights) {
  oracle::Gen g(17);
  const auto a = oracle::random_real(g, 15, 11);
  const auto p = oracle::random_partition(g, 15, false);
  const auto q = oracle::random_partition(g, 11, false);
  const auto w = block_weight_table(a, p.classes(), q.classes());
  for (std::size_t i = 0; i < p.class_count(); ++i)
    for (std::size_t j = 0; j < q.class_count(); ++j)
      EXPECT_NEAR(w[i * q.class_count() + j], oracle::weight(a, p[i], q[j]), 1e-12);
}
