#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "regulattice/driver.hpp"
#include "regulattice/errors.hpp"

using namespace regulattice;

namespace {

RunConfig config(double eps, std::uint64_t seed = 0) {
  RunConfig c;
  c.epsilon = eps;
  c.master_seed = seed;
  c.threads = 1;
  return c;
}

WeightedGraph star(std::size_t n) {
  WeightedGraph g{n, {}};
  for (std::size_t v = 1; v < n; ++v) g.edges.push_back({0, v, 1.0});
  return g;
}

WeightedGraph complete(std::size_t n) {
  WeightedGraph g{n, {}};
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) g.edges.push_back({u, v, 1.0});
  return g;
}

void expect_nondecreasing(const RunResult& r) {
  double prev = r.initial_phi;
  for (const auto& it : r.iterations) {
    EXPECT_NEAR(it.phi_before, prev, 1e-9 * (1 + std::abs(prev)));
    EXPECT_GE(it.phi_after, it.phi_before - 1e-9);
    if (it.quota_met) EXPECT_GE(it.phi_after - it.phi_before, it.gain_threshold - 1e-9);
    prev = it.phi_after;
  }
}

}  // namespace

TEST(Driver, CountsAndCaps) {
  EXPECT_EQ(initial_class_count(0.5, 2), 3u);
  EXPECT_EQ(initial_class_count(0.3, 2), 4u);
  EXPECT_EQ(initial_class_count(0.25, 2), 4u);
  EXPECT_EQ(initial_class_count(0.3, 9), 9u);
  EXPECT_EQ(initial_symmetric_class_count(0.5, 2), 16u);
  EXPECT_EQ(initial_symmetric_class_count(0.3, 1), 14u);
  EXPECT_EQ(default_iteration_cap(0.5), 32768u);
  EXPECT_EQ(default_symmetric_iteration_cap(0.5), 131072u);
  EXPECT_EQ(default_iteration_cap(0.3), static_cast<std::uint64_t>(std::ceil(256.0 / std::pow(0.3, 7))));
  EXPECT_THROW(initial_class_count(0.0, 2), DomainError);
  EXPECT_THROW(initial_class_count(0.7, 2), DomainError);
}

TEST(Driver, NamesRoundTrip) {
  for (auto m : {RunMode::general, RunMode::symmetric, RunMode::graph, RunMode::multi})
    EXPECT_EQ(parse_run_mode(to_string(m)), m);
  for (auto s : {RunStatus::certified_regular, RunStatus::heuristically_regular, RunStatus::quota_shortfall,
                 RunStatus::iteration_cap})
    EXPECT_EQ(parse_run_status(to_string(s)), s);
  EXPECT_THROW(parse_run_status("nope"), DomainError);
}

TEST(RegularPartition, ConstantMatrixNeedsNoIterations) {
  for (double eps : {0.2, 0.35, 0.5}) {
    const auto r = regular_partition(RealMatrix::constant(30, 40, -2.0), config(eps));
    EXPECT_EQ(r.status, RunStatus::certified_regular);
    EXPECT_TRUE(r.iterations.empty());
  }
}

TEST(RegularPartition, ZeroMatrixIsRegular) {
  const auto r = regular_partition(RealMatrix::constant(12, 12, 0.0), config(0.4));
  EXPECT_EQ(r.status, RunStatus::certified_regular);
  EXPECT_TRUE(r.partition.balanced());
}

TEST(RegularPartition, TooSmallInputIsASizeError) {
  EXPECT_THROW(regular_partition(RealMatrix::constant(2, 40, 1.0), config(0.3)), SizeError);
  // 10 rows into 4 classes leaves 2 exceptional rows, not below 0.3 * 10 / 2.
  EXPECT_THROW(regular_partition(RealMatrix::constant(10, 40, 1.0), config(0.3)), SizeError);
}

TEST(RegularPartition, RandomSignsTerminateWithinCap) {
  oracle::Gen g(61);
  std::vector<double> v(200 * 200);
  for (auto& x : v) x = g() & 1 ? 1.0 : -1.0;
  const RealMatrix a(200, 200, std::move(v));
  const auto r = regular_partition(a, config(0.5, 3));
  EXPECT_LE(r.iterations.size(), 32768u);
  EXPECT_LT(r.exceptional_fractions.first, 0.5);
  EXPECT_LT(r.exceptional_fractions.second, 0.5);
  EXPECT_TRUE(r.status == RunStatus::certified_regular || r.status == RunStatus::heuristically_regular);
  expect_nondecreasing(r);
}

TEST(RegularPartition, PlantedBlocksAreRefined) {
  // Four planted communities of different densities, rows and columns shuffled.
  oracle::Gen g(62);
  const std::size_t n = 96;
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = i % 4;
  std::shuffle(label.begin(), label.end(), g);
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double p = label[i] == label[j] ? 0.9 : 0.05;
      v[i * n + j] = oracle::uniform(g, 0, 1) < p ? 1.0 : 0.0;
    }
  const RealMatrix a(n, n, std::move(v));
  const auto r = regular_partition(a, config(0.3, 1));
  expect_nondecreasing(r);
  const auto ver = verify_partition(a, r.partition, 0.3, config(0.3, 1));
  if (r.status == RunStatus::certified_regular || r.status == RunStatus::heuristically_regular)
    EXPECT_TRUE(ver.passes());
}

TEST(RegularPartition, DeterministicAndScaleEquivariant) {
  oracle::Gen g(63);
  const auto a = oracle::random_wild(g, 64, 48);
  const auto r1 = regular_partition(a, config(0.4, 9));
  const auto r2 = regular_partition(a, config(0.4, 9));
  const auto r3 = regular_partition(a.scaled(10.0), config(0.4, 9));
  EXPECT_EQ(r1.partition, r2.partition);
  EXPECT_EQ(r1.partition, r3.partition);
  ASSERT_EQ(r1.iterations.size(), r3.iterations.size());
  for (std::size_t i = 0; i < r1.iterations.size(); ++i)
    EXPECT_EQ(r1.iterations[i].partition, r3.iterations[i].partition);
}

TEST(RegularPartition, IterationCapIsHonoured) {
  oracle::Gen g(64);
  const auto a = oracle::random_wild(g, 64, 64);
  auto c = config(0.2, 2);
  c.max_iterations = 0;
  const auto r = regular_partition(a, c);
  EXPECT_TRUE(r.iterations.empty());
  if (r.final_census.front().irregular > r.final_census.front().allowance)
    EXPECT_EQ(r.status, RunStatus::iteration_cap);
}

TEST(RegularPartition, DenseModeRuns) {
  oracle::Gen g(65);
  auto c = config(0.4, 4);
  c.dense_mode = true;
  const auto r = regular_partition(oracle::random_01(g, 60, 60), c);
  EXPECT_EQ(r.iteration_cap, default_iteration_cap(0.4));
  expect_nondecreasing(r);
}

TEST(SymmetricPartition, IdentityMatrix) {
  std::vector<double> v(64 * 64, 0.0);
  for (std::size_t i = 0; i < 64; ++i) v[i * 64 + i] = 1.0;
  const auto r = symmetric_regular_partition(RealMatrix(64, 64, std::move(v)), config(0.5));
  EXPECT_EQ(r.partition.rows(), r.partition.cols());
  EXPECT_EQ(r.partition.rows().class_count(), 16u);
  EXPECT_TRUE(r.iterations.empty());
  // Only diagonal blocks can carry a witness; the allowance absorbs them.
  EXPECT_LE(r.final_census.front().irregular, 16u);
  EXPECT_TRUE(r.status == RunStatus::certified_regular || r.status == RunStatus::heuristically_regular);
}

TEST(SymmetricPartition, EveryIntermediatePartitionIsSymmetric) {
  oracle::Gen g(66);
  for (int t = 0; t < 4; ++t) {
    const auto a = t % 2 ? oracle::symmetric_01(g, 80, 0.2) : oracle::random_wild(g, 80, 80);
    const auto r = symmetric_regular_partition(a, config(0.5, t));
    EXPECT_EQ(r.partition.rows(), r.partition.cols());
    for (const auto& it : r.iterations) {
      EXPECT_EQ(it.partition.rows(), it.partition.cols());
      for (const auto& [i, j] : it.split_blocks) EXPECT_NE(i, j);
    }
    expect_nondecreasing(r);
  }
  EXPECT_THROW(symmetric_regular_partition(RealMatrix::constant(40, 30, 1.0), config(0.5)), DomainError);
}

TEST(GraphPartition, CompleteGraphIsRegular) {
  const auto r = graph_regular_partition(complete(64), config(0.5));
  EXPECT_EQ(r.run.status, RunStatus::certified_regular);
  EXPECT_TRUE(r.run.iterations.empty());
  for (const auto& p : r.pairs) EXPECT_EQ(p.status, RegularityStatus::regular);
}

TEST(GraphPartition, StarGraph) {
  const auto r = graph_regular_partition(star(200), config(0.5, 1));
  EXPECT_LT(r.run.exceptional_fractions.first, 0.5);
  EXPECT_TRUE(r.vertices.balanced());
  const std::size_t k = r.vertices.class_count();
  EXPECT_EQ(r.pairs.size(), k * (k - 1) / 2);
  const auto ver = verify_partition(adjacency_matrix(star(200)), r.run.partition, 0.5, config(0.5, 1));
  EXPECT_TRUE(ver.passes());
}

TEST(GraphPartition, EdgelessGraph) {
  const auto r = graph_regular_partition(WeightedGraph{10, {}}, config(0.5));
  EXPECT_EQ(r.run.status, RunStatus::certified_regular);
  EXPECT_EQ(r.vertices.class_count(), 1u);
  EXPECT_TRUE(r.pairs.empty());
}

TEST(GraphPartition, AdjacencyValidation) {
  EXPECT_THROW(adjacency_matrix({3, {{0, 0, 1.0}}}), DomainError);
  EXPECT_THROW(adjacency_matrix({3, {{0, 3, 1.0}}}), DomainError);
  const auto a = adjacency_matrix({3, {{0, 1, 2.0}, {1, 2, 1.0}}});
  EXPECT_TRUE(a.symmetric());
  EXPECT_EQ(a(1, 0), 2.0);
  EXPECT_EQ(total_mass(a), 6.0);
}

TEST(SimultaneousPartition, SingleMatrixMatchesRegularPartition) {
  oracle::Gen g(67);
  const auto a = oracle::random_wild(g, 64, 64);
  const auto r1 = regular_partition(a, config(0.4, 5));
  const auto rk = simultaneous_partition({a}, config(0.4, 5));
  EXPECT_EQ(r1.partition, rk.partition);
  EXPECT_EQ(r1.iterations.size(), rk.iterations.size());
  EXPECT_EQ(r1.status, rk.status);
}

TEST(SimultaneousPartition, TwoCopiesBehaveLikeOne) {
  oracle::Gen g(68);
  const auto a = oracle::random_wild(g, 64, 64);
  const auto r1 = simultaneous_partition({a}, config(0.4, 6));
  const auto r2 = simultaneous_partition({a, a}, config(0.4, 6));
  EXPECT_EQ(r1.partition, r2.partition);
  EXPECT_EQ(r1.iterations.size(), r2.iterations.size());
  EXPECT_EQ(r2.iteration_cap, 2 * r1.iteration_cap);
}

TEST(SimultaneousPartition, MatrixAndComplement) {
  oracle::Gen g(69);
  const auto a = oracle::random_01(g, 72, 72, 0.3);
  std::vector<double> v(a.entries().begin(), a.entries().end());
  for (auto& x : v) x = 1.0 - x;
  const RealMatrix b(72, 72, std::move(v));
  const auto r = simultaneous_partition({a, b}, config(0.4, 7));
  EXPECT_LE(r.iterations.size(), r.iteration_cap);
  EXPECT_EQ(r.final_census.size(), 2u);
  EXPECT_THROW(simultaneous_partition({a, RealMatrix::constant(72, 71, 1.0)}, config(0.4)), DomainError);
  EXPECT_THROW(simultaneous_partition({}, config(0.4)), DomainError);
}

TEST(VerifyPartition, AcceptsRunOutputAndRejectsCorruption) {
  oracle::Gen g(70);
  const auto a = oracle::random_01(g, 64, 64);
  const auto r = regular_partition(a, config(0.4, 8));
  ASSERT_TRUE(r.status == RunStatus::certified_regular || r.status == RunStatus::heuristically_regular);
  EXPECT_TRUE(verify_partition(a, r.partition, 0.4, config(0.4, 8)).passes());

  // Move 2 eps |V| rows into the exceptional set.
  const Partition& p = r.partition.rows();
  IndexList exc = p.exceptional();
  std::vector<IndexList> classes;
  std::size_t moved = 0;
  for (const auto& c : p.classes()) {
    if (moved < 52) {
      exc.insert(exc.end(), c.begin(), c.end());
      moved += c.size();
    } else {
      classes.push_back(c);
    }
  }
  const BlockPartition bad(Partition(p.ground(), classes, exc), r.partition.cols());
  const auto rep = verify_partition(a, bad, 0.4, config(0.4, 8));
  EXPECT_FALSE(rep.row_exceptional_ok);
  EXPECT_FALSE(rep.passes());
}

TEST(VerifyPartition, MatchesExhaustiveTruthAtOracleScale) {
  // Half-ones block matrix, random balanced partition with classes of 6.
  oracle::Gen g(71);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> v(24 * 24, 0.0);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 24; ++j) v[i * 24 + j] = 1.0;
    const auto a = RealMatrix(24, 24, std::move(v));
    std::vector<Index> perm(24);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    std::vector<IndexList> cls;
    for (std::size_t c = 0; c < 4; ++c) cls.emplace_back(perm.begin() + c * 6, perm.begin() + (c + 1) * 6);
    const auto p = Partition::from_classes(cls);
    const BlockPartition bp(p, p);
    const double eps = 0.3;
    const auto rep = verify_partition(a, bp, eps, config(eps, t));
    const auto an = normalize(a);
    std::size_t irregular = 0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        irregular += oracle::exhaustive(an, p[i], p[j], eps).max_deviation > eps + 1e-9;
    EXPECT_EQ(rep.census.irregular, irregular);
    EXPECT_EQ(rep.census.unknown, 0u);
    EXPECT_EQ(rep.fraction_ok, double(irregular) <= eps * 16.0);
  }
}
