#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regulattice/matrix.hpp"
#include "regulattice/partition.hpp"
#include "regulattice/refinement.hpp"
#include "regulattice/regularity.hpp"

namespace regulattice {

enum class RunMode { general, symmetric, graph, multi };
enum class RunStatus { certified_regular, heuristically_regular, quota_shortfall, iteration_cap };

std::string to_string(RunMode mode);
std::string to_string(RunStatus status);
RunMode parse_run_mode(const std::string& s);
RunStatus parse_run_status(const std::string& s);

struct RunConfig {
  double epsilon = 0.25;
  std::size_t min_classes = 2;
  /// Defaults to the termination bound of the chosen mode.
  std::optional<std::uint64_t> max_iterations;
  std::size_t oracle_limit = kDefaultOracleLimit;
  std::uint64_t witness_budget = kDefaultWitnessBudget;
  std::uint64_t master_seed = 0;
  RunMode mode = RunMode::general;
  /// Infinite cutoff (plain quadratic potential).
  bool dense_mode = false;
  double tolerance = kDefaultTolerance;
  std::size_t shrink_retries = kDefaultShrinkRetries;
  unsigned threads = 0;
};

/// ceil(256 / eps^7): refinement steps before the potential cap is reached.
std::uint64_t default_iteration_cap(double epsilon);
/// ceil(1024 / eps^7) for the symmetric step's smaller guaranteed gain.
std::uint64_t default_symmetric_iteration_cap(double epsilon);

struct CensusSummary {
  std::size_t blocks = 0;
  std::size_t certified_regular = 0;
  std::size_t irregular = 0;
  std::size_t unknown = 0;
  /// eps * |P| * |Q|: irregular blocks tolerated.
  double allowance = 0.0;

  friend bool operator==(const CensusSummary&, const CensusSummary&) = default;
};

CensusSummary summarize(const BlockCensus& census, double epsilon);

struct RunResult {
  BlockPartition partition;
  std::vector<RefineOutcome> iterations;
  RunStatus status = RunStatus::certified_regular;
  /// Potential of the final partition, summed over matrices in multi mode.
  double initial_phi = 0.0;
  double final_phi = 0.0;
  std::pair<double, double> exceptional_fractions{0.0, 0.0};
  std::uint64_t iteration_cap = 0;
  /// One summary per input matrix, for the final partition.
  std::vector<CensusSummary> final_census;
};

/// Number of classes per axis in the initial partition:
/// max(L, ceil(log2(1/eps)) + 2).
std::size_t initial_class_count(double epsilon, std::size_t min_classes);
/// ceil(4L / eps).
std::size_t initial_symmetric_class_count(double epsilon, std::size_t min_classes);

/// (eps)-regular block partition of an arbitrary real matrix. Throws
/// SizeError if the matrix is too small for the initial partition.
RunResult regular_partition(const RealMatrix& a, const RunConfig& cfg);

/// Symmetric (eps)-regular partition (P, P) of a square matrix.
RunResult symmetric_regular_partition(const RealMatrix& a, const RunConfig& cfg);

struct WeightedEdge {
  Index u = 0;
  Index v = 0;
  double weight = 1.0;
};

struct WeightedGraph {
  std::size_t vertex_count = 0;
  std::vector<WeightedEdge> edges;
};

/// Symmetric adjacency matrix; self-loops and out-of-range vertices throw
/// DomainError.
RealMatrix adjacency_matrix(const WeightedGraph& g);

struct PairVerdict {
  std::size_t i = 0;
  std::size_t j = 0;
  RegularityStatus status = RegularityStatus::unknown;
};

struct GraphRunResult {
  RunResult run;
  /// Vertex partition; exceptional vertices are in run.partition.rows().
  Partition vertices;
  /// One verdict per class pair i > j (0-based class positions).
  std::vector<PairVerdict> pairs;
};

/// (eps)-regular vertex partition of an edge-weighted graph, computed as a
/// symmetric partition of the adjacency matrix at eps / 2.
GraphRunResult graph_regular_partition(const WeightedGraph& g, const RunConfig& cfg);

/// One block partition (eps)-regular for every matrix, refined for each
/// matrix in turn. Throws DomainError on shape mismatch or an empty list.
RunResult simultaneous_partition(const std::vector<RealMatrix>& as, const RunConfig& cfg);

struct VerificationReport {
  bool balanced = false;
  bool row_exceptional_ok = false;
  bool col_exceptional_ok = false;
  CensusSummary census;
  bool fraction_ok = false;

  bool passes() const noexcept {
    return balanced && row_exceptional_ok && col_exceptional_ok && fraction_ok;
  }
};

/// Checks the definition of an eps-regular partition on the normalized
/// matrix: balance, exceptional fractions below eps, and at most
/// eps |P| |Q| blocks with a witness of irregularity.
VerificationReport verify_partition(const RealMatrix& a, const BlockPartition& bp, double epsilon,
                                    const RunConfig& cfg);

}  // namespace regulattice
