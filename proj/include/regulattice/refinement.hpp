#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "regulattice/matrix.hpp"
#include "regulattice/partition.hpp"
#include "regulattice/potential.hpp"
#include "regulattice/regularity.hpp"

namespace regulattice {

/// Verdict and density of every nonexceptional block, row-major over
/// (row class, column class).
struct BlockCensus {
  std::size_t row_classes = 0;
  std::size_t col_classes = 0;
  std::vector<RegularityVerdict> verdicts;
  std::vector<double> densities;

  std::size_t irregular = 0;
  std::size_t certified_regular = 0;
  std::size_t unknown = 0;

  const RegularityVerdict& verdict(std::size_t i, std::size_t j) const {
    return verdicts[i * col_classes + j];
  }
  double density(std::size_t i, std::size_t j) const { return densities[i * col_classes + j]; }
  std::size_t blocks() const noexcept { return row_classes * col_classes; }
};

/// Classifies every nonexceptional block. Block (i, j) draws its randomness
/// from derive_seed(seed, {i, j}); `threads` = 0 means hardware concurrency.
BlockCensus classify_blocks(const RealMatrix& a, const BlockPartition& bp, double epsilon,
                            const BlockCheckOptions& options, std::uint64_t seed,
                            unsigned threads = 0);

struct StepOptions {
  BlockCheckOptions check;
  std::size_t shrink_retries = kDefaultShrinkRetries;
  std::uint64_t master_seed = 0;
  /// Position of this step in a run; mixed into every derived seed.
  std::uint64_t step_index = 0;
  unsigned threads = 0;
};

/// Census seed used by a step with the given options.
std::uint64_t census_seed(const StepOptions& options) noexcept;

struct RefineOutcome {
  BlockPartition partition;
  double phi_before = 0.0;
  double phi_after = 0.0;

  std::size_t irregular_found = 0;
  std::size_t irregular_low_density_split = 0;
  std::size_t blocks_skipped_high_density = 0;
  std::size_t witnesses_unknown = 0;
  std::size_t shrink_failures = 0;

  /// Number of split blocks (pairs, in the symmetric step) needed for the
  /// guaranteed gain, and that gain.
  double split_quota = 0.0;
  double gain_threshold = 0.0;
  bool quota_met = false;

  std::size_t row_chunk = 0;
  std::size_t col_chunk = 0;
  std::size_t matrix_index = 0;
  std::vector<std::pair<std::size_t, std::size_t>> split_blocks;
};

/// One refinement iteration: split irregular low-density blocks along
/// witnesses, take per-class common refinements and rebalance to chunks of
/// floor(|V| / (k 4^l)) rows and floor(|W| / (l 4^k)) columns (at least 1).
///
/// `census`, when given, must be classify_blocks(a, bp, eps, options.check,
/// census_seed(options)). Throws StepRefused when the input is unbalanced,
/// an exceptional set holds half its axis or more, or a finite cutoff is
/// below 8/eps^2. Throws InvariantError if a guaranteed bound fails.
RefineOutcome refinement_step(const RealMatrix& a, const BlockPartition& bp,
                              const PotentialConfig& cfg, const StepOptions& options,
                              const BlockCensus* census = nullptr);

/// Symmetric variant for square matrices: diagonal blocks are never split,
/// and blocks (i, j), (j, i) share one split, transposed. The output keeps
/// identical row and column partitions. Throws DomainError on a non-square
/// matrix or non-symmetric block partition.
RefineOutcome symmetric_refinement_step(const RealMatrix& a, const BlockPartition& bp,
                                        const PotentialConfig& cfg, const StepOptions& options,
                                        const BlockCensus* census = nullptr);

/// floor(n / (k 4^l)) clamped below at 1.
std::size_t rebalance_chunk(std::size_t n, std::size_t k, std::size_t l) noexcept;

}  // namespace regulattice
