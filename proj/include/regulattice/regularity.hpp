#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "regulattice/matrix.hpp"
#include "regulattice/potential.hpp"
#include "regulattice/random.hpp"

namespace regulattice {

/// Subsets (rows, cols) of a block (X, Y) whose density differs from
/// d(X, Y) by `deviation`.
struct Witness {
  IndexList rows;
  IndexList cols;
  double deviation = 0.0;

  friend bool operator==(const Witness&, const Witness&) = default;
};

enum class RegularityStatus { regular, irregular, unknown };
enum class CheckMethod { exact, heuristic };

struct RegularityVerdict {
  RegularityStatus status = RegularityStatus::unknown;
  CheckMethod method = CheckMethod::heuristic;
  std::optional<Witness> witness;
  std::uint64_t budget_spent = 0;

  bool irregular() const noexcept { return status == RegularityStatus::irregular; }
  friend bool operator==(const RegularityVerdict&, const RegularityVerdict&) = default;
};

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr std::size_t kDefaultOracleLimit = 16;
inline constexpr std::uint64_t kDefaultWitnessBudget = 64;
inline constexpr std::size_t kDefaultShrinkRetries = 64;

/// Smallest subset size s with s >= epsilon * n (and s >= 1).
std::size_t min_subset_size(double epsilon, std::size_t n) noexcept;

/// |d(rows, cols) - d(X, Y)| recomputed from the raw entries.
double witness_deviation(const RealMatrix& a, std::span<const Index> x, std::span<const Index> y,
                         std::span<const Index> rows, std::span<const Index> cols);

/// True if every entry of the block lies within an interval of length
/// epsilon. Every sub-density then lies in that interval, so the block is
/// epsilon-regular regardless of its size.
bool spread_within(const RealMatrix& a, std::span<const Index> x, std::span<const Index> y,
                   double epsilon);

/// Exhaustive decision over all qualifying subset pairs. Irregular verdicts
/// carry a maximum-deviation witness. Throws OracleLimitError when either
/// side exceeds oracle_limit.
RegularityVerdict exact_check(const RealMatrix& a, std::span<const Index> x,
                              std::span<const Index> y, double epsilon,
                              double tolerance = kDefaultTolerance,
                              std::size_t oracle_limit = kDefaultOracleLimit);

/// Sound but incomplete witness search. Returns irregular with a verified
/// witness, or unknown; never regular.
RegularityVerdict heuristic_witness_search(const RealMatrix& a, std::span<const Index> x,
                                           std::span<const Index> y, double epsilon,
                                           std::uint64_t budget, Rng& rng,
                                           double tolerance = kDefaultTolerance);

struct BlockCheckOptions {
  double tolerance = kDefaultTolerance;
  std::size_t oracle_limit = kDefaultOracleLimit;
  std::uint64_t witness_budget = kDefaultWitnessBudget;
};

/// Spread test, then exact_check within the oracle limit, heuristic search
/// otherwise.
RegularityVerdict check_block(const RealMatrix& a, std::span<const Index> x,
                              std::span<const Index> y, double epsilon,
                              const BlockCheckOptions& options, Rng& rng);

/// Brings a witness into the size window [ceil(eps|X|), floor(|X|/2)] on
/// each side while keeping deviation >= epsilon - tolerance. When that window
/// is empty the side is left as it is. Throws
/// ShrinkFailure when no admissible witness is reached.
Witness shrink_witness(const RealMatrix& a, std::span<const Index> x, std::span<const Index> y,
                       const Witness& w, double epsilon, Rng& rng,
                       double tolerance = kDefaultTolerance,
                       std::size_t retries = kDefaultShrinkRetries);

/// Two-part (or, on a side where the witness is the whole class, one-part)
/// splits of X and Y built from a shrunk witness.
struct GainSplit {
  std::vector<IndexList> row_parts;
  std::vector<IndexList> col_parts;
  double phi_before = 0.0;
  double phi_after = 0.0;

  double gain() const noexcept { return phi_after - phi_before; }
};

/// Splits X and Y along the witness and checks
/// phi(split) >= phi(X, Y) + eps^4 |X| |Y|. Throws DomainError when
/// |d(X, Y)| > eps D or the witness is outside the size window, and
/// InvariantError when the gain inequality fails.
GainSplit gain_split(const RealMatrix& a, std::span<const Index> x, std::span<const Index> y,
                     const Witness& w, const PotentialConfig& cfg,
                     double tolerance = kDefaultTolerance);

}  // namespace regulattice
