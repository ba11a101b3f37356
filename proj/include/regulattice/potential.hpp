#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "regulattice/matrix.hpp"
#include "regulattice/partition.hpp"

namespace regulattice {

/// Cutoff level D of the potential. An infinite cutoff keeps the potential
/// purely quadratic.
class Cutoff {
 public:
  static Cutoff finite(double d);
  static Cutoff infinite() noexcept { return Cutoff{}; }

  bool is_infinite() const noexcept { return !value_; }
  /// Precondition: !is_infinite().
  double value() const noexcept { return *value_; }

  friend bool operator==(const Cutoff&, const Cutoff&) = default;

 private:
  Cutoff() = default;
  explicit Cutoff(double d) : value_(d) {}
  std::optional<double> value_;
};

struct PotentialConfig {
  double epsilon = 0.25;
  Cutoff cutoff = Cutoff::infinite();

  /// D = 8 / epsilon^2, the smallest cutoff the refinement step accepts.
  static PotentialConfig for_refinement(double epsilon);
  static PotentialConfig dense(double epsilon);
};

/// t^2 for |t| <= 2D, 4D(|t| - D) beyond.
double phi_scalar(double t, const Cutoff& cutoff) noexcept;

/// |X| |Y| phi(d(X, Y)). Throws DomainError on an empty subset.
double phi_block(const RealMatrix& a, std::span<const Index> rows, std::span<const Index> cols,
                 const Cutoff& cutoff);

/// Potential of a block partition; exceptional sets count as singletons.
double phi_partition(const RealMatrix& a, const BlockPartition& bp, const Cutoff& cutoff);

/// Sum of phi over all entries, i.e. the potential of the singleton partition.
double phi_entrywise(const RealMatrix& a, const Cutoff& cutoff);

/// Counters for the runtime check phi_partition <= 4 D ||A||, which is
/// evaluated on every call with a finite cutoff.
struct PotentialBoundStats {
  std::uint64_t evaluations = 0;
  std::uint64_t violations = 0;
};
PotentialBoundStats potential_bound_stats() noexcept;

}  // namespace regulattice
