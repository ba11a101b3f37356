#include "regulattice/potential.hpp"

#include <atomic>
#include <cmath>

#include "regulattice/errors.hpp"

namespace regulattice {

namespace {

std::atomic<std::uint64_t> g_bound_evaluations{0};
std::atomic<std::uint64_t> g_bound_violations{0};

// Expands a partition into groups: classes first, then exceptional singletons.
std::vector<IndexList> expanded_groups(const Partition& p) {
  std::vector<IndexList> groups = p.classes();
  groups.reserve(groups.size() + p.exceptional().size());
  for (Index v : p.exceptional()) groups.push_back({v});
  return groups;
}

}  // namespace

Cutoff Cutoff::finite(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("cutoff D must be positive and finite");
  return Cutoff(d);
}

PotentialConfig PotentialConfig::for_refinement(double epsilon) {
  return {epsilon, Cutoff::finite(8.0 / (epsilon * epsilon))};
}

PotentialConfig PotentialConfig::dense(double epsilon) { return {epsilon, Cutoff::infinite()}; }

double phi_scalar(double t, const Cutoff& cutoff) noexcept {
  if (cutoff.is_infinite()) return t * t;
  const double d = cutoff.value();
  const double abs_t = std::abs(t);
  return abs_t <= 2.0 * d ? t * t : 4.0 * d * (abs_t - d);
}

double phi_block(const RealMatrix& a, std::span<const Index> rows, std::span<const Index> cols,
                 const Cutoff& cutoff) {
  const double area = static_cast<double>(rows.size()) * static_cast<double>(cols.size());
  return area * phi_scalar(block_density(a, rows, cols), cutoff);
}

double phi_entrywise(const RealMatrix& a, const Cutoff& cutoff) {
  double s = 0.0;
  for (double v : a.entries()) s += phi_scalar(v, cutoff);
  return s;
}

double phi_partition(const RealMatrix& a, const BlockPartition& bp, const Cutoff& cutoff) {
  bp.check_covers(a);
  const auto row_groups = expanded_groups(bp.rows());
  const auto col_groups = expanded_groups(bp.cols());
  const auto weights = block_weight_table(a, row_groups, col_groups);

  double phi = 0.0;
  for (std::size_t g = 0; g < row_groups.size(); ++g) {
    const double rsize = static_cast<double>(row_groups[g].size());
    for (std::size_t h = 0; h < col_groups.size(); ++h) {
      const double area = rsize * static_cast<double>(col_groups[h].size());
      phi += area * phi_scalar(weights[g * col_groups.size() + h] / area, cutoff);
    }
  }

  if (!cutoff.is_infinite()) {
    g_bound_evaluations.fetch_add(1, std::memory_order_relaxed);
    const double bound = 4.0 * cutoff.value() * total_mass(a);
    if (phi > bound * (1.0 + 1e-12) + 1e-9) g_bound_violations.fetch_add(1, std::memory_order_relaxed);
  }
  return phi;
}

PotentialBoundStats potential_bound_stats() noexcept {
  return {g_bound_evaluations.load(std::memory_order_relaxed),
          g_bound_violations.load(std::memory_order_relaxed)};
}

}  // namespace regulattice
