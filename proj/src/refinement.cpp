#include "regulattice/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "parallel.hpp"
#include "regulattice/errors.hpp"
#include "regulattice/random.hpp"

namespace regulattice {

namespace {

// k * 4^l as a double; saturates to infinity for large l.
double times_pow4(std::size_t k, std::size_t l) {
  return std::ldexp(static_cast<double>(k), static_cast<int>(std::min<std::size_t>(l, 600) * 2));
}

double slack(double tolerance, double scale) { return tolerance + 1e-12 * std::abs(scale); }

void validate_step_input(const RealMatrix& a, const BlockPartition& bp, const PotentialConfig& cfg) {
  bp.check_covers(a);
  const double eps = cfg.epsilon;
  if (!(eps > 0.0 && eps <= 0.5)) throw StepRefused("refinement step needs epsilon in (0, 1/2]");
  if (!bp.balanced()) throw StepRefused("refinement step needs a balanced block partition");
  if (bp.rows().class_count() == 0 || bp.cols().class_count() == 0)
    throw StepRefused("refinement step needs at least one class per axis");
  if (2 * bp.rows().exceptional().size() >= a.rows() ||
      2 * bp.cols().exceptional().size() >= a.cols())
    throw StepRefused("refinement step needs exceptional sets below half of each axis");
  if (!cfg.cutoff.is_infinite() && cfg.cutoff.value() < (8.0 / (eps * eps)) * (1.0 - 1e-12))
    throw StepRefused("refinement step needs D >= 8/eps^2");
}

struct SplitCounters {
  std::size_t irregular_found = 0;
  std::size_t skipped_high_density = 0;
  std::size_t unknown = 0;
  std::size_t shrink_failures = 0;
};

// Shrinks the block's witness and splits it, or returns nothing when the
// block is regular, unknown, too dense, or its witness cannot be shrunk.
std::optional<GainSplit> split_block(const RealMatrix& a, const IndexList& x, const IndexList& y,
                                     const RegularityVerdict& verdict, double density,
                                     const PotentialConfig& cfg, const StepOptions& options,
                                     std::size_t i, std::size_t j, SplitCounters& counters) {
  if (verdict.status == RegularityStatus::unknown) ++counters.unknown;
  if (!verdict.irregular()) return std::nullopt;
  ++counters.irregular_found;
  if (!cfg.cutoff.is_infinite() && std::abs(density) >= cfg.epsilon * cfg.cutoff.value()) {
    ++counters.skipped_high_density;
    return std::nullopt;
  }
  Rng rng(derive_seed(options.master_seed, {options.step_index, 1, i, j}));
  try {
    const Witness shrunk = shrink_witness(a, x, y, *verdict.witness, cfg.epsilon, rng,
                                          options.check.tolerance, options.shrink_retries);
    return gain_split(a, x, y, shrunk, cfg, options.check.tolerance);
  } catch (const ShrinkFailure&) {
    ++counters.shrink_failures;
    return std::nullopt;
  }
}

// Blocks with |d| >= eps D number at most eps k l / 2 when ||A|| = |V||W|.
void check_high_density_bound(const RealMatrix& a, const BlockCensus& census,
                              const PotentialConfig& cfg) {
  if (cfg.cutoff.is_infinite()) return;
  const double area = static_cast<double>(a.rows()) * static_cast<double>(a.cols());
  if (std::abs(total_mass(a) - area) > 1e-9 * area) return;
  const double limit = cfg.epsilon * cfg.cutoff.value();
  std::size_t dense = 0;
  for (double d : census.densities)
    if (std::abs(d) >= limit) ++dense;
  const double bound = cfg.epsilon * static_cast<double>(census.blocks()) / 2.0;
  if (static_cast<double>(dense) > bound + 1e-9)
    throw InvariantError("high-density blocks (" + std::to_string(dense) +
                         ") exceed eps k l / 2 on a normalized matrix");
}

Partition assemble_and_rebalance(const Partition& p, const std::vector<std::vector<Partition>>& splits,
                                 std::size_t chunk) {
  std::vector<IndexList> pieces;
  for (std::size_t i = 0; i < p.class_count(); ++i) {
    if (splits[i].empty()) {
      pieces.push_back(p[i]);
      continue;
    }
    const Partition refined = common_refinement(splits[i]);
    pieces.insert(pieces.end(), refined.classes().begin(), refined.classes().end());
  }
  return rebalance(Partition(p.ground(), std::move(pieces), p.exceptional()), chunk);
}

void check_axis_bounds(const Partition& before, const Partition& after, std::size_t own_classes,
                       std::size_t other_classes, const char* axis) {
  if (!is_refinement(after, before))
    throw InvariantError(std::string(axis) + " partition is not a refinement of its input");
  if (!after.balanced()) throw InvariantError(std::string(axis) + " partition is unbalanced");
  const double class_bound = times_pow4(own_classes, other_classes + 1);
  if (static_cast<double>(after.class_count()) > class_bound)
    throw InvariantError(std::string(axis) + " class count exceeds k 4^(l+1)");
  const double growth = static_cast<double>(after.exceptional().size()) -
                        static_cast<double>(before.exceptional().size());
  const double growth_bound =
      std::ldexp(static_cast<double>(before.size()),
                 -static_cast<int>(std::min<std::size_t>(other_classes, 2000)));
  if (growth > growth_bound + 1e-9)
    throw InvariantError(std::string(axis) + " exceptional growth exceeds |V| / 2^l");
}

void finish_outcome(const RealMatrix& a, const BlockPartition& bp, const PotentialConfig& cfg,
                    const StepOptions& options, RefineOutcome& out) {
  out.phi_after = phi_partition(a, out.partition, cfg.cutoff);
  const std::size_t k = bp.rows().class_count();
  const std::size_t l = bp.cols().class_count();
  check_axis_bounds(bp.rows(), out.partition.rows(), k, l, "row");
  check_axis_bounds(bp.cols(), out.partition.cols(), l, k, "column");

  const double tol = slack(options.check.tolerance, out.phi_after);
  if (out.phi_after < out.phi_before - tol)
    throw InvariantError("potential decreased across a refinement step");
  out.quota_met =
      static_cast<double>(out.irregular_low_density_split) >= out.split_quota - 1e-12;
  if (out.quota_met && out.phi_after - out.phi_before < out.gain_threshold - tol) {
    throw InvariantError("refinement step met its split quota but gained " +
                         std::to_string(out.phi_after - out.phi_before) + " < " +
                         std::to_string(out.gain_threshold));
  }
}

}  // namespace

std::size_t rebalance_chunk(std::size_t n, std::size_t k, std::size_t l) noexcept {
  const double q = std::floor(static_cast<double>(n) / times_pow4(k, l));
  return q < 1.0 ? 1 : static_cast<std::size_t>(q);
}

std::uint64_t census_seed(const StepOptions& options) noexcept {
  return derive_seed(options.master_seed, {options.step_index, 0});
}

BlockCensus classify_blocks(const RealMatrix& a, const BlockPartition& bp, double epsilon,
                            const BlockCheckOptions& options, std::uint64_t seed,
                            unsigned threads) {
  bp.check_covers(a);
  BlockCensus census;
  census.row_classes = bp.rows().class_count();
  census.col_classes = bp.cols().class_count();
  census.verdicts.resize(census.blocks());
  census.densities.resize(census.blocks());

  detail::parallel_for(census.blocks(), threads, [&](std::size_t b) {
    const std::size_t i = b / census.col_classes;
    const std::size_t j = b % census.col_classes;
    const IndexList& x = bp.rows()[i];
    const IndexList& y = bp.cols()[j];
    Rng rng(derive_seed(seed, {i, j}));
    census.verdicts[b] = check_block(a, x, y, epsilon, options, rng);
    census.densities[b] = block_density(a, x, y);
  });

  for (const auto& v : census.verdicts) {
    switch (v.status) {
      case RegularityStatus::regular: ++census.certified_regular; break;
      case RegularityStatus::irregular: ++census.irregular; break;
      case RegularityStatus::unknown: ++census.unknown; break;
    }
  }
  return census;
}

RefineOutcome refinement_step(const RealMatrix& a, const BlockPartition& bp,
                              const PotentialConfig& cfg, const StepOptions& options,
                              const BlockCensus* census) {
  validate_step_input(a, bp, cfg);
  const Partition& rows = bp.rows();
  const Partition& cols = bp.cols();
  const std::size_t k = rows.class_count();
  const std::size_t l = cols.class_count();

  std::optional<BlockCensus> own;
  if (census == nullptr) {
    own = classify_blocks(a, bp, cfg.epsilon, options.check, census_seed(options), options.threads);
    census = &*own;
  }
  check_high_density_bound(a, *census, cfg);

  RefineOutcome out;
  out.phi_before = phi_partition(a, bp, cfg.cutoff);

  SplitCounters counters;
  std::vector<std::vector<Partition>> row_splits(k);
  std::vector<std::vector<Partition>> col_splits(l);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      auto split = split_block(a, rows[i], cols[j], census->verdict(i, j), census->density(i, j),
                               cfg, options, i, j, counters);
      if (!split) continue;
      row_splits[i].emplace_back(rows[i], std::move(split->row_parts));
      col_splits[j].emplace_back(cols[j], std::move(split->col_parts));
      out.split_blocks.emplace_back(i, j);
    }
  }
  out.irregular_found = counters.irregular_found;
  out.blocks_skipped_high_density = counters.skipped_high_density;
  out.witnesses_unknown = counters.unknown;
  out.shrink_failures = counters.shrink_failures;
  out.irregular_low_density_split = out.split_blocks.size();

  out.row_chunk = rebalance_chunk(a.rows(), k, l);
  out.col_chunk = rebalance_chunk(a.cols(), l, k);
  out.partition = BlockPartition(assemble_and_rebalance(rows, row_splits, out.row_chunk),
                                 assemble_and_rebalance(cols, col_splits, out.col_chunk));

  const double eps = cfg.epsilon;
  out.split_quota = eps * static_cast<double>(k) * static_cast<double>(l) / 2.0;
  out.gain_threshold = std::pow(eps, 5) * static_cast<double>(a.rows()) *
                       static_cast<double>(a.cols()) / 8.0;
  finish_outcome(a, bp, cfg, options, out);
  return out;
}

RefineOutcome symmetric_refinement_step(const RealMatrix& a, const BlockPartition& bp,
                                        const PotentialConfig& cfg, const StepOptions& options,
                                        const BlockCensus* census) {
  if (!a.square()) throw DomainError("symmetric refinement step needs a square matrix");
  if (!bp.symmetric() || bp.rows() != bp.cols())
    throw DomainError("symmetric refinement step needs a symmetric block partition");
  validate_step_input(a, bp, cfg);
  const Partition& p = bp.rows();
  const std::size_t k = p.class_count();

  std::optional<BlockCensus> own;
  if (census == nullptr) {
    own = classify_blocks(a, bp, cfg.epsilon, options.check, census_seed(options), options.threads);
    census = &*own;
  }
  check_high_density_bound(a, *census, cfg);

  RefineOutcome out;
  out.phi_before = phi_partition(a, bp, cfg.cutoff);

  SplitCounters counters;
  std::vector<std::vector<Partition>> splits(k);
  for (std::size_t i = 0; i < k; ++i) {
    // Diagonal blocks are counted but never split.
    const auto& diag = census->verdict(i, i);
    if (diag.status == RegularityStatus::unknown) ++counters.unknown;
    if (diag.irregular()) ++counters.irregular_found;

    for (std::size_t j = i + 1; j < k; ++j) {
      auto upper = split_block(a, p[i], p[j], census->verdict(i, j), census->density(i, j), cfg,
                               options, i, j, counters);
      auto lower = split_block(a, p[j], p[i], census->verdict(j, i), census->density(j, i), cfg,
                               options, j, i, counters);
      if (!upper && !lower) continue;
      // One split serves both blocks; prefer the larger own-block gain.
      const bool use_upper = upper && (!lower || upper->gain() >= lower->gain());
      GainSplit& chosen = use_upper ? *upper : *lower;
      const std::size_t row_class = use_upper ? i : j;
      const std::size_t col_class = use_upper ? j : i;
      splits[row_class].emplace_back(p[row_class], std::move(chosen.row_parts));
      splits[col_class].emplace_back(p[col_class], std::move(chosen.col_parts));
      out.split_blocks.emplace_back(row_class, col_class);
    }
  }
  out.irregular_found = counters.irregular_found;
  out.blocks_skipped_high_density = counters.skipped_high_density;
  out.witnesses_unknown = counters.unknown;
  out.shrink_failures = counters.shrink_failures;
  out.irregular_low_density_split = out.split_blocks.size();

  out.row_chunk = out.col_chunk = rebalance_chunk(a.rows(), k, k);
  out.partition = BlockPartition::symmetric_of(assemble_and_rebalance(p, splits, out.row_chunk));

  const double eps = cfg.epsilon;
  const double n = static_cast<double>(a.rows());
  out.split_quota = eps * static_cast<double>(k) * static_cast<double>(k) / 8.0;
  out.gain_threshold = std::pow(eps, 5) * n * n / 32.0;
  finish_outcome(a, bp, cfg, options, out);
  return out;
}

}  // namespace regulattice
