#include "regulattice/regularity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "regulattice/errors.hpp"

namespace regulattice {

namespace {

IndexList sorted_copy(std::span<const Index> s) {
  IndexList v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

IndexList set_difference(const IndexList& whole, const IndexList& part) {
  IndexList out;
  std::set_difference(whole.begin(), whole.end(), part.begin(), part.end(),
                      std::back_inserter(out));
  return out;
}

// Weight of each candidate index against a fixed opposite side: for rows,
// the row's sum over `fixed` columns; for columns, the column's sum over
// `fixed` rows.
std::vector<double> line_weights(const RealMatrix& a, std::span<const Index> candidates,
                                 std::span<const Index> fixed, bool candidates_are_rows) {
  std::vector<double> w(candidates.size(), 0.0);
  if (candidates_are_rows) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto row = a.row(candidates[i]);
      for (Index c : fixed) w[i] += row[c];
    }
  } else {
    for (Index r : fixed) {
      const auto row = a.row(r);
      for (std::size_t i = 0; i < candidates.size(); ++i) w[i] += row[candidates[i]];
    }
  }
  return w;
}

// Best subset of `candidates` (size >= min_size) against a fixed opposite
// side of size `fixed_size`, maximizing |density - d0|. For each size the
// optimum takes the heaviest or the lightest lines.
struct BestResponse {
  IndexList members;
  double deviation = -1.0;
};

BestResponse best_response(const std::vector<double>& weights, std::span<const Index> candidates,
                           std::size_t fixed_size, std::size_t min_size, double d0) {
  const std::size_t n = candidates.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t p, std::size_t q) { return weights[p] > weights[q]; });
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + weights[order[i]];

  BestResponse best;
  std::size_t best_size = 0;
  bool best_top = true;
  for (std::size_t s = std::max<std::size_t>(min_size, 1); s <= n; ++s) {
    const double area = static_cast<double>(s) * static_cast<double>(fixed_size);
    const double top = std::abs(prefix[s] / area - d0);
    const double bottom = std::abs((prefix[n] - prefix[n - s]) / area - d0);
    if (top > best.deviation) {
      best.deviation = top;
      best_size = s;
      best_top = true;
    }
    if (bottom > best.deviation) {
      best.deviation = bottom;
      best_size = s;
      best_top = false;
    }
  }
  for (std::size_t i = 0; i < best_size; ++i)
    best.members.push_back(candidates[order[best_top ? i : n - 1 - i]]);
  std::sort(best.members.begin(), best.members.end());
  return best;
}

}  // namespace

std::size_t min_subset_size(double epsilon, std::size_t n) noexcept {
  // The slack absorbs products such as 0.3 * 10 = 3.0000000000000004.
  const double t = epsilon * static_cast<double>(n) - 1e-9;
  const std::size_t s = t <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t));
  return std::clamp<std::size_t>(s, 1, std::max<std::size_t>(n, 1));
}

double witness_deviation(const RealMatrix& a, std::span<const Index> x, std::span<const Index> y,
                         std::span<const Index> rows, std::span<const Index> cols) {
  return std::abs(block_density(a, rows, cols) - block_density(a, x, y));
}

bool spread_within(const RealMatrix& a, std::span<const Index> x, std::span<const Index> y,
                   double epsilon) {
  if (x.empty() || y.empty()) throw DomainError("empty block");
  double lo = a(x[0], y[0]);
  double hi = lo;
  for (Index r : x) {
    const auto row = a.row(r);
    for (Index c : y) {
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
  }
  return hi - lo <= epsilon;
}

RegularityVerdict exact_check(const RealMatrix& a, std::span<const Index> x,
                              std::span<const Index> y, double epsilon, double tolerance,
                              std::size_t oracle_limit) {
  if (x.empty() || y.empty()) throw DomainError("exact_check: empty block");
  if (x.size() > oracle_limit || y.size() > oracle_limit) {
    throw OracleLimitError("exact_check: block " + std::to_string(x.size()) + "x" +
                           std::to_string(y.size()) + " exceeds oracle limit " +
                           std::to_string(oracle_limit));
  }
  const double d0 = block_density(a, x, y);

  // Enumerate subsets of the shorter side; for a fixed subset the extreme
  // densities at each size of the other side come from sorting its lines.
  const bool outer_rows = x.size() <= y.size();
  const auto outer = outer_rows ? x : y;
  const auto inner = outer_rows ? y : x;
  const std::size_t no = outer.size();
  const std::size_t ni = inner.size();
  if (no > 40) throw OracleLimitError("exact_check: enumeration beyond 2^40 subsets refused");
  const std::size_t lo_outer = min_subset_size(epsilon, no);
  const std::size_t lo_inner = min_subset_size(epsilon, ni);

  std::vector<double> vals(no * ni);
  for (std::size_t o = 0; o < no; ++o)
    for (std::size_t i = 0; i < ni; ++i)
      vals[o * ni + i] = outer_rows ? a(outer[o], inner[i]) : a(inner[i], outer[o]);

  std::vector<double> sums(ni, 0.0);
  std::vector<std::size_t> order(ni);
  std::vector<double> prefix(ni + 1, 0.0);

  double best = -1.0;
  std::uint64_t best_mask = 0;
  IndexList best_inner;
  std::uint64_t evaluated = 0;

  const std::uint64_t count = std::uint64_t{1} << no;
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < count; ++k) {
    const unsigned bit = static_cast<unsigned>(std::countr_zero(k));
    gray ^= std::uint64_t{1} << bit;
    const double sign = (gray >> bit) & 1U ? 1.0 : -1.0;
    const double* line = vals.data() + bit * ni;
    for (std::size_t i = 0; i < ni; ++i) sums[i] += sign * line[i];

    const std::size_t p = static_cast<std::size_t>(std::popcount(gray));
    if (p < lo_outer) continue;

    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) {
      return sums[u] > sums[v] || (sums[u] == sums[v] && u < v);
    });
    for (std::size_t i = 0; i < ni; ++i) prefix[i + 1] = prefix[i] + sums[order[i]];

    for (std::size_t s = lo_inner; s <= ni; ++s) {
      ++evaluated;
      const double area = static_cast<double>(p) * static_cast<double>(s);
      const double top = std::abs(prefix[s] / area - d0);
      const double bottom = std::abs((prefix[ni] - prefix[ni - s]) / area - d0);
      const bool use_top = top >= bottom;
      const double dev = use_top ? top : bottom;
      if (dev > best) {
        best = dev;
        best_mask = gray;
        best_inner.clear();
        for (std::size_t t = 0; t < s; ++t)
          best_inner.push_back(inner[order[use_top ? t : ni - 1 - t]]);
      }
    }
  }

  RegularityVerdict verdict;
  verdict.method = CheckMethod::exact;
  verdict.budget_spent = evaluated;

  IndexList best_outer;
  for (std::size_t o = 0; o < no; ++o)
    if ((best_mask >> o) & 1U) best_outer.push_back(outer[o]);
  std::sort(best_outer.begin(), best_outer.end());
  std::sort(best_inner.begin(), best_inner.end());

  Witness w;
  w.rows = outer_rows ? std::move(best_outer) : std::move(best_inner);
  w.cols = outer_rows ? std::move(best_inner) : std::move(best_outer);
  w.deviation = witness_deviation(a, x, y, w.rows, w.cols);

  if (w.deviation > epsilon + tolerance) {
    verdict.status = RegularityStatus::irregular;
    verdict.witness = std::move(w);
  } else {
    verdict.status = RegularityStatus::regular;
  }
  return verdict;
}

RegularityVerdict heuristic_witness_search(const RealMatrix& a, std::span<const Index> x,
                                           std::span<const Index> y, double epsilon,
                                           std::uint64_t budget, Rng& rng, double tolerance) {
  if (x.empty() || y.empty()) throw DomainError("heuristic_witness_search: empty block");
  if (budget == 0) throw DomainError("heuristic_witness_search: budget must be positive");

  constexpr int kRounds = 4;
  const double d0 = block_density(a, x, y);
  const std::size_t lo_x = min_subset_size(epsilon, x.size());
  const std::size_t lo_y = min_subset_size(epsilon, y.size());
  const double threshold = epsilon + tolerance;

  RegularityVerdict verdict;
  verdict.method = CheckMethod::heuristic;

  // Candidates are re-verified from raw entries before acceptance.
  auto accept = [&](const IndexList& rows, const IndexList& cols) {
    if (rows.size() < lo_x || cols.size() < lo_y) return false;
    ++verdict.budget_spent;
    const double dev = witness_deviation(a, x, y, rows, cols);
    if (dev <= threshold) return false;
    verdict.status = RegularityStatus::irregular;
    verdict.witness = Witness{rows, cols, dev};
    return true;
  };

  // Alternating best response from a starting pair; either side may be empty
  // (then it is derived from the other).
  auto improve = [&](IndexList rows, IndexList cols) {
    if (accept(rows, cols)) return true;
    for (int round = 0; round < kRounds; ++round) {
      if (!rows.empty()) {
        auto br = best_response(line_weights(a, y, rows, false), y, rows.size(), lo_y, d0);
        cols = std::move(br.members);
        if (accept(rows, cols)) return true;
      }
      if (cols.empty()) return false;
      auto br = best_response(line_weights(a, x, cols, true), x, cols.size(), lo_x, d0);
      rows = std::move(br.members);
      if (accept(rows, cols)) return true;
    }
    return false;
  };

  const IndexList all_rows = sorted_copy(x);
  const IndexList all_cols = sorted_copy(y);

  // Degree-deviation candidates: lines whose average over the block
  // deviates from d0 by more than eps/2.
  const auto row_w = line_weights(a, all_rows, all_cols, true);
  const auto col_w = line_weights(a, all_cols, all_rows, false);
  IndexList rows_hi, rows_lo, cols_hi, cols_lo;
  for (std::size_t i = 0; i < all_rows.size(); ++i) {
    const double avg = row_w[i] / static_cast<double>(all_cols.size());
    if (avg > d0 + epsilon / 2) rows_hi.push_back(all_rows[i]);
    if (avg < d0 - epsilon / 2) rows_lo.push_back(all_rows[i]);
  }
  for (std::size_t i = 0; i < all_cols.size(); ++i) {
    const double avg = col_w[i] / static_cast<double>(all_rows.size());
    if (avg > d0 + epsilon / 2) cols_hi.push_back(all_cols[i]);
    if (avg < d0 - epsilon / 2) cols_lo.push_back(all_cols[i]);
  }

  const std::pair<const IndexList*, const IndexList*> seeds[] = {
      {&rows_hi, &all_cols}, {&rows_lo, &all_cols}, {&all_rows, &cols_hi},
      {&all_rows, &cols_lo}, {&rows_hi, &cols_hi},  {&rows_lo, &cols_lo},
      {&rows_hi, &cols_lo},  {&rows_lo, &cols_hi},
  };
  for (const auto& [r, c] : seeds) {
    if (r->empty() || c->empty()) continue;
    if (improve(*r, *c)) return verdict;
  }
  // Most deviating row set against all columns, and column set against all rows.
  if (improve(best_response(row_w, all_rows, all_cols.size(), lo_x, d0).members, {}))
    return verdict;
  if (improve({}, best_response(col_w, all_cols, all_rows.size(), lo_y, d0).members))
    return verdict;

  const std::size_t hi_x = std::max(lo_x, x.size() / 2);
  const std::size_t hi_y = std::max(lo_y, y.size() / 2);
  for (std::uint64_t trial = 0; trial < budget; ++trial) {
    const std::size_t sx = std::uniform_int_distribution<std::size_t>(lo_x, hi_x)(rng);
    const std::size_t sy = std::uniform_int_distribution<std::size_t>(lo_y, hi_y)(rng);
    IndexList rows, cols;
    std::sample(all_rows.begin(), all_rows.end(), std::back_inserter(rows), sx, rng);
    std::sample(all_cols.begin(), all_cols.end(), std::back_inserter(cols), sy, rng);
    if (improve(std::move(rows), std::move(cols))) return verdict;
  }

  verdict.status = RegularityStatus::unknown;
  return verdict;
}

RegularityVerdict check_block(const RealMatrix& a, std::span<const Index> x,
                              std::span<const Index> y, double epsilon,
                              const BlockCheckOptions& options, Rng& rng) {
  if (spread_within(a, x, y, epsilon)) {
    RegularityVerdict v;
    v.status = RegularityStatus::regular;
    v.method = CheckMethod::exact;
    return v;
  }
  if (x.size() <= options.oracle_limit && y.size() <= options.oracle_limit)
    return exact_check(a, x, y, epsilon, options.tolerance, options.oracle_limit);
  return heuristic_witness_search(a, x, y, epsilon, options.witness_budget, rng,
                                  options.tolerance);
}

namespace {

// Shrinks one side of a witness against the fixed other side.
IndexList shrink_side(const RealMatrix& a, const IndexList& side, const IndexList& fixed,
                      bool side_is_rows, std::size_t full_size, double epsilon, double d0,
                      double target, Rng& rng, std::size_t retries) {
  const std::size_t lo = min_subset_size(epsilon, full_size);
  const std::size_t hi = full_size / 2;
  if (side.size() < lo) throw DomainError("shrink_witness: witness side below eps fraction");
  // Empty window: nothing smaller than the side itself is admissible.
  if (lo > hi || side.size() <= hi) return side;

  const auto weights = line_weights(a, side, fixed, side_is_rows);
  const double fixed_size = static_cast<double>(fixed.size());
  auto deviation_of = [&](double weight, std::size_t count) {
    return std::abs(weight / (static_cast<double>(count) * fixed_size) - d0);
  };

  std::vector<std::size_t> positions(side.size());
  std::iota(positions.begin(), positions.end(), 0);
  for (std::size_t t = 0; t < retries; ++t) {
    std::vector<std::size_t> pick;
    std::sample(positions.begin(), positions.end(), std::back_inserter(pick), hi, rng);
    double w = 0.0;
    for (std::size_t p : pick) w += weights[p];
    if (deviation_of(w, hi) >= target) {
      IndexList out;
      for (std::size_t p : pick) out.push_back(side[p]);
      return out;
    }
  }

  // Greedy fallback: drop the line whose removal keeps the deviation largest.
  std::vector<bool> alive(side.size(), true);
  double w = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (std::size_t count = side.size(); count > hi; --count) {
    std::size_t best = side.size();
    double best_dev = -1.0;
    for (std::size_t p = 0; p < side.size(); ++p) {
      if (!alive[p]) continue;
      const double dev = deviation_of(w - weights[p], count - 1);
      if (dev > best_dev) {
        best_dev = dev;
        best = p;
      }
    }
    alive[best] = false;
    w -= weights[best];
  }
  if (deviation_of(w, hi) < target)
    throw ShrinkFailure("shrink_witness: greedy fallback lost the deviation");
  IndexList out;
  for (std::size_t p = 0; p < side.size(); ++p)
    if (alive[p]) out.push_back(side[p]);
  return out;
}

}  // namespace

Witness shrink_witness(const RealMatrix& a, std::span<const Index> x, std::span<const Index> y,
                       const Witness& w, double epsilon, Rng& rng, double tolerance,
                       std::size_t retries) {
  const IndexList xs = sorted_copy(x);
  const IndexList ys = sorted_copy(y);
  if (!std::includes(xs.begin(), xs.end(), w.rows.begin(), w.rows.end()) ||
      !std::includes(ys.begin(), ys.end(), w.cols.begin(), w.cols.end()))
    throw DomainError("shrink_witness: witness is not inside the block");

  const double d0 = block_density(a, x, y);
  const double target = epsilon - tolerance;
  if (std::abs(block_density(a, w.rows, w.cols) - d0) < target)
    throw DomainError("shrink_witness: witness deviation below epsilon");

  Witness out;
  out.rows = shrink_side(a, w.rows, w.cols, true, x.size(), epsilon, d0, target, rng, retries);
  out.cols = shrink_side(a, w.cols, out.rows, false, y.size(), epsilon, d0, target, rng, retries);
  std::sort(out.rows.begin(), out.rows.end());
  std::sort(out.cols.begin(), out.cols.end());
  out.deviation = witness_deviation(a, x, y, out.rows, out.cols);
  if (out.deviation < target) throw ShrinkFailure("shrink_witness: deviation lost");
  return out;
}

GainSplit gain_split(const RealMatrix& a, std::span<const Index> x, std::span<const Index> y,
                     const Witness& w, const PotentialConfig& cfg, double tolerance) {
  const double eps = cfg.epsilon;
  const double d = block_density(a, x, y);
  if (!cfg.cutoff.is_infinite() && std::abs(d) > eps * cfg.cutoff.value() + tolerance)
    throw DomainError("gain_split: block density exceeds eps * D");

  auto admissible = [&](std::size_t side, std::size_t full) {
    const std::size_t lo = min_subset_size(eps, full);
    const std::size_t hi = full / 2;
    return lo <= side && (side <= hi || lo > hi);
  };
  if (!admissible(w.rows.size(), x.size()) || !admissible(w.cols.size(), y.size()))
    throw DomainError("gain_split: witness outside the size window; shrink it first");
  if (w.rows.size() == x.size() && w.cols.size() == y.size())
    throw DomainError("gain_split: witness covers the whole block");

  const IndexList xs = sorted_copy(x);
  const IndexList ys = sorted_copy(y);
  GainSplit split;
  split.row_parts.push_back(w.rows);
  if (auto rest = set_difference(xs, w.rows); !rest.empty()) split.row_parts.push_back(rest);
  split.col_parts.push_back(w.cols);
  if (auto rest = set_difference(ys, w.cols); !rest.empty()) split.col_parts.push_back(rest);

  split.phi_before = phi_block(a, x, y, cfg.cutoff);
  for (const auto& r : split.row_parts)
    for (const auto& c : split.col_parts) split.phi_after += phi_block(a, r, c, cfg.cutoff);

  const double area = static_cast<double>(x.size()) * static_cast<double>(y.size());
  const double required = eps * eps * eps * eps * area;
  const double slack =
      tolerance * area + 1e-12 * (std::abs(split.phi_before) + std::abs(split.phi_after));
  if (split.gain() < required - slack) {
    throw InvariantError("gain_split: potential gain " + std::to_string(split.gain()) +
                         " below eps^4 |X||Y| = " + std::to_string(required) +
                         " (witness deviation " + std::to_string(w.deviation) + ")");
  }
  return split;
}

}  // namespace regulattice
