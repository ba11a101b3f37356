#include "regulattice/driver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "regulattice/errors.hpp"
#include "regulattice/potential.hpp"

namespace regulattice {

namespace {

void check_epsilon(double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw DomainError("epsilon must lie in (0, 1/2]");
}

std::uint64_t ceil_to_u64(double v) {
  // Shave rounding noise so that e.g. 256 / 0.5^7 gives exactly 32768.
  return static_cast<std::uint64_t>(std::ceil(v * (1.0 - 1e-12)));
}

PotentialConfig potential_for(const RunConfig& cfg, double eps) {
  return cfg.dense_mode ? PotentialConfig::dense(eps) : PotentialConfig::for_refinement(eps);
}

// Normalized entries rounded to multiples of 2^-36. Inputs that differ only
// by a positive factor then give bit-identical matrices (barring a value
// within rounding noise of a grid midpoint), and block sums of grid values
// are exact, so ties between candidate witnesses stay exact ties.
RealMatrix canonical(const RealMatrix& a) {
  const RealMatrix n = normalize(a);
  std::vector<double> v(n.entries().begin(), n.entries().end());
  for (double& x : v) x = std::ldexp(std::nearbyint(std::ldexp(x, 36)), -36);
  return RealMatrix(n.rows(), n.cols(), std::move(v));
}

BlockCheckOptions check_options(const RunConfig& cfg) {
  return {cfg.tolerance, cfg.oracle_limit, cfg.witness_budget};
}

StepOptions step_options(const RunConfig& cfg, std::uint64_t step_index) {
  StepOptions o;
  o.check = check_options(cfg);
  o.shrink_retries = cfg.shrink_retries;
  o.master_seed = cfg.master_seed;
  o.step_index = step_index;
  o.threads = cfg.threads;
  return o;
}

Partition initial_axis(std::size_t n, std::size_t classes, double eps, const char* axis) {
  if (n < classes) {
    throw SizeError(std::string(axis) + " count " + std::to_string(n) +
                    " is below the initial class count " + std::to_string(classes));
  }
  Partition p = Partition::equal_blocks(n, classes);
  // Later steps add less than eps n / 2 to the exceptional set, so the
  // initial remainder must stay below eps n / 2.
  if (2.0 * static_cast<double>(p.exceptional().size()) >= eps * static_cast<double>(n)) {
    throw SizeError(std::string(axis) + " count " + std::to_string(n) +
                    " leaves an initial exceptional set of " +
                    std::to_string(p.exceptional().size()) + ", not below eps n / 2");
  }
  return p;
}

std::pair<double, double> exceptional_fractions(const BlockPartition& bp) {
  return {static_cast<double>(bp.rows().exceptional().size()) / static_cast<double>(bp.rows().size()),
          static_cast<double>(bp.cols().exceptional().size()) / static_cast<double>(bp.cols().size())};
}

bool census_regular(const CensusSummary& s) {
  return static_cast<double>(s.irregular) <= s.allowance + 1e-12;
}

void check_exceptional(const RunResult& r, double eps) {
  if (r.exceptional_fractions.first >= eps || r.exceptional_fractions.second >= eps)
    throw InvariantError("exceptional sets reached an eps fraction of an axis");
}

// Shared loop of the general and symmetric drivers on a normalized matrix.
RunResult iterate(const RealMatrix& a, BlockPartition bp, const RunConfig& cfg, double eps,
                  bool symmetric, std::uint64_t cap) {
  const PotentialConfig pcfg = potential_for(cfg, eps);
  RunResult result;
  result.iteration_cap = cap;
  result.initial_phi = phi_partition(a, bp, pcfg.cutoff);

  for (std::uint64_t step = 0;; ++step) {
    const StepOptions opts = step_options(cfg, step);
    const BlockCensus census =
        classify_blocks(a, bp, eps, opts.check, census_seed(opts), cfg.threads);
    const CensusSummary summary = summarize(census, eps);
    if (census_regular(summary)) {
      result.status = summary.unknown == 0 ? RunStatus::certified_regular
                                           : RunStatus::heuristically_regular;
      result.final_census = {summary};
      break;
    }
    if (result.iterations.size() >= cap) {
      result.status = RunStatus::iteration_cap;
      result.final_census = {summary};
      break;
    }
    RefineOutcome out = symmetric ? symmetric_refinement_step(a, bp, pcfg, opts, &census)
                                  : refinement_step(a, bp, pcfg, opts, &census);
    if (symmetric && out.partition.rows() != out.partition.cols())
      throw InvariantError("symmetric step produced distinct row and column partitions");
    bp = out.partition;
    const bool shortfall = !out.quota_met;
    result.iterations.push_back(std::move(out));
    if (shortfall) {
      result.status = RunStatus::quota_shortfall;
      const StepOptions next = step_options(cfg, step + 1);
      result.final_census = {summarize(
          classify_blocks(a, bp, eps, next.check, census_seed(next), cfg.threads), eps)};
      break;
    }
  }

  result.partition = std::move(bp);
  result.final_phi = phi_partition(a, result.partition, pcfg.cutoff);
  result.exceptional_fractions = exceptional_fractions(result.partition);
  check_exceptional(result, eps);
  return result;
}

RunResult zero_matrix_result(BlockPartition bp, std::uint64_t cap, double eps) {
  RunResult r;
  r.iteration_cap = cap;
  r.status = RunStatus::certified_regular;
  const std::size_t blocks = bp.rows().class_count() * bp.cols().class_count();
  r.final_census = {CensusSummary{blocks, blocks, 0, 0, eps * static_cast<double>(blocks)}};
  r.exceptional_fractions = exceptional_fractions(bp);
  r.partition = std::move(bp);
  return r;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::general: return "general";
    case RunMode::symmetric: return "symmetric";
    case RunMode::graph: return "graph";
    case RunMode::multi: return "multi";
  }
  return "general";
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::certified_regular: return "CertifiedRegular";
    case RunStatus::heuristically_regular: return "HeuristicallyRegular";
    case RunStatus::quota_shortfall: return "QuotaShortfall";
    case RunStatus::iteration_cap: return "IterationCap";
  }
  return "IterationCap";
}

RunMode parse_run_mode(const std::string& s) {
  for (RunMode m : {RunMode::general, RunMode::symmetric, RunMode::graph, RunMode::multi})
    if (to_string(m) == s) return m;
  throw DomainError("unknown run mode '" + s + "'");
}

RunStatus parse_run_status(const std::string& s) {
  for (RunStatus st : {RunStatus::certified_regular, RunStatus::heuristically_regular,
                       RunStatus::quota_shortfall, RunStatus::iteration_cap})
    if (to_string(st) == s) return st;
  throw DomainError("unknown run status '" + s + "'");
}

std::uint64_t default_iteration_cap(double epsilon) {
  return ceil_to_u64(256.0 / std::pow(epsilon, 7));
}

std::uint64_t default_symmetric_iteration_cap(double epsilon) {
  return ceil_to_u64(1024.0 / std::pow(epsilon, 7));
}

CensusSummary summarize(const BlockCensus& census, double epsilon) {
  CensusSummary s;
  s.blocks = census.blocks();
  s.certified_regular = census.certified_regular;
  s.irregular = census.irregular;
  s.unknown = census.unknown;
  s.allowance = epsilon * static_cast<double>(census.row_classes) *
                static_cast<double>(census.col_classes);
  return s;
}

std::size_t initial_class_count(double epsilon, std::size_t min_classes) {
  check_epsilon(epsilon);
  const auto log_term = static_cast<std::size_t>(std::ceil(std::log2(1.0 / epsilon) - 1e-12)) + 2;
  return std::max(min_classes, log_term);
}

std::size_t initial_symmetric_class_count(double epsilon, std::size_t min_classes) {
  check_epsilon(epsilon);
  return static_cast<std::size_t>(
      std::ceil(4.0 * static_cast<double>(min_classes) / epsilon * (1.0 - 1e-12)));
}

RunResult regular_partition(const RealMatrix& a, const RunConfig& cfg) {
  const double eps = cfg.epsilon;
  const std::size_t c = initial_class_count(eps, cfg.min_classes);
  BlockPartition bp(initial_axis(a.rows(), c, eps, "row"), initial_axis(a.cols(), c, eps, "column"));
  const std::uint64_t cap = cfg.max_iterations.value_or(default_iteration_cap(eps));
  if (total_mass(a) == 0.0) return zero_matrix_result(std::move(bp), cap, eps);
  return iterate(canonical(a), std::move(bp), cfg, eps, false, cap);
}

RunResult symmetric_regular_partition(const RealMatrix& a, const RunConfig& cfg) {
  if (!a.square()) throw DomainError("symmetric partition needs a square matrix");
  const double eps = cfg.epsilon;
  const std::size_t c = initial_symmetric_class_count(eps, cfg.min_classes);
  auto bp = BlockPartition::symmetric_of(initial_axis(a.rows(), c, eps, "row"));
  const std::uint64_t cap = cfg.max_iterations.value_or(default_symmetric_iteration_cap(eps));
  if (total_mass(a) == 0.0) return zero_matrix_result(std::move(bp), cap, eps);
  return iterate(canonical(a), std::move(bp), cfg, eps, true, cap);
}

RealMatrix adjacency_matrix(const WeightedGraph& g) {
  if (g.vertex_count == 0) throw DomainError("graph has no vertices");
  const std::size_t n = g.vertex_count;
  std::vector<double> data(n * n, 0.0);
  for (const auto& e : g.edges) {
    if (e.u >= n || e.v >= n) throw DomainError("edge endpoint out of range");
    if (e.u == e.v) throw DomainError("self-loops are not allowed");
    data[e.u * n + e.v] += e.weight;
    data[e.v * n + e.u] += e.weight;
  }
  return RealMatrix(n, n, std::move(data));
}

GraphRunResult graph_regular_partition(const WeightedGraph& g, const RunConfig& cfg) {
  check_epsilon(cfg.epsilon);
  const RealMatrix adj = adjacency_matrix(g);
  GraphRunResult out;
  if (total_mass(adj) == 0.0) {
    // No weight: a single class, no pairs to judge.
    out.run = zero_matrix_result(BlockPartition::symmetric_of(Partition::trivial(g.vertex_count)),
                                 0, cfg.epsilon);
    out.vertices = out.run.partition.rows();
    return out;
  }

  RunConfig inner = cfg;
  inner.epsilon = cfg.epsilon / 2.0;
  inner.mode = RunMode::graph;
  out.run = symmetric_regular_partition(adj, inner);
  out.vertices = out.run.partition.rows();

  // Pair verdicts for the final partition at the run's epsilon; a pair is
  // irregular if either orientation carries a witness.
  const std::uint64_t step = out.run.iterations.size();
  const StepOptions opts = step_options(inner, step);
  const BlockCensus census = classify_blocks(canonical(adj), out.run.partition, inner.epsilon,
                                             opts.check, census_seed(opts), inner.threads);
  const std::size_t k = out.vertices.class_count();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = census.verdict(i, j);
      const auto& b = census.verdict(j, i);
      RegularityStatus st = RegularityStatus::regular;
      if (a.irregular() || b.irregular())
        st = RegularityStatus::irregular;
      else if (a.status == RegularityStatus::unknown || b.status == RegularityStatus::unknown)
        st = RegularityStatus::unknown;
      out.pairs.push_back({i, j, st});
    }
  }
  return out;
}

RunResult simultaneous_partition(const std::vector<RealMatrix>& as, const RunConfig& cfg) {
  if (as.empty()) throw DomainError("simultaneous partition needs at least one matrix");
  for (const auto& m : as)
    if (m.rows() != as.front().rows() || m.cols() != as.front().cols())
      throw DomainError("simultaneous partition needs matrices of identical shape");

  const double eps = cfg.epsilon;
  const std::size_t c = initial_class_count(eps, cfg.min_classes);
  BlockPartition bp(initial_axis(as.front().rows(), c, eps, "row"),
                    initial_axis(as.front().cols(), c, eps, "column"));
  const std::size_t count = as.size();
  const std::uint64_t cap =
      cfg.max_iterations.value_or(static_cast<std::uint64_t>(count) * default_iteration_cap(eps));

  // Zero matrices are regular under every partition and take no part.
  std::vector<std::optional<RealMatrix>> normalized;
  for (const auto& m : as) {
    if (total_mass(m) == 0.0)
      normalized.emplace_back(std::nullopt);
    else
      normalized.emplace_back(canonical(m));
  }

  const PotentialConfig pcfg = potential_for(cfg, eps);
  auto total_phi = [&](const BlockPartition& p) {
    double s = 0.0;
    for (const auto& m : normalized)
      if (m) s += phi_partition(*m, p, pcfg.cutoff);
    return s;
  };

  RunResult result;
  result.iteration_cap = cap;
  result.initial_phi = total_phi(bp);
  std::vector<CensusSummary> latest(count);
  for (std::size_t t = 0; t < count; ++t)
    if (!normalized[t]) latest[t] = zero_matrix_result(bp, cap, eps).final_census.front();

  // Visit the matrices cyclically; stop once a full cycle finds every
  // matrix regular under the current partition.
  std::size_t regular_in_a_row = 0;
  bool stopped = false;
  for (std::size_t t = 0; !stopped; t = (t + 1) % count) {
    if (!normalized[t]) {
      latest[t] = zero_matrix_result(bp, cap, eps).final_census.front();
      if (++regular_in_a_row == count) break;
      continue;
    }
    const RealMatrix& a = *normalized[t];
    const std::uint64_t step = result.iterations.size();
    const StepOptions opts = step_options(cfg, step);
    const BlockCensus census =
        classify_blocks(a, bp, eps, opts.check, census_seed(opts), cfg.threads);
    latest[t] = summarize(census, eps);
    if (census_regular(latest[t])) {
      if (++regular_in_a_row == count) break;
      continue;
    }
    regular_in_a_row = 0;
    if (result.iterations.size() >= cap) {
      result.status = RunStatus::iteration_cap;
      stopped = true;
      break;
    }
    RefineOutcome out = refinement_step(a, bp, pcfg, opts, &census);
    out.matrix_index = t;
    bp = out.partition;
    const bool shortfall = !out.quota_met;
    result.iterations.push_back(std::move(out));
    if (shortfall) {
      result.status = RunStatus::quota_shortfall;
      stopped = true;
    }
  }

  if (!stopped) {
    bool any_unknown = false;
    for (const auto& s : latest) any_unknown = any_unknown || s.unknown > 0;
    result.status =
        any_unknown ? RunStatus::heuristically_regular : RunStatus::certified_regular;
  } else {
    // Refresh every summary against the final partition.
    const StepOptions opts = step_options(cfg, result.iterations.size());
    for (std::size_t t = 0; t < count; ++t) {
      if (!normalized[t]) continue;
      latest[t] = summarize(classify_blocks(*normalized[t], bp, eps, opts.check,
                                            census_seed(opts), cfg.threads),
                            eps);
    }
  }

  result.partition = std::move(bp);
  result.final_census = std::move(latest);
  result.final_phi = total_phi(result.partition);
  result.exceptional_fractions = exceptional_fractions(result.partition);
  check_exceptional(result, eps);
  return result;
}

VerificationReport verify_partition(const RealMatrix& a, const BlockPartition& bp, double epsilon,
                                    const RunConfig& cfg) {
  bp.check_covers(a);
  VerificationReport r;
  r.balanced = bp.balanced();
  const auto [fr, fc] = exceptional_fractions(bp);
  r.row_exceptional_ok = fr < epsilon;
  r.col_exceptional_ok = fc < epsilon;
  if (total_mass(a) == 0.0) {
    const std::size_t blocks = bp.rows().class_count() * bp.cols().class_count();
    r.census = {blocks, blocks, 0, 0, epsilon * static_cast<double>(blocks)};
  } else {
    const BlockCensus census =
        classify_blocks(canonical(a), bp, epsilon, check_options(cfg),
                        derive_seed(cfg.master_seed, {0xfeedULL}), cfg.threads);
    r.census = summarize(census, epsilon);
  }
  r.fraction_ok = census_regular(r.census);
  return r;
}

}  // namespace regulattice
