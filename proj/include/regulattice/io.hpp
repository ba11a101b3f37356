#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "regulattice/driver.hpp"
#include "regulattice/matrix.hpp"

namespace regulattice {

enum class MatrixFormat { csv_dense, coordinate_triplet, edge_list };

std::string to_string(MatrixFormat f);
MatrixFormat parse_matrix_format(const std::string& s);

struct LoadedMatrix {
  RealMatrix matrix;
  /// Square, symmetric, zero diagonal: usable as a weighted graph.
  bool graph = false;
};

/// Parses one of the text formats. Indices in files are 1-based. Throws
/// ParseError carrying the offending line number.
LoadedMatrix parse_matrix(std::istream& in, MatrixFormat format);
LoadedMatrix load_matrix(const std::string& path, MatrixFormat format);

/// True for a square symmetric matrix with a zero diagonal.
bool is_graph_matrix(const RealMatrix& a);
/// Edges from the strict upper triangle's nonzero entries, 0-based.
WeightedGraph graph_from_matrix(const RealMatrix& a);

struct ConfigEcho {
  double epsilon = 0.0;
  std::size_t min_classes = 0;
  std::optional<std::uint64_t> max_iterations;
  std::size_t oracle_limit = 0;
  std::uint64_t witness_budget = 0;
  std::uint64_t seed = 0;
  std::string mode;
  bool dense = false;
  std::string format;
  std::vector<std::string> inputs;

  friend bool operator==(const ConfigEcho&, const ConfigEcho&) = default;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t matrix_index = 0;
  double phi_before = 0.0;
  double phi_after = 0.0;
  std::size_t row_classes = 0;
  std::size_t col_classes = 0;
  std::size_t row_exceptional = 0;
  std::size_t col_exceptional = 0;
  std::size_t irregular_found = 0;
  std::size_t irregular_split = 0;
  std::size_t skipped_high_density = 0;
  std::size_t witnesses_unknown = 0;
  std::size_t shrink_failures = 0;
  double split_quota = 0.0;
  bool quota_met = false;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct PairRecord {
  std::size_t i = 0;
  std::size_t j = 0;
  std::string status;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

struct RunReport {
  int schema_version = 1;
  ConfigEcho config;
  std::string status;
  std::uint64_t iteration_cap = 0;
  double initial_phi = 0.0;
  double final_phi = 0.0;
  std::vector<IterationRecord> iterations;
  /// Final partition, 1-based members.
  std::vector<IndexList> row_classes;
  std::vector<IndexList> col_classes;
  IndexList row_exceptional;
  IndexList col_exceptional;
  double row_exceptional_fraction = 0.0;
  double col_exceptional_fraction = 0.0;
  /// Per input matrix: row-major block densities of the raw input.
  std::vector<std::vector<double>> densities;
  std::vector<CensusSummary> census;
  /// Graph mode only; 1-based class positions.
  std::optional<std::vector<PairRecord>> pairs;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

RunReport make_report(const RunResult& run, const std::vector<RealMatrix>& inputs,
                      ConfigEcho config);
void attach_pairs(RunReport& report, const std::vector<PairVerdict>& pairs);

std::string serialize_report(const RunReport& report);
RunReport parse_report(const std::string& text);

/// Header plus one line per iteration.
void write_trajectory(std::ostream& out, const RunReport& report);

}  // namespace regulattice
