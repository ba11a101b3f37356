#include "regulattice/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "regulattice/errors.hpp"

namespace regulattice {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// U+2212 (minus sign) is accepted as '-'.
std::string ascii_minus(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.compare(i, 3, "\xE2\x88\x92") == 0) {
      out.push_back('-');
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

double parse_real(std::string_view token, std::size_t line) {
  const std::string s = ascii_minus(trim(token));
  std::string_view v = s;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ParseError("expected a real number, got '" + std::string(token) + "'", line);
  if (!std::isfinite(x)) throw ParseError("non-finite value '" + std::string(token) + "'", line);
  return x;
}

std::size_t parse_count(std::string_view token, std::size_t line) {
  std::size_t x = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError("expected a nonnegative integer, got '" + std::string(token) + "'", line);
  return x;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '%' || t.front() == '#';
}

LoadedMatrix finish(RealMatrix m) {
  const bool g = is_graph_matrix(m);
  return {std::move(m), g};
}

LoadedMatrix parse_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      row.push_back(parse_real(rest.substr(0, comma), no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(rows.front().size()),
                       no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data rows", 1);
  return finish(RealMatrix::from_rows(rows));
}

LoadedMatrix parse_coordinate(std::istream& in) {
  std::string line;
  std::size_t no = 0;
  std::size_t m = 0, n = 0, nnz = 0;
  bool have_header = false;
  std::vector<double> data;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (std::getline(in, line)) {
    ++no;
    if (skippable(line)) continue;
    const auto tok = split_ws(ascii_minus(line));
    if (tok.size() != 3) throw ParseError("expected three fields", no);
    if (!have_header) {
      m = parse_count(tok[0], no);
      n = parse_count(tok[1], no);
      nnz = parse_count(tok[2], no);
      if (m == 0 || n == 0) throw ParseError("matrix dimensions must be positive", no);
      data.assign(m * n, 0.0);
      have_header = true;
      continue;
    }
    const std::size_t i = parse_count(tok[0], no);
    const std::size_t j = parse_count(tok[1], no);
    if (i < 1 || i > m || j < 1 || j > n)
      throw ParseError("coordinate (" + tok[0] + ", " + tok[1] + ") out of range", no);
    if (!seen.emplace(i, j).second)
      throw ParseError("duplicate coordinate (" + tok[0] + ", " + tok[1] + ")", no);
    if (seen.size() > nnz) throw ParseError("more entries than the header's nnz", no);
    data[(i - 1) * n + (j - 1)] = parse_real(tok[2], no);
  }
  if (!have_header) throw ParseError("missing 'm n nnz' header", no + 1);
  if (seen.size() != nnz)
    throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                         std::to_string(seen.size()),
                     no + 1);
  return finish(RealMatrix(m, n, std::move(data)));
}

LoadedMatrix parse_edges(std::istream& in) {
  std::string line;
  std::size_t no = 0;
  WeightedGraph g;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (std::getline(in, line)) {
    ++no;
    if (skippable(line)) continue;
    const auto tok = split_ws(ascii_minus(line));
    if (tok.size() != 2 && tok.size() != 3) throw ParseError("expected 'u v [w]'", no);
    const std::size_t u = parse_count(tok[0], no);
    const std::size_t v = parse_count(tok[1], no);
    if (u < 1 || v < 1) throw ParseError("vertices are numbered from 1", no);
    if (u == v) throw ParseError("self-loop at vertex " + tok[0], no);
    if (!seen.emplace(std::min(u, v), std::max(u, v)).second)
      throw ParseError("duplicate edge " + tok[0] + " " + tok[1], no);
    const double w = tok.size() == 3 ? parse_real(tok[2], no) : 1.0;
    g.edges.push_back({u - 1, v - 1, w});
    g.vertex_count = std::max({g.vertex_count, u, v});
  }
  if (g.edges.empty()) throw ParseError("no edges", no + 1);
  return {adjacency_matrix(g), true};
}

json census_json(const CensusSummary& s) {
  return {{"blocks", s.blocks},
          {"certified_regular", s.certified_regular},
          {"irregular", s.irregular},
          {"unknown", s.unknown},
          {"allowance", s.allowance}};
}

CensusSummary census_from(const json& j) {
  return {j.at("blocks").get<std::size_t>(), j.at("certified_regular").get<std::size_t>(),
          j.at("irregular").get<std::size_t>(), j.at("unknown").get<std::size_t>(),
          j.at("allowance").get<double>()};
}

IndexList one_based(const IndexList& v) {
  IndexList out(v);
  for (auto& x : out) ++x;
  return out;
}

std::vector<IndexList> one_based(const std::vector<IndexList>& v) {
  std::vector<IndexList> out;
  for (const auto& c : v) out.push_back(one_based(c));
  return out;
}

}  // namespace

std::string to_string(MatrixFormat f) {
  switch (f) {
    case MatrixFormat::csv_dense: return "csv-dense";
    case MatrixFormat::coordinate_triplet: return "coordinate-triplet";
    case MatrixFormat::edge_list: return "edge-list";
  }
  return "csv-dense";
}

MatrixFormat parse_matrix_format(const std::string& s) {
  for (MatrixFormat f :
       {MatrixFormat::csv_dense, MatrixFormat::coordinate_triplet, MatrixFormat::edge_list})
    if (to_string(f) == s) return f;
  throw DomainError("unknown format '" + s + "'");
}

LoadedMatrix parse_matrix(std::istream& in, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::csv_dense: return parse_csv(in);
    case MatrixFormat::coordinate_triplet: return parse_coordinate(in);
    case MatrixFormat::edge_list: return parse_edges(in);
  }
  throw DomainError("unknown format");
}

LoadedMatrix load_matrix(const std::string& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  return parse_matrix(in, format);
}

bool is_graph_matrix(const RealMatrix& a) {
  if (!a.symmetric()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (a(i, i) != 0.0) return false;
  return true;
}

WeightedGraph graph_from_matrix(const RealMatrix& a) {
  if (!is_graph_matrix(a))
    throw DomainError("graph input must be square and symmetric with a zero diagonal");
  WeightedGraph g;
  g.vertex_count = a.rows();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != 0.0) g.edges.push_back({i, j, a(i, j)});
  return g;
}

RunReport make_report(const RunResult& run, const std::vector<RealMatrix>& inputs,
                      ConfigEcho config) {
  RunReport r;
  r.config = std::move(config);
  r.status = to_string(run.status);
  r.iteration_cap = run.iteration_cap;
  r.initial_phi = run.initial_phi;
  r.final_phi = run.final_phi;
  for (std::size_t t = 0; t < run.iterations.size(); ++t) {
    const RefineOutcome& o = run.iterations[t];
    IterationRecord rec;
    rec.iteration = t + 1;
    rec.matrix_index = o.matrix_index;
    rec.phi_before = o.phi_before;
    rec.phi_after = o.phi_after;
    rec.row_classes = o.partition.rows().class_count();
    rec.col_classes = o.partition.cols().class_count();
    rec.row_exceptional = o.partition.rows().exceptional().size();
    rec.col_exceptional = o.partition.cols().exceptional().size();
    rec.irregular_found = o.irregular_found;
    rec.irregular_split = o.irregular_low_density_split;
    rec.skipped_high_density = o.blocks_skipped_high_density;
    rec.witnesses_unknown = o.witnesses_unknown;
    rec.shrink_failures = o.shrink_failures;
    rec.split_quota = o.split_quota;
    rec.quota_met = o.quota_met;
    r.iterations.push_back(rec);
  }
  const Partition& rows = run.partition.rows();
  const Partition& cols = run.partition.cols();
  r.row_classes = one_based(rows.classes());
  r.col_classes = one_based(cols.classes());
  r.row_exceptional = one_based(rows.exceptional());
  r.col_exceptional = one_based(cols.exceptional());
  r.row_exceptional_fraction = run.exceptional_fractions.first;
  r.col_exceptional_fraction = run.exceptional_fractions.second;
  for (const auto& a : inputs) {
    const auto w = block_weight_table(a, rows.classes(), cols.classes());
    std::vector<double> d(w.size());
    for (std::size_t i = 0; i < rows.class_count(); ++i)
      for (std::size_t j = 0; j < cols.class_count(); ++j) {
        const std::size_t at = i * cols.class_count() + j;
        d[at] = w[at] / (static_cast<double>(rows[i].size()) * static_cast<double>(cols[j].size()));
      }
    r.densities.push_back(std::move(d));
  }
  r.census = run.final_census;
  return r;
}

void attach_pairs(RunReport& report, const std::vector<PairVerdict>& pairs) {
  std::vector<PairRecord> out;
  for (const auto& p : pairs) {
    std::string s = p.status == RegularityStatus::regular     ? "regular"
                    : p.status == RegularityStatus::irregular ? "irregular"
                                                              : "unknown";
    out.push_back({p.i + 1, p.j + 1, std::move(s)});
  }
  report.pairs = std::move(out);
}

std::string serialize_report(const RunReport& r) {
  json cfg = {{"epsilon", r.config.epsilon},
              {"min_classes", r.config.min_classes},
              {"max_iterations", nullptr},
              {"oracle_limit", r.config.oracle_limit},
              {"witness_budget", r.config.witness_budget},
              {"seed", r.config.seed},
              {"mode", r.config.mode},
              {"dense", r.config.dense},
              {"format", r.config.format},
              {"inputs", r.config.inputs}};
  if (r.config.max_iterations) cfg["max_iterations"] = *r.config.max_iterations;

  json its = json::array();
  for (const auto& it : r.iterations) {
    its.push_back({{"iteration", it.iteration},
                   {"matrix_index", it.matrix_index},
                   {"phi_before", it.phi_before},
                   {"phi_after", it.phi_after},
                   {"row_classes", it.row_classes},
                   {"col_classes", it.col_classes},
                   {"row_exceptional", it.row_exceptional},
                   {"col_exceptional", it.col_exceptional},
                   {"irregular_found", it.irregular_found},
                   {"irregular_split", it.irregular_split},
                   {"skipped_high_density", it.skipped_high_density},
                   {"witnesses_unknown", it.witnesses_unknown},
                   {"shrink_failures", it.shrink_failures},
                   {"split_quota", it.split_quota},
                   {"quota_met", it.quota_met}});
  }
  json census = json::array();
  for (const auto& c : r.census) census.push_back(census_json(c));

  json j = {{"schema_version", r.schema_version},
            {"config", cfg},
            {"status", r.status},
            {"iteration_cap", r.iteration_cap},
            {"initial_phi", r.initial_phi},
            {"final_phi", r.final_phi},
            {"iterations", its},
            {"partition",
             {{"row_classes", r.row_classes},
              {"col_classes", r.col_classes},
              {"row_exceptional", r.row_exceptional},
              {"col_exceptional", r.col_exceptional},
              {"row_exceptional_fraction", r.row_exceptional_fraction},
              {"col_exceptional_fraction", r.col_exceptional_fraction}}},
            {"densities", r.densities},
            {"census", census}};
  if (r.pairs) {
    json pairs = json::array();
    for (const auto& p : *r.pairs) pairs.push_back({{"i", p.i}, {"j", p.j}, {"status", p.status}});
    j["pairs"] = pairs;
  }
  return j.dump(2) + "\n";
}

RunReport parse_report(const std::string& text) {
  const json j = json::parse(text);
  RunReport r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != 1)
    throw DomainError("unsupported report schema " + std::to_string(r.schema_version));

  const json& c = j.at("config");
  r.config.epsilon = c.at("epsilon").get<double>();
  r.config.min_classes = c.at("min_classes").get<std::size_t>();
  if (!c.at("max_iterations").is_null())
    r.config.max_iterations = c.at("max_iterations").get<std::uint64_t>();
  r.config.oracle_limit = c.at("oracle_limit").get<std::size_t>();
  r.config.witness_budget = c.at("witness_budget").get<std::uint64_t>();
  r.config.seed = c.at("seed").get<std::uint64_t>();
  r.config.mode = c.at("mode").get<std::string>();
  r.config.dense = c.at("dense").get<bool>();
  r.config.format = c.at("format").get<std::string>();
  r.config.inputs = c.at("inputs").get<std::vector<std::string>>();

  r.status = j.at("status").get<std::string>();
  r.iteration_cap = j.at("iteration_cap").get<std::uint64_t>();
  r.initial_phi = j.at("initial_phi").get<double>();
  r.final_phi = j.at("final_phi").get<double>();
  for (const auto& it : j.at("iterations")) {
    IterationRecord rec;
    rec.iteration = it.at("iteration").get<std::size_t>();
    rec.matrix_index = it.at("matrix_index").get<std::size_t>();
    rec.phi_before = it.at("phi_before").get<double>();
    rec.phi_after = it.at("phi_after").get<double>();
    rec.row_classes = it.at("row_classes").get<std::size_t>();
    rec.col_classes = it.at("col_classes").get<std::size_t>();
    rec.row_exceptional = it.at("row_exceptional").get<std::size_t>();
    rec.col_exceptional = it.at("col_exceptional").get<std::size_t>();
    rec.irregular_found = it.at("irregular_found").get<std::size_t>();
    rec.irregular_split = it.at("irregular_split").get<std::size_t>();
    rec.skipped_high_density = it.at("skipped_high_density").get<std::size_t>();
    rec.witnesses_unknown = it.at("witnesses_unknown").get<std::size_t>();
    rec.shrink_failures = it.at("shrink_failures").get<std::size_t>();
    rec.split_quota = it.at("split_quota").get<double>();
    rec.quota_met = it.at("quota_met").get<bool>();
    r.iterations.push_back(rec);
  }
  const json& p = j.at("partition");
  r.row_classes = p.at("row_classes").get<std::vector<IndexList>>();
  r.col_classes = p.at("col_classes").get<std::vector<IndexList>>();
  r.row_exceptional = p.at("row_exceptional").get<IndexList>();
  r.col_exceptional = p.at("col_exceptional").get<IndexList>();
  r.row_exceptional_fraction = p.at("row_exceptional_fraction").get<double>();
  r.col_exceptional_fraction = p.at("col_exceptional_fraction").get<double>();
  r.densities = j.at("densities").get<std::vector<std::vector<double>>>();
  for (const auto& cs : j.at("census")) r.census.push_back(census_from(cs));
  if (j.contains("pairs")) {
    std::vector<PairRecord> pairs;
    for (const auto& q : j.at("pairs"))
      pairs.push_back({q.at("i").get<std::size_t>(), q.at("j").get<std::size_t>(),
                       q.at("status").get<std::string>()});
    r.pairs = std::move(pairs);
  }
  return r;
}

void write_trajectory(std::ostream& out, const RunReport& report) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "iteration,phi,row_classes,col_classes,row_exceptional,col_exceptional\n";
  for (const auto& it : report.iterations)
    buf << it.iteration << ',' << it.phi_after << ',' << it.row_classes << ',' << it.col_classes
        << ',' << it.row_exceptional << ',' << it.col_exceptional << '\n';
  out << buf.str();
}

}  // namespace regulattice
