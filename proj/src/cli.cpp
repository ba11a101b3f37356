#include "regulattice/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "regulattice/driver.hpp"
#include "regulattice/errors.hpp"
#include "regulattice/io.hpp"

namespace regulattice {

namespace {

unsigned threads_from_env() {
  const char* v = std::getenv("REGULATTICE_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0') throw DomainError("REGULATTICE_THREADS must be a nonnegative integer");
  return static_cast<unsigned>(n);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + path + "'");
  f << text;
}

int exit_code(RunStatus s) {
  return s == RunStatus::certified_regular || s == RunStatus::heuristically_regular ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regular block partitions of real matrices and weighted graphs", "regulattice"};

  std::string input;
  std::string format = "csv-dense";
  double epsilon = 0.25;
  std::size_t min_classes = 2;
  bool symmetric = false;
  bool graph = false;
  std::vector<std::string> multi;
  std::uint64_t seed = 0;
  std::size_t oracle_limit = kDefaultOracleLimit;
  std::uint64_t witness_budget = kDefaultWitnessBudget;
  std::optional<std::uint64_t> max_iterations;
  bool dense = false;
  std::string report_path;
  std::string trajectory_path;

  app.add_option("--input", input, "Input matrix file");
  app.add_option("--format", format, "csv-dense | coordinate-triplet | edge-list")
      ->check(CLI::IsMember({"csv-dense", "coordinate-triplet", "edge-list"}));
  app.add_option("--epsilon", epsilon, "Regularity parameter in (0, 1/2]");
  app.add_option("--min-classes", min_classes, "Minimum number of classes per axis");
  auto* sym = app.add_flag("--symmetric", symmetric, "Equal row and column partitions");
  auto* gr = app.add_flag("--graph", graph, "Vertex partition of a weighted graph");
  auto* mul = app.add_option("--multi", multi, "Matrices partitioned simultaneously");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--oracle-limit", oracle_limit, "Largest class side checked exactly");
  app.add_option("--witness-budget", witness_budget, "Random seeds of the witness search");
  app.add_option("--max-iterations", max_iterations, "Iteration cap");
  app.add_flag("--dense", dense, "Plain quadratic potential without cutoff");
  app.add_option("--report", report_path, "JSON report path (default: standard output)");
  app.add_option("--trajectory", trajectory_path, "CSV trajectory path");
  sym->excludes(gr);
  sym->excludes(mul);
  gr->excludes(mul);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  RunConfig cfg;
  std::vector<RealMatrix> matrices;
  ConfigEcho echo;
  RunReport report;
  try {
    if (multi.empty() && input.empty()) throw DomainError("--input or --multi is required");
    if (!multi.empty() && !input.empty()) throw DomainError("--input and --multi are exclusive");

    cfg.epsilon = epsilon;
    cfg.min_classes = min_classes;
    cfg.max_iterations = max_iterations;
    cfg.oracle_limit = oracle_limit;
    cfg.witness_budget = witness_budget;
    cfg.master_seed = seed;
    cfg.dense_mode = dense;
    cfg.threads = threads_from_env();
    cfg.mode = graph       ? RunMode::graph
               : symmetric ? RunMode::symmetric
               : !multi.empty() ? RunMode::multi
                                : RunMode::general;

    const MatrixFormat fmt = parse_matrix_format(format);
    const std::vector<std::string> paths = multi.empty() ? std::vector<std::string>{input} : multi;
    bool graph_data = true;
    for (const auto& p : paths) {
      LoadedMatrix m = load_matrix(p, fmt);
      graph_data = graph_data && m.graph;
      matrices.push_back(std::move(m.matrix));
    }
    if (graph && !graph_data)
      throw DomainError("--graph needs square symmetric input with a zero diagonal");

    echo.epsilon = epsilon;
    echo.min_classes = min_classes;
    echo.max_iterations = max_iterations;
    echo.oracle_limit = oracle_limit;
    echo.witness_budget = witness_budget;
    echo.seed = seed;
    echo.mode = to_string(cfg.mode);
    echo.dense = dense;
    echo.format = format;
    echo.inputs = paths;

    switch (cfg.mode) {
      case RunMode::general:
        report = make_report(regular_partition(matrices.front(), cfg), matrices, echo);
        break;
      case RunMode::symmetric:
        report = make_report(symmetric_regular_partition(matrices.front(), cfg), matrices, echo);
        break;
      case RunMode::multi:
        report = make_report(simultaneous_partition(matrices, cfg), matrices, echo);
        break;
      case RunMode::graph: {
        const GraphRunResult g = graph_regular_partition(graph_from_matrix(matrices.front()), cfg);
        report = make_report(g.run, matrices, echo);
        attach_pairs(report, g.pairs);
        break;
      }
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const StepRefused& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NormalizationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const std::string text = serialize_report(report);
    if (report_path.empty())
      out << text;
    else
      write_file(report_path, text);
    if (!trajectory_path.empty()) {
      std::ostringstream csv;
      write_trajectory(csv, report);
      write_file(trajectory_path, csv.str());
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code(parse_run_status(report.status));
}

}  // namespace regulattice
