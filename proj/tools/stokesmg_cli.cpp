#include "stokesmg/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <regex>

namespace {

std::pair<int, int> parse_levels(const std::string& text) {
  static const std::regex range(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, range)) throw std::invalid_argument("--levels expects a..b or a single level");
  const int lo = std::stoi(m[1]);
  const int hi = m[2].matched ? std::stoi(m[2]) : lo;
  if (hi < lo) throw std::invalid_argument("--levels: empty range");
  return {lo, hi};
}

}  // namespace

int main(int argc, char** argv) {
  using namespace stokesmg;
  CLI::App app{"Multigrid benchmarks for compatible B-spline Stokes and Oseen discretizations"};

  std::string problem = "square-stokes";
  int degree = 2;
  std::string levels = "1..5";
  std::vector<double> da{1.0};
  std::vector<double> re;
  bool zip = false;
  std::string smoother = "mult";
  SmootherConfig config;
  SolveOptions options;
  std::string format = "text";
  std::string dump;
  bool allow_large = false;

  std::vector<std::string> names;
  for (const auto& c : benchmark_cases()) names.push_back(c.name);
  app.add_option("--problem", problem, "Benchmark case")->check(CLI::IsMember(names));
  app.add_option("--degree", degree, "Spline degree p (>= 2)")->check(CLI::Range(2, 6));
  app.add_option("--levels", levels, "Refinement levels a..b");
  app.add_option("--da", da, "Damkohler numbers (comma separated)")->delimiter(',');
  app.add_option("--re", re, "Reynolds numbers for Oseen cases (comma separated)")->delimiter(',');
  app.add_flag("--zip", zip, "Pair --da and --re elementwise instead of taking all combinations");
  app.add_option("--smoother", smoother, "Schwarz smoother")->check(CLI::IsMember({"mult", "add"}));
  app.add_option("--eta", config.eta, "Additive scaling factor")->check(CLI::Range(0.0, 1.0));
  app.add_option("--nu1", config.nu1, "Pre-smoothing steps")->check(CLI::NonNegativeNumber);
  app.add_option("--nu2", config.nu2, "Post-smoothing steps")->check(CLI::NonNegativeNumber);
  app.add_option("--tol", options.tol, "Relative residual reduction");
  app.add_option("--max-cycles", options.max_cycles, "Cycle limit before a run is reported as DNC");
  app.add_option("--seed", options.seed, "Seed of the random initial guess");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv"}));
  app.add_option("--dump-matrix", dump, "Write K and F of the finest level to <path>_K.mtx and <path>_F.mtx");
  app.add_flag("--allow-large", allow_large, "Permit levels above 8 (2D) or 4 (3D)");
  CLI11_PARSE(app, argc, argv);

  try {
    BenchmarkCase bench;
    bench.name = problem;
    bench.degree = degree;
    std::tie(bench.level_min, bench.level_max) = parse_levels(levels);
    config.kind = smoother == "add" ? SmootherKind::Additive : SmootherKind::Multiplicative;
    config.threads = threads_from_environment();
    bench.smoother = config;
    bench.solve = options;
    bench.allow_large = allow_large;

    bench.combos.clear();
    if (find_case(problem).problem == FlowProblem::Stokes) {
      for (double d : da) bench.combos.push_back({d, std::nullopt});
    } else {
      if (re.empty()) re = {1.0};
      if (zip) {
        if (re.size() != da.size()) throw std::invalid_argument("--zip needs equally many --da and --re values");
        for (std::size_t i = 0; i < re.size(); ++i) bench.combos.push_back({da[i], re[i]});
      } else {
        for (double r : re)
          for (double d : da) bench.combos.push_back({d, r});
      }
    }

    if (!dump.empty()) write_matrix_market(assemble_case(bench, bench.level_max, bench.combos.front()), dump);

    const RunRecord record = run_case(bench);
    emit_table(record, format == "csv" ? OutputFormat::Csv : OutputFormat::Text, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
