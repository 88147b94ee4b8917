#pragma once

#include "stokesmg/manufactured.hpp"
#include "stokesmg/multigrid.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stokesmg {

/// Geometry and flow model bound to a benchmark name.
struct CaseDefinition {
  std::string name;
  GeometryKind geometry;
  FlowProblem problem;
};

/// square-stokes, annulus-stokes, cube-stokes, cylinder-stokes,
/// square-oseen, cube-oseen.
const std::vector<CaseDefinition>& benchmark_cases();
/// Throws std::invalid_argument for an unknown name.
const CaseDefinition& find_case(const std::string& name);

struct ParameterCombo {
  double da = 1.0;
  std::optional<double> re;  // Oseen only
};

struct BenchmarkCase {
  std::string name = "square-stokes";
  int degree = 2;
  int level_min = 1;
  int level_max = 5;
  std::vector<ParameterCombo> combos{ParameterCombo{}};
  SmootherConfig smoother;
  SolveOptions solve;
  bool allow_large = false;
};

struct RunRow {
  std::string case_name;
  int level = 0;
  Index dofs = 0;
  double da = 1.0;
  std::optional<double> re;
  std::string smoother;
  int cycles = 0;
  bool converged = false;
  double final_rel_residual = 0.0;
  double max_div = 0.0;
  double seconds = 0.0;
};

struct RunRecord {
  BenchmarkCase config;
  std::vector<RunRow> rows;  // level-major, combos in order
};

/// Largest default level: 8 in 2D, 4 in 3D.
int level_cap(int dim);

/// Builds the problem on one level for one parameter combo and solves it.
RunRow run_single(const BenchmarkCase& bench, int level, const ParameterCombo& combo);
RunRow run_single(const BenchmarkCase& bench, int level, const ParameterCombo& combo, SolveResult& result);
RunRecord run_case(const BenchmarkCase& bench);

/// Assembled finest system of one level, for export.
SaddleSystem assemble_case(const BenchmarkCase& bench, int level, const ParameterCombo& combo);

enum class OutputFormat { Text, Csv };

void emit_table(const RunRecord& record, OutputFormat format, std::ostream& out);
std::vector<RunRow> parse_csv(std::istream& in);

std::string smoother_name(SmootherKind kind);

/// Thread count for the additive smoother from STOKESMG_THREADS (default 1).
int threads_from_environment();

}  // namespace stokesmg
