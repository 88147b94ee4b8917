#include "stokesmg/harness.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stokesmg {

const std::vector<CaseDefinition>& benchmark_cases() {
  static const std::vector<CaseDefinition> cases{
      {"square-stokes", GeometryKind::UnitSquare, FlowProblem::Stokes},
      {"annulus-stokes", GeometryKind::QuarterAnnulus, FlowProblem::Stokes},
      {"cube-stokes", GeometryKind::UnitCube, FlowProblem::Stokes},
      {"cylinder-stokes", GeometryKind::HollowCylinder, FlowProblem::Stokes},
      {"square-oseen", GeometryKind::UnitSquare, FlowProblem::Oseen},
      {"cube-oseen", GeometryKind::UnitCube, FlowProblem::Oseen},
  };
  return cases;
}

const CaseDefinition& find_case(const std::string& name) {
  for (const auto& c : benchmark_cases())
    if (c.name == name) return c;
  throw std::invalid_argument("unknown problem '" + name + "'");
}

int level_cap(int dim) { return dim == 2 ? 8 : 4; }

std::string smoother_name(SmootherKind kind) { return kind == SmootherKind::Additive ? "add" : "mult"; }

int threads_from_environment() {
  const char* value = std::getenv("STOKESMG_THREADS");
  if (value == nullptr) return 1;
  const int n = std::atoi(value);
  return n > 0 ? n : 1;
}

namespace {

struct PreparedCase {
  ManufacturedCase manufactured;
  ProblemParams params;
};

PreparedCase prepare(const BenchmarkCase& bench, const ParameterCombo& combo) {
  const CaseDefinition& def = find_case(bench.name);
  ManufacturedCase mc{GeometryMap(def.geometry)};
  if (def.problem == FlowProblem::Oseen && !combo.re) throw std::invalid_argument(bench.name + " needs a Reynolds number");
  ProblemParams params = realize_parameters(def.problem, combo.da, combo.re.value_or(1.0), bench.degree, mc);
  return {mc, params};
}

void check_level(const BenchmarkCase& bench, int level) {
  const GeometryMap geo(find_case(bench.name).geometry);
  if (level < 0) throw std::invalid_argument("level must be non-negative");
  if (!bench.allow_large && level > level_cap(geo.dim()))
    throw std::invalid_argument("level " + std::to_string(level) + " exceeds the default cap of " +
                                std::to_string(level_cap(geo.dim())) + " for " + bench.name);
}

}  // namespace

SaddleSystem assemble_case(const BenchmarkCase& bench, int level, const ParameterCombo& combo) {
  check_level(bench, level);
  const PreparedCase pc = prepare(bench, combo);
  const GeometryMap& geo = pc.manufactured.geometry();
  const CompatibleComplex complex = CompatibleComplex::build(geo.dim(), bench.degree, level);
  const ManufacturedCase& mc = pc.manufactured;
  const ProblemParams& params = pc.params;
  return assemble(complex, geo, params, [&](const SmallVector& xi) { return mc.forcing(params, xi); });
}

RunRow run_single(const BenchmarkCase& bench, int level, const ParameterCombo& combo, SolveResult& result) {
  check_level(bench, level);
  const auto start = std::chrono::steady_clock::now();
  const PreparedCase pc = prepare(bench, combo);
  const GeometryMap& geo = pc.manufactured.geometry();
  const ManufacturedCase& mc = pc.manufactured;
  const ProblemParams& params = pc.params;
  const MultigridHierarchy h = build_hierarchy(geo.dim(), bench.degree, level, geo, params,
                                               [&](const SmallVector& xi) { return mc.forcing(params, xi); });
  result = solve(h, bench.smoother, bench.solve);
  const auto stop = std::chrono::steady_clock::now();

  RunRow row;
  row.case_name = bench.name;
  row.level = level;
  row.dofs = h.system().n_velocity + h.system().n_pressure;
  row.da = combo.da;
  row.re = combo.re;
  row.smoother = smoother_name(bench.smoother.kind);
  row.cycles = result.cycles;
  row.converged = result.converged;
  row.final_rel_residual = result.residual_history.back() / result.residual_history.front();
  row.max_div = result.max_div;
  row.seconds = std::chrono::duration<double>(stop - start).count();
  return row;
}

RunRow run_single(const BenchmarkCase& bench, int level, const ParameterCombo& combo) {
  SolveResult result;
  return run_single(bench, level, combo, result);
}

RunRecord run_case(const BenchmarkCase& bench) {
  RunRecord record;
  record.config = bench;
  for (int level = bench.level_min; level <= bench.level_max; ++level)
    for (const auto& combo : bench.combos) record.rows.push_back(run_single(bench, level, combo));
  return record;
}

namespace {

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string short_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string combo_label(const ParameterCombo& c) {
  std::string label = "Da=" + short_number(c.da);
  if (c.re) label = "Re=" + short_number(*c.re) + "," + label;
  return label;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void emit_table(const RunRecord& record, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::Csv) {
    out << "case,level,dofs,da,re,smoother,cycles,final_rel_residual,max_div,seconds\n";
    for (const auto& r : record.rows) {
      out << r.case_name << ',' << r.level << ',' << r.dofs << ',' << number(r.da) << ','
          << (r.re ? number(*r.re) : std::string()) << ',' << r.smoother << ','
          << (r.converged ? std::to_string(r.cycles) : std::string("DNC")) << ',' << number(r.final_rel_residual)
          << ',' << number(r.max_div) << ',' << number(r.seconds) << '\n';
    }
    return;
  }

  const auto& combos = record.config.combos;
  std::vector<std::string> header{"level", "DOFs"};
  for (const auto& c : combos) header.push_back(combo_label(c));
  std::vector<std::vector<std::string>> cells;
  const std::size_t per_level = combos.empty() ? 1 : combos.size();
  for (std::size_t i = 0; i < record.rows.size(); i += per_level) {
    std::vector<std::string> line{std::to_string(record.rows[i].level), std::to_string(record.rows[i].dofs)};
    for (std::size_t k = 0; k < per_level && i + k < record.rows.size(); ++k) {
      const RunRow& r = record.rows[i + k];
      line.push_back(r.converged ? std::to_string(r.cycles) : std::string("—"));
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t k = 0; k < header.size(); ++k) width[k] = header[k].size();
  for (const auto& line : cells)
    for (std::size_t k = 0; k < line.size(); ++k) width[k] = std::max(width[k], line[k] == "—" ? 1 : line[k].size());
  out << record.config.name << "  p=" << record.config.degree << "  " << smoother_name(record.config.smoother.kind)
      << "  V(" << record.config.smoother.nu1 << ',' << record.config.smoother.nu2 << ")\n";
  for (std::size_t k = 0; k < header.size(); ++k)
    out << (k ? "  " : "") << std::setw(static_cast<int>(width[k])) << header[k];
  out << '\n';
  for (const auto& line : cells) {
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (k) out << "  ";
      const std::size_t shown = line[k] == "—" ? 1 : line[k].size();
      out << std::string(width[k] - shown, ' ') << line[k];
    }
    out << '\n';
  }
}

std::vector<RunRow> parse_csv(std::istream& in) {
  std::vector<RunRow> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw std::invalid_argument("parse_csv: expected 10 fields in '" + line + "'");
    RunRow r;
    r.case_name = f[0];
    r.level = std::stoi(f[1]);
    r.dofs = std::stoll(f[2]);
    r.da = std::stod(f[3]);
    if (!f[4].empty()) r.re = std::stod(f[4]);
    r.smoother = f[5];
    r.converged = f[6] != "DNC";
    r.cycles = r.converged ? std::stoi(f[6]) : 0;
    r.final_rel_residual = std::stod(f[7]);
    r.max_div = std::stod(f[8]);
    r.seconds = std::stod(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace stokesmg
