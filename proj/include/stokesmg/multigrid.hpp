#pragma once

#include "stokesmg/assembly.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace stokesmg {

enum class SmootherKind { Multiplicative, Additive };

struct SmootherConfig {
  SmootherKind kind = SmootherKind::Multiplicative;
  double eta = 0.5;  // additive scaling
  int nu1 = 1;
  int nu2 = 2;
  int threads = 1;  // additive local solves only
};

/// Local problem on the support of one free potential basis function: the
/// velocity coefficients in the image of its curl, the pressure coefficients
/// touched by their divergence, and a dense LU of the extracted block
/// bordered by a local zero-mean constraint.
struct SchwarzSubdomain {
  Index generator = 0;  // index into the potential space
  std::vector<Index> velocity;
  std::vector<Index> pressure;
  std::vector<Index> dofs;  // velocity then pressure, in system numbering
  Eigen::PartialPivLU<Eigen::MatrixXd> solver;
};

struct MultigridLevel {
  std::shared_ptr<const CompatibleComplex> complex;
  SparseMatrix K;
  RowSparseMatrix K_rows;
  /// Prolongation from the next coarser level (empty on level 0).
  SparseMatrix P;
  std::vector<SchwarzSubdomain> subdomains;
};

/// Nested hierarchy from one element (level 0) to the assembled finest
/// system, with Galerkin coarse operators K_l = P^T K_{l+1} P.
class MultigridHierarchy {
 public:
  MultigridHierarchy(const SaddleSystem& finest, int dim, int degree, int finest_level);

  int finest_level() const { return static_cast<int>(levels_.size()) - 1; }
  const MultigridLevel& level(int l) const { return levels_[static_cast<std::size_t>(l)]; }
  const SaddleSystem& system() const { return system_; }
  const Eigen::PartialPivLU<Eigen::MatrixXd>& coarse_solver() const { return coarse_; }

 private:
  SaddleSystem system_;
  std::vector<MultigridLevel> levels_;
  Eigen::PartialPivLU<Eigen::MatrixXd> coarse_;
};

MultigridHierarchy build_hierarchy(int dim, int degree, int finest_level, const GeometryMap& geo,
                                   const ProblemParams& params, const ParametricField& forcing = {});

/// Full prolongation (free velocity, pressure, multiplier) from `coarse` to
/// `fine`, the next dyadic refinement.
SparseMatrix prolongation(const CompatibleComplex& coarse, const CompatibleComplex& fine);

/// Subdomains of one level in lexicographic order of their generators; the
/// local matrices are taken from K.
std::vector<SchwarzSubdomain> enumerate_subdomains(const CompatibleComplex& complex, const SparseMatrix& K);

/// True when every mesh element lies in the support of some generator.
bool subdomains_cover(const CompatibleComplex& complex, const std::vector<SchwarzSubdomain>& subdomains);

/// Called after every smoothing step with the level and its iterate.
using SmoothObserver = std::function<void(int level, const Eigen::VectorXd& U)>;

void smooth(const MultigridHierarchy& h, int level, Eigen::VectorXd& U, const Eigen::VectorXd& F,
            const SmootherConfig& config);

void v_cycle(const MultigridHierarchy& h, Eigen::VectorXd& U, const Eigen::VectorXd& F, const SmootherConfig& config,
             const SmoothObserver& observer = {});

/// Random divergence-free velocity plus random zero-mean pressure, zero
/// multiplier.
Eigen::VectorXd initial_guess(const CompatibleComplex& complex, std::uint64_t seed);

/// max |div u| over the pressure coefficients of div_matrix * u.
double max_divergence(const CompatibleComplex& complex, const Eigen::VectorXd& U);

struct SolveOptions {
  double tol = 1e-6;
  int max_cycles = 200;
  std::uint64_t seed = 0;
};

struct SolveResult {
  Eigen::VectorXd U;
  int cycles = 0;
  bool converged = false;
  std::vector<double> residual_history;  // entry 0 is the initial residual
  std::vector<double> divergence_history;
  double max_div = 0.0;
  double max_velocity = 0.0;
};

SolveResult solve(const MultigridHierarchy& h, const SmootherConfig& config, const SolveOptions& options,
                  const SmoothObserver& observer = {});

}  // namespace stokesmg
