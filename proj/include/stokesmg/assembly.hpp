#pragma once

#include "stokesmg/complex.hpp"
#include "stokesmg/geometry.hpp"
#include "stokesmg/problem.hpp"

#include <span>
#include <string>

namespace stokesmg {

/// Mixed Galerkin system over (free velocity, pressure, multiplier):
///
///   K = [ A   -B   0 ]      F = [ f ]
///       [ B^T  0   m ]          [ 0 ]
///       [ 0   m^T  0 ]          [ 0 ]
///
/// where m holds the pressure basis integrals (zero-mean constraint).
struct SaddleSystem {
  Index n_velocity = 0;
  Index n_pressure = 0;
  SparseMatrix A;
  SparseMatrix B;
  Eigen::VectorXd f;
  Eigen::VectorXd m;
  SparseMatrix K;
  Eigen::VectorXd F;

  Index size() const { return n_velocity + n_pressure + 1; }
  Index pressure_offset() const { return n_velocity; }
  Index multiplier_index() const { return n_velocity + n_pressure; }
};

SparseMatrix augmented_operator(const SparseMatrix& A, const SparseMatrix& B, const Eigen::VectorXd& m);

/// Assembles sigma mass + nu stiffness (+ advection) with symmetric Nitsche
/// no-slip terms on every boundary face, the divergence coupling B and the
/// load vector of `forcing` (zero when empty). Gauss-Legendre with p+1
/// points per direction.
SaddleSystem assemble(const CompatibleComplex& complex, const GeometryMap& geo, const ProblemParams& params,
                      const ParametricField& forcing = {});

/// Wall-normal thickness of the boundary element `element` (multi-index)
/// touching face xi_direction = side.
double nitsche_h(const GeometryMap& geo, const CompatibleComplex& complex, int direction, int side,
                 std::span<const Index> element);

/// Pressure mass matrix M(k,l) = integral of q_k q_l over the physical domain.
SparseMatrix pressure_mass_matrix(const CompatibleComplex& complex, const GeometryMap& geo);

/// r = F - K U.
Eigen::VectorXd residual(const SaddleSystem& system, const Eigen::VectorXd& U);
double residual_norm(const SaddleSystem& system, const Eigen::VectorXd& U);

/// Sparse LU solution of K U = F.
Eigen::VectorXd direct_solve(const SaddleSystem& system);

/// L2 norm over the physical domain of u_h - u, where u_h has free velocity
/// coefficients `velocity` and `exact` returns u at F(xi).
double velocity_l2_error(const CompatibleComplex& complex, const GeometryMap& geo, const Eigen::VectorXd& velocity,
                         const ParametricField& exact);

/// Writes <prefix>_K.mtx and <prefix>_F.mtx in Matrix Market format.
void write_matrix_market(const SaddleSystem& system, const std::string& prefix);

}  // namespace stokesmg
