#pragma once

#include "stokesmg/splines.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace stokesmg {

class UnsupportedDegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Discrete Stokes complex of B-spline spaces on the 2^level-per-direction
/// uniform mesh of the unit square (dim 2) or cube (dim 3).
///
///   2D:  Psi --grad^perp--> V --div--> Q
///   3D:  Phi --grad--> Psi --curl--> V --div--> Q
///
/// Velocity component k has full degree p in direction k and degree p-1 in
/// the others; the pressure has degree p-1 everywhere. Coefficient vectors
/// of vector-valued spaces concatenate components, lexicographic within each.
class CompatibleComplex {
 public:
  static CompatibleComplex build(int dim, int degree, int level);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int level() const { return level_; }
  Index elements_per_direction() const { return Index{1} << level_; }

  /// Degree-p and degree-(p-1) univariate spaces shared by all directions.
  const UnivariateSpace& full_space() const { return full_; }
  const UnivariateSpace& reduced_space() const { return reduced_; }

  /// Streamfunction space (2D) or the three vector-potential components (3D).
  const std::vector<TensorSpace>& potential() const { return potential_; }
  const std::optional<TensorSpace>& scalar_potential() const { return scalar_potential_; }
  const std::vector<TensorSpace>& velocity() const { return velocity_; }
  const TensorSpace& pressure() const { return pressure_; }

  Index potential_size() const { return potential_offsets_.back(); }
  Index velocity_size() const { return velocity_offsets_.back(); }
  Index pressure_size() const { return pressure_.size(); }
  Index potential_offset(int component) const { return potential_offsets_[component]; }
  Index velocity_offset(int component) const { return velocity_offsets_[component]; }

  /// Degrees of freedom that survive the boundary conditions: phi = 0,
  /// psi = 0 (2D) or psi x n = 0 (3D), and v . n = 0.
  const std::vector<Index>& free_scalar_potential() const { return free_scalar_potential_; }
  const std::vector<Index>& free_potential() const { return free_potential_; }
  const std::vector<Index>& free_velocity() const { return free_velocity_; }
  /// Position of a velocity coefficient in free_velocity(), or -1 when it is
  /// a normal-trace coefficient fixed to zero.
  Index velocity_free_index(Index full) const { return velocity_free_index_[full]; }
  bool is_normal_trace(Index full_velocity) const { return velocity_free_index_[full_velocity] < 0; }

  /// Exact coefficient-level differential operators between full spaces.
  const SparseMatrix& div() const { return div_; }
  const SparseMatrix& curl() const { return curl_; }
  const SparseMatrix& grad() const { return grad_; }
  /// div restricted to the free velocity coefficients.
  const SparseMatrix& div_free() const { return div_free_; }

  /// Integrals of the pressure basis functions over the parametric domain
  /// (equal to the physical integrals of their push-forwards).
  const Eigen::VectorXd& pressure_integrals() const { return pressure_integrals_; }

  /// Velocity DOF count after the strong no-penetration condition.
  Index free_velocity_size() const { return static_cast<Index>(free_velocity_.size()); }

  Eigen::VectorXd restrict_velocity(const Eigen::VectorXd& full) const;
  Eigen::VectorXd expand_velocity(const Eigen::VectorXd& free) const;

 private:
  CompatibleComplex(int dim, int degree, int level, UnivariateSpace full, UnivariateSpace reduced);

  int dim_;
  int degree_;
  int level_;
  UnivariateSpace full_;
  UnivariateSpace reduced_;
  std::optional<TensorSpace> scalar_potential_;
  std::vector<TensorSpace> potential_;
  std::vector<TensorSpace> velocity_;
  TensorSpace pressure_;
  std::vector<Index> potential_offsets_;
  std::vector<Index> velocity_offsets_;
  std::vector<Index> free_scalar_potential_;
  std::vector<Index> free_potential_;
  std::vector<Index> free_velocity_;
  std::vector<Index> velocity_free_index_;
  SparseMatrix div_;
  SparseMatrix curl_;
  SparseMatrix grad_;
  SparseMatrix div_free_;
  Eigen::VectorXd pressure_integrals_;
};

/// One-dimensional derivative operator from the degree-p space onto the
/// degree-(p-1) space on the same knots.
SparseMatrix derivative_matrix(const UnivariateSpace& space);

inline const SparseMatrix& div_matrix(const CompatibleComplex& c) { return c.div(); }
/// grad^perp (2D) or curl (3D).
inline const SparseMatrix& curl_matrix(const CompatibleComplex& c) { return c.curl(); }
inline const SparseMatrix& perp_grad_matrix(const CompatibleComplex& c) { return c.curl(); }
/// 3D only; empty in 2D.
inline const SparseMatrix& grad_matrix(const CompatibleComplex& c) { return c.grad(); }

/// Full-length velocity coefficients of curl(psi) for a random potential
/// with boundary-free coefficients drawn uniformly from [-1,1].
Eigen::VectorXd random_divfree_velocity(const CompatibleComplex& c, std::uint64_t seed);

}  // namespace stokesmg
