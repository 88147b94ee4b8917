#pragma once

#include "stokesmg/sparse.hpp"

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace stokesmg {

/// Open knot vector on [0,1]: the first and last knots are repeated
/// degree+1 times. Knots produced by refinement are dyadic rationals, so
/// knot comparisons in this module use exact equality.
class KnotVector {
 public:
  KnotVector(int degree, std::vector<double> knots);

  /// Uniform open knot vector with `elements` spans and C^{degree-1}
  /// continuity at every interior knot.
  static KnotVector uniform(int degree, int elements);

  int degree() const { return degree_; }
  std::span<const double> knots() const { return knots_; }
  double operator[](Index i) const { return knots_[static_cast<std::size_t>(i)]; }
  Index size() const { return static_cast<Index>(knots_.size()); }
  /// Number of basis functions n = |knots| - degree - 1.
  Index num_basis() const { return size() - degree_ - 1; }

  std::vector<double> unique_knots() const;
  /// Continuity order at each unique knot; -1 at the two end knots.
  std::vector<int> regularity() const;
  /// Number of non-empty knot spans.
  Index num_elements() const;

  /// Span index s with knots[s] <= xi < knots[s+1]; xi == 1 is assigned to
  /// the last non-empty span.
  Index find_span(double xi) const;

  /// Knot vector of the derivative space: first and last knot removed and
  /// degree lowered by one.
  KnotVector lowered() const;

  friend bool operator==(const KnotVector&, const KnotVector&) = default;

 private:
  int degree_;
  std::vector<double> knots_;
};

/// Values and derivatives of the degree+1 basis functions that are nonzero
/// on one span: row k holds the k-th derivative, column j belongs to basis
/// function first + j.
struct LocalBasis {
  Index first = 0;
  Eigen::MatrixXd ders;
};

class UnivariateSpace {
 public:
  explicit UnivariateSpace(KnotVector knots);

  const KnotVector& knot_vector() const { return knots_; }
  int degree() const { return knots_.degree(); }
  Index size() const { return knots_.num_basis(); }

  /// Parametric support [knots[i], knots[i+p+1]] of basis function i.
  std::pair<double, double> support(Index i) const;

  double eval(Index i, double xi) const;
  double eval_derivative(Index i, double xi, int order) const;

  /// All nonzero functions on a given span with derivatives up to n_ders.
  LocalBasis eval_on_span(Index span, double xi, int n_ders) const;
  LocalBasis eval_nonzero(double xi, int n_ders) const;

  friend bool operator==(const UnivariateSpace&, const UnivariateSpace&) = default;

 private:
  KnotVector knots_;
};

/// Inserts the midpoint of every non-empty span once.
UnivariateSpace uniform_dyadic_refine(const UnivariateSpace& space);

/// Coarse-to-fine knot insertion operator: N_coarse_i = sum_j T(i,j) N_fine_j.
struct TransferMatrix {
  SparseMatrix T;  // n_coarse x n_fine
};

/// Builds T by composing single-knot (Boehm) insertions. Throws
/// std::invalid_argument when the knot vectors are not nested.
TransferMatrix knot_insertion_matrix(const UnivariateSpace& coarse, const UnivariateSpace& fine);

/// Tensor product of per-direction transfers (first direction fastest).
TransferMatrix tensor_transfer(const std::vector<TransferMatrix>& per_direction);

/// Tensor-product B-spline space in 2 or 3 parametric dimensions. Flat
/// indices are lexicographic with the first direction varying fastest.
class TensorSpace {
 public:
  explicit TensorSpace(std::vector<UnivariateSpace> factors);

  int dim() const { return static_cast<int>(factors_.size()); }
  const UnivariateSpace& factor(int k) const { return factors_[static_cast<std::size_t>(k)]; }
  const std::vector<UnivariateSpace>& factors() const { return factors_; }
  Index size() const { return size_; }
  Index extent(int k) const { return factor(k).size(); }

  Index flat(std::span<const Index> multi) const;
  std::vector<Index> multi(Index flat) const;

  double eval(Index flat, std::span<const double> xi) const;
  Eigen::VectorXd gradient(Index flat, std::span<const double> xi) const;

 private:
  std::vector<UnivariateSpace> factors_;
  Index size_;
};

}  // namespace stokesmg
