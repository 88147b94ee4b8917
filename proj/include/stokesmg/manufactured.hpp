#pragma once

#include "stokesmg/problem.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace stokesmg {

/// Closed-form reference fields on the unit square (2D) and unit cube (3D).
/// Mapped domains use their push-forwards.
enum class ReferenceSolution { Square, Cube };

namespace reference {

// 2D: psi = e^x x^2 (x-1)^2 y^2 (y-1)^2, u = (d_y psi, -d_x psi).
// 3D: psi = (a(x) B(y) B(z), 0, B(x) B(y) a(z)), u = curl psi, with
// a(t) = t (t-1) and B(t) = t^2 (t-1)^2.

template <class T>
T bubble(const T& t) {
  return t * t * (t - 1.0) * (t - 1.0);
}
template <class T>
T bubble_slope(const T& t) {
  return 2.0 * t * (t - 1.0) * (2.0 * t - 1.0);
}
template <class T>
T quadratic(const T& t) {
  return t * (t - 1.0);
}

template <class T>
std::array<T, 3> velocity(ReferenceSolution s, const std::array<T, 3>& xi) {
  using std::exp;
  const T& x = xi[0];
  const T& y = xi[1];
  if (s == ReferenceSolution::Square) {
    const T ex = exp(x);
    const T yy = y * y - y;
    const T u1 = 2.0 * ex * (x - 1.0) * (x - 1.0) * x * x * yy * (2.0 * y - 1.0);
    const T u2 = -(ex * (x - 1.0) * x * (x * (x + 3.0) - 2.0) * (y - 1.0) * (y - 1.0) * y * y);
    return {u1, u2, T(0.0)};
  }
  const T& z = xi[2];
  const T u1 = bubble(x) * bubble_slope(y) * quadratic(z);
  const T u2 = quadratic(x) * bubble(y) * bubble_slope(z) - bubble_slope(x) * bubble(y) * quadratic(z);
  const T u3 = -(quadratic(x) * bubble_slope(y) * bubble(z));
  return {u1, u2, u3};
}

template <class T>
T pressure(ReferenceSolution s, const std::array<T, 3>& xi) {
  using std::exp;
  using std::sin;
  const T& x = xi[0];
  const T& y = xi[1];
  if (s == ReferenceSolution::Square) {
    const double e = std::numbers::e;
    const T yy = y * y - y;
    const T inner = 456.0 + x * x * (228.0 - 5.0 * yy) + 2.0 * x * (yy - 228.0) + 2.0 * x * x * x * (yy - 36.0) +
                    x * x * x * x * (12.0 + yy);
    return -424.0 + 156.0 * e + yy * (exp(x) * inner - 456.0);
  }
  const double pi = std::numbers::pi;
  return sin(pi * x) * sin(pi * y) - 4.0 / (pi * pi);
}

/// Streamfunction (component 0, 2D) or vector potential (3D).
template <class T>
std::array<T, 3> potential(ReferenceSolution s, const std::array<T, 3>& xi) {
  using std::exp;
  const T& x = xi[0];
  const T& y = xi[1];
  if (s == ReferenceSolution::Square) return {exp(x) * bubble(x) * bubble(y), T(0.0), T(0.0)};
  const T& z = xi[2];
  return {quadratic(x) * bubble(y) * bubble(z), T(0.0), bubble(x) * bubble(y) * quadratic(z)};
}

}  // namespace reference

/// Physical quantities of a manufactured solution at one point.
struct FieldSample {
  SmallVector x;
  SmallVector u;
  SmallMatrix grad_u;  // (a,b) = d u_a / d x_b
  SmallVector laplacian_u;
  double p = 0.0;
  SmallVector grad_p;
};

/// Manufactured velocity/pressure pair on one of the benchmark geometries:
/// u = J u_ref / det J and p = p_ref / det J composed with F^{-1}, which is
/// divergence-free with zero mean whenever the reference pair is.
class ManufacturedCase {
 public:
  explicit ManufacturedCase(GeometryMap geometry);

  const GeometryMap& geometry() const { return geometry_; }
  ReferenceSolution reference_solution() const { return solution_; }
  int dim() const { return geometry_.dim(); }

  /// Values and derivatives at F(xi).
  FieldSample sample(const SmallVector& xi) const;
  /// Values and derivatives at a physical point.
  FieldSample sample_physical(const SmallVector& x) const { return sample(geometry_.inverse(x)); }

  SmallVector velocity(const SmallVector& xi) const;
  double pressure(const SmallVector& xi) const;
  /// Streamfunction (size 1) or vector potential (size 3) at F(xi).
  SmallVector potential(const SmallVector& xi) const;

  /// f = sigma u + (a . grad) u - nu Lap u + grad p at F(xi).
  SmallVector forcing(const ProblemParams& params, const SmallVector& xi) const;
  SmallVector forcing_physical(const ProblemParams& params, const SmallVector& x) const {
    return forcing(params, geometry_.inverse(x));
  }

  /// Maximum of |u| over a uniform parametric sampling grid.
  double max_speed() const;

 private:
  GeometryMap geometry_;
  ReferenceSolution solution_;
};

/// Coefficients realizing the dimensionless numbers with unit length scale:
/// Stokes uses nu = 1, sigma = Da; Oseen uses the manufactured velocity scaled
/// to unit maximum speed as advection, nu = 1/Re and sigma = Da nu.
ProblemParams realize_parameters(FlowProblem kind, double da, double re, int degree, const ManufacturedCase& mc);

}  // namespace stokesmg
