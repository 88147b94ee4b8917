#pragma once

#include "stokesmg/jet.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>

namespace stokesmg {

/// Small dense types: dynamic size bounded by 3, never heap-allocated.
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

enum class GeometryKind { UnitSquare, UnitCube, QuarterAnnulus, HollowCylinder };

/// Jacobian machinery of F at one parametric point.
struct MapDerivatives {
  SmallVector x;                        // F(xi)
  SmallMatrix jacobian;                 // J(a,k) = dF_a / dxi_k
  std::array<SmallMatrix, 3> d_jacobian;  // d_jacobian[m] = dJ / dxi_m
  double det = 0.0;
};

/// Closed-form parametric-to-physical maps F : (0,1)^d -> Omega.
///
/// The quarter annulus uses the rational quadratic Bezier arc with weights
/// {1, sqrt(2)/2, 1} in xi_1 (angle, running from the +y axis to the +x axis
/// so that det J > 0) and is linear in the radius along xi_2. The hollow
/// cylinder extrudes it along xi_3.
class GeometryMap {
 public:
  static constexpr double kInnerRadius = 0.075;
  static constexpr double kOuterRadius = 0.225;
  static constexpr double kDepth = 0.1;

  explicit GeometryMap(GeometryKind kind) : kind_(kind) {}

  GeometryKind kind() const { return kind_; }
  int dim() const { return (kind_ == GeometryKind::UnitSquare || kind_ == GeometryKind::QuarterAnnulus) ? 2 : 3; }
  bool is_affine() const { return kind_ == GeometryKind::UnitSquare || kind_ == GeometryKind::UnitCube; }
  std::string name() const;

  /// F evaluated on any scalar type supporting + - * / with doubles; the
  /// unused third component is zero in 2D.
  template <class T>
  std::array<T, 3> map(const std::array<T, 3>& xi) const {
    switch (kind_) {
      case GeometryKind::UnitSquare:
        return {xi[0], xi[1], T(0.0)};
      case GeometryKind::UnitCube:
        return xi;
      case GeometryKind::QuarterAnnulus:
      case GeometryKind::HollowCylinder: {
        const auto arc = quarter_arc(xi[0]);
        const T r = kInnerRadius + (kOuterRadius - kInnerRadius) * xi[1];
        const T z = (kind_ == GeometryKind::HollowCylinder) ? kDepth * xi[2] : T(0.0);
        return {r * arc[0], r * arc[1], z};
      }
    }
    return xi;
  }

  SmallVector map_point(const SmallVector& xi) const;
  SmallMatrix jacobian(const SmallVector& xi) const;
  MapDerivatives derivatives(const SmallVector& xi) const;
  /// Newton inversion of F; x must lie in the closure of Omega.
  SmallVector inverse(const SmallVector& x) const;

  /// Outward unit normal at a boundary point of the face xi_k = side.
  SmallVector normal(const SmallVector& xi, int direction, int side) const;

 private:
  template <class T>
  static std::array<T, 2> quarter_arc(const T& t) {
    const double w = 0.70710678118654752440;
    const T b0 = (1.0 - t) * (1.0 - t);
    const T b1 = 2.0 * t * (1.0 - t);
    const T b2 = t * t;
    const T weight = b0 + w * b1 + b2;
    return {(w * b1 + b2) / weight, (b0 + w * b1) / weight};
  }

  GeometryKind kind_;
};

/// Contravariant Piola push-forward of a velocity value: v = J v_hat / det J.
SmallVector piola_velocity(const GeometryMap& geo, const SmallVector& v_hat, const SmallVector& xi);
/// Pressure push-forward q = q_hat / det J (so det J q o F lies in the
/// parametric pressure space).
double pushforward_pressure(const GeometryMap& geo, double q_hat, const SmallVector& xi);
/// Covariant push-forward of a 3D vector potential: psi = J^{-T} psi_hat.
SmallVector pushforward_vector_potential(const GeometryMap& geo, const SmallVector& psi_hat, const SmallVector& xi);
/// Scalar potentials and 2D streamfunctions compose with F unchanged.
inline double pushforward_scalar_potential(double phi_hat) { return phi_hat; }

}  // namespace stokesmg
