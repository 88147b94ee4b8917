#include "stokesmg/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace stokesmg {

std::string GeometryMap::name() const {
  switch (kind_) {
    case GeometryKind::UnitSquare:
      return "unit-square";
    case GeometryKind::UnitCube:
      return "unit-cube";
    case GeometryKind::QuarterAnnulus:
      return "quarter-annulus";
    case GeometryKind::HollowCylinder:
      return "hollow-cylinder";
  }
  return "unknown";
}

SmallVector GeometryMap::map_point(const SmallVector& xi) const {
  const int d = dim();
  std::array<double, 3> in{0.0, 0.0, 0.0};
  for (int k = 0; k < d; ++k) in[k] = xi[k];
  const auto out = map(in);
  SmallVector x(d);
  for (int k = 0; k < d; ++k) x[k] = out[k];
  return x;
}

MapDerivatives GeometryMap::derivatives(const SmallVector& xi) const {
  const int d = dim();
  MapDerivatives result;
  result.x.resize(d);
  result.jacobian.resize(d, d);
  for (auto& m : result.d_jacobian) m = SmallMatrix::Zero(d, d);

  if (is_affine()) {
    result.x = xi.head(d);
    result.jacobian.setIdentity();
    result.det = 1.0;
    return result;
  }

  std::array<Jet, 3> in{Jet(0.0), Jet(0.0), Jet(0.0)};
  for (int k = 0; k < d; ++k) in[k] = Jet::variable(xi[k], k);
  const auto out = map(in);
  for (int a = 0; a < d; ++a) {
    result.x[a] = out[a].v;
    for (int k = 0; k < d; ++k) {
      result.jacobian(a, k) = out[a].g[k];
      for (int m = 0; m < d; ++m) result.d_jacobian[m](a, k) = out[a].h(k, m);
    }
  }
  result.det = result.jacobian.determinant();
  return result;
}

SmallMatrix GeometryMap::jacobian(const SmallVector& xi) const { return derivatives(xi).jacobian; }

SmallVector GeometryMap::inverse(const SmallVector& x) const {
  const int d = dim();
  if (is_affine()) return x.head(d);
  SmallVector xi = SmallVector::Constant(d, 0.5);
  for (int iter = 0; iter < 100; ++iter) {
    const MapDerivatives md = derivatives(xi);
    const SmallVector step = md.jacobian.lu().solve(md.x - x);
    xi -= step;
    for (int k = 0; k < d; ++k) xi[k] = std::clamp(xi[k], 0.0, 1.0);
    if (step.norm() < 1e-15) break;
  }
  return xi;
}

SmallVector GeometryMap::normal(const SmallVector& xi, int direction, int side) const {
  const MapDerivatives md = derivatives(xi);
  SmallVector n_hat = SmallVector::Zero(dim());
  n_hat[direction] = side == 0 ? -1.0 : 1.0;
  SmallVector n = md.jacobian.transpose().lu().solve(n_hat);
  return n / n.norm();
}

SmallVector piola_velocity(const GeometryMap& geo, const SmallVector& v_hat, const SmallVector& xi) {
  const MapDerivatives md = geo.derivatives(xi);
  if (md.det <= 0.0) throw std::domain_error("piola_velocity: singular or inverted Jacobian");
  return md.jacobian * v_hat / md.det;
}

double pushforward_pressure(const GeometryMap& geo, double q_hat, const SmallVector& xi) {
  const MapDerivatives md = geo.derivatives(xi);
  if (md.det <= 0.0) throw std::domain_error("pushforward_pressure: singular or inverted Jacobian");
  return q_hat / md.det;
}

SmallVector pushforward_vector_potential(const GeometryMap& geo, const SmallVector& psi_hat, const SmallVector& xi) {
  const MapDerivatives md = geo.derivatives(xi);
  if (md.det <= 0.0) throw std::domain_error("pushforward_vector_potential: singular or inverted Jacobian");
  return md.jacobian.transpose().lu().solve(psi_hat);
}

}  // namespace stokesmg
