#include "doctest.h"
#include "support.hpp"

#include "stokesmg/geometry.hpp"
#include "stokesmg/quadrature.hpp"

#include <cmath>

using namespace stokesmg;

namespace {

const GeometryKind kAll[] = {GeometryKind::UnitSquare, GeometryKind::UnitCube, GeometryKind::QuarterAnnulus,
                             GeometryKind::HollowCylinder};

SmallVector point(const std::vector<double>& x) {
  SmallVector v(static_cast<Index>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k) v[static_cast<Index>(k)] = x[k];
  return v;
}

// Polynomial potential with a curl that is divergence-free in parametric space.
std::array<Jet, 3> parametric_potential(const std::array<Jet, 3>& s) {
  const Jet& a = s[0];
  const Jet& b = s[1];
  const Jet& c = s[2];
  return {a * b * c + b * b, a * a * c - c * c * b, a * b * b * b + a * a * c};
}

// Physical divergence of the Piola push-forward of curl(psi_hat) at xi,
// assembled by the chain rule from jets of F and of psi_hat.
double pushed_divergence(const GeometryMap& geo, const SmallVector& xi) {
  const int d = geo.dim();
  std::array<Jet, 3> s;
  for (int k = 0; k < 3; ++k) s[k] = k < d ? Jet::variable(xi[k], k) : Jet(0.0);
  const auto F = geo.map(s);
  const auto psi = parametric_potential(s);

  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Matrix3d dv = Eigen::Matrix3d::Zero();  // (k, m) = d v_hat_k / d xi_m
  if (d == 2) {
    v << psi[0].g[1], -psi[0].g[0], 0.0;
    dv.row(0) = psi[0].h.row(1);
    dv.row(1) = -psi[0].h.row(0);
  } else {
    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      v[k] = psi[j].g[i] - psi[i].g[j];
      dv.row(k) = psi[j].h.row(i) - psi[i].h.row(j);
    }
  }
  const Eigen::MatrixXd J = [&] {
    Eigen::MatrixXd m(d, d);
    for (int a = 0; a < d; ++a)
      for (int k = 0; k < d; ++k) m(a, k) = F[a].g[k];
    return m;
  }();
  const double det = J.determinant();
  const Eigen::MatrixXd Jinv = J.inverse();
  double div = 0.0;
  for (int m = 0; m < d; ++m) {
    Eigen::MatrixXd dJ(d, d);
    for (int a = 0; a < d; ++a)
      for (int k = 0; k < d; ++k) dJ(a, k) = F[a].h(k, m);
    const double ddet = det * (Jinv * dJ).trace();
    for (int a = 0; a < d; ++a) {
      double num = 0.0, dnum = 0.0;
      for (int k = 0; k < d; ++k) {
        num += J(a, k) * v[k];
        dnum += dJ(a, k) * v[k] + J(a, k) * dv(k, m);
      }
      const double dva = dnum / det - num * ddet / (det * det);
      div += dva * Jinv(m, a);
    }
  }
  return div;
}

}  // namespace

TEST_CASE("identity maps") {
  for (auto kind : {GeometryKind::UnitSquare, GeometryKind::UnitCube}) {
    const GeometryMap g(kind);
    for (const auto& x : testing::random_points(g.dim(), 20, 1)) {
      const SmallVector xi = point(x);
      const MapDerivatives md = g.derivatives(xi);
      CHECK((md.x - xi).norm() == 0.0);
      CHECK((md.jacobian - SmallMatrix::Identity(g.dim(), g.dim())).norm() == 0.0);
      CHECK(md.det == 1.0);
      const SmallVector v = point(testing::random_points(g.dim(), 1, 2)[0]);
      CHECK((piola_velocity(g, v, xi) - v).norm() == 0.0);
      CHECK(pushforward_pressure(g, 0.3, xi) == 0.3);
    }
  }
}

TEST_CASE("quarter annulus reproduces circles") {
  const GeometryMap g(GeometryKind::QuarterAnnulus);
  CHECK(std::abs(g.map_point(point({0.0, 0.0})).norm() - 0.075) < 1e-14);
  for (const auto& x : testing::random_points(1, 50, 3)) {
    CHECK(std::abs(g.map_point(point({x[0], 0.0})).norm() - GeometryMap::kInnerRadius) < 1e-14);
    CHECK(std::abs(g.map_point(point({x[0], 1.0})).norm() - GeometryMap::kOuterRadius) < 1e-14);
    const SmallVector p = g.map_point(point({x[0], 0.4}));
    CHECK(p[0] >= 0.0);
    CHECK(p[1] >= 0.0);
  }
  CHECK(std::abs(g.map_point(point({0.0, 0.5}))[0]) < 1e-15);
  CHECK(std::abs(g.map_point(point({1.0, 0.5}))[1]) < 1e-15);
}

TEST_CASE("hollow cylinder extrudes the annulus") {
  const GeometryMap c(GeometryKind::HollowCylinder);
  const GeometryMap a(GeometryKind::QuarterAnnulus);
  for (const auto& x : testing::random_points(3, 50, 4)) {
    const SmallVector p = c.map_point(point(x));
    CHECK(std::abs(p[2] - GeometryMap::kDepth * x[2]) < 1e-15);
    CHECK((p.head(2) - a.map_point(point({x[0], x[1]})).head(2)).norm() < 1e-15);
  }
}

TEST_CASE("Jacobians match finite differences") {
  for (auto kind : kAll) {
    const GeometryMap g(kind);
    const int d = g.dim();
    for (const auto& x : testing::random_points(d, 100, 5, 0.01, 0.99)) {
      const SmallVector xi = point(x);
      const MapDerivatives md = g.derivatives(xi);
      CHECK(md.det > 0.0);
      CHECK(std::abs(md.det - md.jacobian.determinant()) < 1e-14 * std::abs(md.det) + 1e-300);
      const double h = 1e-6;
      for (int k = 0; k < d; ++k) {
        SmallVector xp = xi, xm = xi;
        xp[k] += h;
        xm[k] -= h;
        const SmallVector fd = (g.map_point(xp) - g.map_point(xm)) / (2 * h);
        const SmallMatrix fdJ = (g.jacobian(xp) - g.jacobian(xm)) / (2 * h);
        CHECK((fd - md.jacobian.col(k)).norm() <= 1e-6 * md.jacobian.norm());
        CHECK((fdJ - md.d_jacobian[k]).norm() <= 1e-6 * (1.0 + md.d_jacobian[k].norm()));
      }
    }
  }
}

TEST_CASE("inverse map round trip") {
  for (auto kind : kAll) {
    const GeometryMap g(kind);
    for (const auto& x : testing::random_points(g.dim(), 50, 6)) {
      const SmallVector xi = point(x);
      CHECK((g.inverse(g.map_point(xi)) - xi).norm() < 1e-12);
    }
  }
}

TEST_CASE("outward normals") {
  const GeometryMap g(GeometryKind::QuarterAnnulus);
  for (const auto& x : testing::random_points(1, 20, 7)) {
    const SmallVector inner = point({x[0], 0.0});
    const SmallVector outer = point({x[0], 1.0});
    const SmallVector pi = g.map_point(inner), po = g.map_point(outer);
    CHECK((g.normal(inner, 1, 0) + pi / pi.norm()).norm() < 1e-13);
    CHECK((g.normal(outer, 1, 1) - po / po.norm()).norm() < 1e-13);
    SmallVector left(2), bottom(2);
    left << -1.0, 0.0;
    bottom << 0.0, -1.0;
    CHECK((g.normal(point({0.0, x[0]}), 0, 0) - left).norm() < 1e-13);
    CHECK((g.normal(point({1.0, x[0]}), 0, 1) - bottom).norm() < 1e-13);
  }
  const GeometryMap cube(GeometryKind::UnitCube);
  CHECK(cube.normal(point({0.5, 0.5, 1.0}), 2, 1)[2] == 1.0);
}

TEST_CASE("Piola push-forward preserves zero divergence") {
  for (auto kind : {GeometryKind::QuarterAnnulus, GeometryKind::HollowCylinder, GeometryKind::UnitSquare}) {
    const GeometryMap g(kind);
    for (const auto& x : testing::random_points(g.dim(), 100, 8)) CHECK(std::abs(pushed_divergence(g, point(x))) < 1e-12);
  }
}

TEST_CASE("pressure push-forward keeps zero mean") {
  const GeometryMap g(GeometryKind::QuarterAnnulus);
  const QuadratureRule rule = gauss_legendre(8);
  double integral = 0.0, area = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i)
    for (std::size_t j = 0; j < rule.points.size(); ++j) {
      const SmallVector xi = point({rule.points[i], rule.points[j]});
      const double w = rule.weights[i] * rule.weights[j];
      const double q_hat = (xi[0] - 0.5) * (xi[1] * xi[1] + 1.0);
      const double det = g.derivatives(xi).det;
      integral += w * det * pushforward_pressure(g, q_hat, xi);
      area += w * det;
    }
  CHECK(std::abs(integral) < 1e-15);
  const double exact = std::numbers::pi / 4.0 * (std::pow(GeometryMap::kOuterRadius, 2) - std::pow(GeometryMap::kInnerRadius, 2));
  CHECK(area == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("covariant potential push-forward") {
  const GeometryMap g(GeometryKind::HollowCylinder);
  const SmallVector xi = point({0.3, 0.6, 0.2});
  SmallVector psi(3);
  psi << 1.0, -2.0, 0.5;
  const SmallMatrix J = g.jacobian(xi);
  CHECK((J.transpose() * pushforward_vector_potential(g, psi, xi) - psi).norm() < 1e-14);
}
