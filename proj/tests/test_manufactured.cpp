#include "doctest.h"
#include "support.hpp"

#include "stokesmg/manufactured.hpp"
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

SmallVector unit(int d, int b) {
  SmallVector e = SmallVector::Zero(d);
  e[b] = 1.0;
  return e;
}

// Integral of p over the physical domain by tensor Gauss quadrature on a
// parametric grid.
double pressure_integral(const ManufacturedCase& mc) {
  const int d = mc.dim();
  const int cells = d == 2 ? 8 : 4;
  double total = 0.0;
  const int per = d == 2 ? cells * cells : cells * cells * cells;
  for (int c = 0; c < per; ++c) {
    std::array<int, 3> ci{c % cells, (c / cells) % cells, c / (cells * cells)};
    std::array<QuadratureRule, 3> rules;
    for (int k = 0; k < d; ++k) rules[k] = gauss_legendre(8, double(ci[k]) / cells, double(ci[k] + 1) / cells);
    const int nq = d == 2 ? 64 : 512;
    for (int q = 0; q < nq; ++q) {
      std::array<int, 3> qi{q % 8, (q / 8) % 8, q / 64};
      SmallVector xi(d);
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        xi[k] = rules[k].points[qi[k]];
        w *= rules[k].weights[qi[k]];
      }
      total += w * mc.geometry().derivatives(xi).det * mc.pressure(xi);
    }
  }
  return total;
}

}  // namespace

TEST_CASE("square velocity is the perpendicular gradient of the streamfunction") {
  const ManufacturedCase mc(GeometryMap(GeometryKind::UnitSquare));
  CHECK(mc.reference_solution() == ReferenceSolution::Square);
  for (const auto& x : testing::random_points(2, 50, 1)) {
    std::array<Jet, 3> s{Jet::variable(x[0], 0), Jet::variable(x[1], 1), Jet(0.0)};
    const auto b = [](const Jet& t) { return t * t * (t - 1.0) * (t - 1.0); };
    const Jet psi = exp(s[0]) * b(s[0]) * b(s[1]);
    const SmallVector u = mc.velocity(point(x));
    CHECK(std::abs(u[0] - psi.g[1]) < 1e-14);
    CHECK(std::abs(u[1] + psi.g[0]) < 1e-14);
    CHECK(std::abs(mc.potential(point(x))[0] - psi.v) < 1e-15);
  }
  CHECK(mc.pressure(point({0.0, 0.0})) == doctest::Approx(-424.0 + 156.0 * std::numbers::e));
  CHECK(mc.pressure(point({0.7, 1.0})) == doctest::Approx(-424.0 + 156.0 * std::numbers::e));
}

TEST_CASE("cube velocity is the curl of the vector potential") {
  const ManufacturedCase mc(GeometryMap(GeometryKind::UnitCube));
  for (const auto& x : testing::random_points(3, 50, 2)) {
    std::array<Jet, 3> s{Jet::variable(x[0], 0), Jet::variable(x[1], 1), Jet::variable(x[2], 2)};
    const auto psi = reference::potential(ReferenceSolution::Cube, s);
    const SmallVector u = mc.velocity(point(x));
    CHECK(std::abs(u[0] - (psi[2].g[1] - psi[1].g[2])) < 1e-15);
    CHECK(std::abs(u[1] - (psi[0].g[2] - psi[2].g[0])) < 1e-15);
    CHECK(std::abs(u[2] - (psi[1].g[0] - psi[0].g[1])) < 1e-15);
    const double pi = std::numbers::pi;
    CHECK(std::abs(mc.pressure(point(x)) - (std::sin(pi * x[0]) * std::sin(pi * x[1]) - 4.0 / (pi * pi))) < 1e-15);
  }
}

TEST_CASE("derivatives match finite differences") {
  for (auto kind : kAll) {
    const ManufacturedCase mc{GeometryMap(kind)};
    const int d = mc.dim();
    for (const auto& x : testing::random_points(d, 100, 3, 0.05, 0.95)) {
      const FieldSample s = mc.sample(point(x));
      const double scale = mc.geometry().is_affine() ? 1.0 : 0.15;
      const double h1 = 1e-6 * scale, h2 = 1e-4 * scale;
      SmallMatrix fd_grad(d, d);
      SmallVector fd_gp(d), fd_lap = SmallVector::Zero(d);
      for (int b = 0; b < d; ++b) {
        const FieldSample p1 = mc.sample_physical(s.x + h1 * unit(d, b));
        const FieldSample m1 = mc.sample_physical(s.x - h1 * unit(d, b));
        fd_grad.col(b) = (p1.u - m1.u) / (2 * h1);
        fd_gp[b] = (p1.p - m1.p) / (2 * h1);
        const FieldSample p2 = mc.sample_physical(s.x + h2 * unit(d, b));
        const FieldSample m2 = mc.sample_physical(s.x - h2 * unit(d, b));
        fd_lap += (p2.u - 2.0 * s.u + m2.u) / (h2 * h2);
      }
      CHECK((fd_grad - s.grad_u).norm() <= 1e-5 * (s.grad_u.norm() + 1e-3));
      CHECK((fd_gp - s.grad_p).norm() <= 1e-5 * (s.grad_p.norm() + 1e-3));
      CHECK((fd_lap - s.laplacian_u).norm() <= 1e-5 * (s.laplacian_u.norm() + 1e-1));
      CHECK((mc.velocity(point(x)) - s.u).norm() <= 1e-15 * (1.0 + s.u.norm()));
      CHECK(std::abs(mc.pressure(point(x)) - s.p) <= 1e-14 * (1.0 + std::abs(s.p)));
      CHECK(std::abs(s.grad_u.trace()) < 1e-12 * (1.0 + s.grad_u.norm()));
    }
  }
}

TEST_CASE("pressure has zero mean on every geometry") {
  for (auto kind : kAll) CHECK(std::abs(pressure_integral(ManufacturedCase{GeometryMap(kind)})) < 1e-10);
}

TEST_CASE("forcing structure") {
  for (auto kind : kAll) {
    const ManufacturedCase mc{GeometryMap(kind)};
    ProblemParams params;
    params.sigma = 0.0;
    params.nu = 0.0;
    for (const auto& x : testing::random_points(mc.dim(), 20, 4)) {
      const FieldSample s = mc.sample(point(x));
      CHECK((mc.forcing(params, point(x)) - s.grad_p).norm() <= 1e-14 * (1.0 + s.grad_p.norm()));
      ProblemParams oseen = realize_parameters(FlowProblem::Oseen, 7.0, 3.0, 2, mc);
      const SmallVector a = oseen.advection(point(x));
      const SmallVector expected = oseen.sigma * s.u - oseen.nu * s.laplacian_u + s.grad_u * a + s.grad_p;
      CHECK((mc.forcing(oseen, point(x)) - expected).norm() <= 1e-13 * (1.0 + expected.norm()));
      CHECK((mc.forcing_physical(oseen, s.x) - expected).norm() <= 1e-9 * (1.0 + expected.norm()));
    }
  }
}

TEST_CASE("cube Laplacian of the velocity is divergence-free") {
  using D = Dual<Jet>;
  for (const auto& x : testing::random_points(3, 100, 5)) {
    double div_lap = 0.0;
    for (int a = 0; a < 3; ++a) {
      std::array<D, 3> in;
      for (int m = 0; m < 3; ++m) in[m] = D(Jet::variable(x[m], m), Jet(m == a ? 1.0 : 0.0));
      const auto u = reference::velocity(ReferenceSolution::Cube, in);
      div_lap += u[a].d.h.trace();
    }
    CHECK(std::abs(div_lap) < 1e-8);
  }
}

TEST_CASE("parameter realization") {
  const ManufacturedCase mc(GeometryMap(GeometryKind::UnitSquare));
  const ProblemParams stokes = realize_parameters(FlowProblem::Stokes, 1000.0, 5.0, 3, mc);
  CHECK(stokes.nu == 1.0);
  CHECK(stokes.sigma == 1000.0);
  CHECK(stokes.penalty == 8.0);
  CHECK(!stokes.advection);
  const ProblemParams oseen = realize_parameters(FlowProblem::Oseen, 1000.0, 100.0, 2, mc);
  CHECK(oseen.nu == doctest::Approx(0.01));
  CHECK(oseen.sigma == doctest::Approx(10.0));
  CHECK(oseen.penalty == 4.0);
  double best = 0.0;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) best = std::max(best, oseen.advection(point({i / 100.0, j / 100.0})).norm());
  CHECK(best == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mc.max_speed() > 0.0);
}
