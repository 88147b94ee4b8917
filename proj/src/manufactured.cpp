#include "stokesmg/manufactured.hpp"

#include <algorithm>

namespace stokesmg {

namespace {

ReferenceSolution solution_for(const GeometryMap& geo) {
  return geo.dim() == 2 ? ReferenceSolution::Square : ReferenceSolution::Cube;
}

Jet determinant(const std::array<std::array<Jet, 3>, 3>& j, int d) {
  if (d == 2) return j[0][0] * j[1][1] - j[0][1] * j[1][0];
  return j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
         j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
}

}  // namespace

ManufacturedCase::ManufacturedCase(GeometryMap geometry)
    : geometry_(geometry), solution_(solution_for(geometry)) {}

FieldSample ManufacturedCase::sample(const SmallVector& xi) const {
  const int d = dim();
  std::array<Jet, 3> xj{Jet(0.0), Jet(0.0), Jet(0.0)};
  for (int k = 0; k < d; ++k) xj[k] = Jet::variable(xi[k], k);

  const std::array<Jet, 3> u_ref = reference::velocity(solution_, xj);
  std::array<Jet, 3> u = u_ref;
  Jet p = reference::pressure(solution_, xj);

  // Inverse Jacobian and the second derivatives of xi(x):
  // second[k](b,c) = d^2 xi_k / dx_b dx_c.
  SmallMatrix jinv = SmallMatrix::Identity(d, d);
  std::array<SmallMatrix, 3> second;
  for (auto& s : second) s = SmallMatrix::Zero(d, d);

  if (!geometry_.is_affine()) {
    std::array<std::array<Jet, 3>, 3> jac;
    for (int k = 0; k < d; ++k) {
      std::array<Dual<Jet>, 3> in;
      for (int m = 0; m < 3; ++m) in[m] = Dual<Jet>(xj[m], Jet(m == k ? 1.0 : 0.0));
      const auto out = geometry_.map(in);
      for (int a = 0; a < d; ++a) jac[a][k] = out[a].d;
    }
    const Jet det = determinant(jac, d);
    for (int a = 0; a < d; ++a) {
      Jet sum(0.0);
      for (int k = 0; k < d; ++k) sum += jac[a][k] * u_ref[k];
      u[a] = sum / det;
    }
    p = p / det;

    SmallMatrix jv(d, d);
    for (int a = 0; a < d; ++a)
      for (int k = 0; k < d; ++k) jv(a, k) = jac[a][k].v;
    jinv = jv.inverse();
    for (int a = 0; a < d; ++a) {
      SmallMatrix hessian(d, d);
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) hessian(m, n) = jac[a][m].g[n];
      const SmallMatrix projected = jinv.transpose() * hessian * jinv;
      for (int k = 0; k < d; ++k) second[k] -= jinv(k, a) * projected;
    }
  }

  SmallVector trace_second(d);
  for (int k = 0; k < d; ++k) trace_second[k] = second[k].trace();

  const auto gradient = [&](const Jet& s) -> SmallVector {
    return jinv.transpose() * s.g.head(d);
  };
  const auto laplacian = [&](const Jet& s) {
    const SmallMatrix h = s.h.topLeftCorner(d, d);
    return (jinv.transpose() * h * jinv).trace() + s.g.head(d).dot(trace_second);
  };

  FieldSample result;
  result.x = geometry_.map_point(xi);
  result.u.resize(d);
  result.grad_u.resize(d, d);
  result.laplacian_u.resize(d);
  for (int a = 0; a < d; ++a) {
    result.u[a] = u[a].v;
    result.grad_u.row(a) = gradient(u[a]).transpose();
    result.laplacian_u[a] = laplacian(u[a]);
  }
  result.p = p.v;
  result.grad_p = gradient(p);
  return result;
}

SmallVector ManufacturedCase::velocity(const SmallVector& xi) const {
  const int d = dim();
  std::array<double, 3> in{0.0, 0.0, 0.0};
  for (int k = 0; k < d; ++k) in[k] = xi[k];
  const auto u = reference::velocity(solution_, in);
  SmallVector u_ref(d);
  for (int k = 0; k < d; ++k) u_ref[k] = u[k];
  return geometry_.is_affine() ? u_ref : piola_velocity(geometry_, u_ref, xi);
}

double ManufacturedCase::pressure(const SmallVector& xi) const {
  std::array<double, 3> in{0.0, 0.0, 0.0};
  for (int k = 0; k < dim(); ++k) in[k] = xi[k];
  const double p = reference::pressure(solution_, in);
  return geometry_.is_affine() ? p : pushforward_pressure(geometry_, p, xi);
}

SmallVector ManufacturedCase::potential(const SmallVector& xi) const {
  const int d = dim();
  std::array<double, 3> in{0.0, 0.0, 0.0};
  for (int k = 0; k < d; ++k) in[k] = xi[k];
  const auto psi = reference::potential(solution_, in);
  if (d == 2) return SmallVector::Constant(1, pushforward_scalar_potential(psi[0]));
  const SmallVector psi_ref = Eigen::Vector3d(psi[0], psi[1], psi[2]);
  return geometry_.is_affine() ? psi_ref : pushforward_vector_potential(geometry_, psi_ref, xi);
}

SmallVector ManufacturedCase::forcing(const ProblemParams& params, const SmallVector& xi) const {
  const FieldSample s = sample(xi);
  SmallVector f = params.sigma * s.u - params.nu * s.laplacian_u + s.grad_p;
  if (params.advection) f += s.grad_u * params.advection(xi);
  return f;
}

double ManufacturedCase::max_speed() const {
  const int d = dim();
  const int n = d == 2 ? 101 : 26;
  double best = 0.0;
  SmallVector xi(d);
  const int total = d == 2 ? n * n : n * n * n;
  for (int flat = 0; flat < total; ++flat) {
    int rest = flat;
    for (int k = 0; k < d; ++k) {
      xi[k] = static_cast<double>(rest % n) / (n - 1);
      rest /= n;
    }
    best = std::max(best, velocity(xi).norm());
  }
  return best;
}

ProblemParams realize_parameters(FlowProblem kind, double da, double re, int degree, const ManufacturedCase& mc) {
  ProblemParams params;
  params.kind = kind;
  params.penalty = default_penalty(degree);
  if (kind == FlowProblem::Stokes) {
    params.nu = 1.0;
    params.sigma = da;
    return params;
  }
  params.nu = 1.0 / re;
  params.sigma = da * params.nu;
  const double scale = 1.0 / mc.max_speed();
  params.advection = [mc, scale](const SmallVector& xi) -> SmallVector { return scale * mc.velocity(xi); };
  return params;
}

}  // namespace stokesmg
