#include "stokesmg/assembly.hpp"

#include "stokesmg/quadrature.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/SparseExtra>

#include <array>
#include <cmath>
#include <stdexcept>

namespace stokesmg {

namespace {

// Univariate basis data at the quadrature points of every element. All
// directions share the same spaces and mesh, so one table serves them all.
struct BasisTables {
  int n_points = 0;
  std::vector<double> points;
  std::vector<double> weights;
  std::vector<LocalBasis> full;
  std::vector<LocalBasis> reduced;
  std::array<LocalBasis, 2> full_face;
  std::array<LocalBasis, 2> reduced_face;
};

BasisTables make_tables(const CompatibleComplex& c) {
  const int p = c.degree();
  const Index ne = c.elements_per_direction();
  const std::vector<double> breaks = c.full_space().knot_vector().unique_knots();
  const QuadratureRule rule = gauss_legendre(p + 1);

  BasisTables t;
  t.n_points = p + 1;
  for (Index e = 0; e < ne; ++e) {
    const double a = breaks[static_cast<std::size_t>(e)];
    const double len = breaks[static_cast<std::size_t>(e + 1)] - a;
    for (int q = 0; q < t.n_points; ++q) {
      const double x = a + len * rule.points[static_cast<std::size_t>(q)];
      t.points.push_back(x);
      t.weights.push_back(len * rule.weights[static_cast<std::size_t>(q)]);
      t.full.push_back(c.full_space().eval_on_span(p + e, x, 1));
      t.reduced.push_back(c.reduced_space().eval_on_span(p - 1 + e, x, 1));
    }
  }
  t.full_face[0] = c.full_space().eval_on_span(p, 0.0, 1);
  t.full_face[1] = c.full_space().eval_on_span(p + ne - 1, 1.0, 1);
  t.reduced_face[0] = c.reduced_space().eval_on_span(p - 1, 0.0, 1);
  t.reduced_face[1] = c.reduced_space().eval_on_span(p - 1 + ne - 1, 1.0, 1);
  return t;
}

// Local index pattern of one element: velocity function i belongs to
// component comp[i] with per-direction offsets j[i] from the element corner.
struct LocalPattern {
  std::vector<int> comp;
  std::vector<std::array<int, 3>> j;
  std::vector<std::array<int, 3>> pj;
};

LocalPattern make_pattern(int d, int p) {
  LocalPattern pat;
  for (int c = 0; c < d; ++c) {
    std::array<int, 3> cnt{1, 1, 1};
    for (int k = 0; k < d; ++k) cnt[k] = (k == c) ? p + 1 : p;
    for (int j2 = 0; j2 < cnt[2]; ++j2)
      for (int j1 = 0; j1 < cnt[1]; ++j1)
        for (int j0 = 0; j0 < cnt[0]; ++j0) {
          pat.comp.push_back(c);
          pat.j.push_back({j0, j1, j2});
        }
  }
  const int pz = d == 3 ? p : 1;
  for (int j2 = 0; j2 < pz; ++j2)
    for (int j1 = 0; j1 < p; ++j1)
      for (int j0 = 0; j0 < p; ++j0) pat.pj.push_back({j0, j1, j2});
  return pat;
}

// Per-direction basis tables at one point.
struct PointBasis {
  std::array<const LocalBasis*, 3> full{};
  std::array<const LocalBasis*, 3> reduced{};
};

// Physical velocity values V (n x d), gradients G (n x d*d, row-major per
// function) and parametric divergences of the local velocity functions.
void eval_velocity(const LocalPattern& pat, const PointBasis& pb, int d, const MapDerivatives& md,
                   const SmallMatrix& jinv, Eigen::MatrixXd& V, Eigen::MatrixXd& G, Eigen::VectorXd& div_hat) {
  const auto n = static_cast<Index>(pat.comp.size());
  V.setZero(n, d);
  G.setZero(n, d * d);
  div_hat.resize(n);
  std::array<double, 3> ddet{0.0, 0.0, 0.0};
  for (int m = 0; m < d; ++m) ddet[m] = md.det * (jinv * md.d_jacobian[m]).trace();
  const double inv_det = 1.0 / md.det;

  for (Index i = 0; i < n; ++i) {
    const int c = pat.comp[static_cast<std::size_t>(i)];
    const auto& j = pat.j[static_cast<std::size_t>(i)];
    std::array<double, 3> val{1.0, 1.0, 1.0};
    std::array<double, 3> der{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) {
      const LocalBasis& b = (k == c) ? *pb.full[k] : *pb.reduced[k];
      val[k] = b.ders(0, j[k]);
      der[k] = b.ders(1, j[k]);
    }
    const double N = val[0] * val[1] * val[2];
    std::array<double, 3> dN{0.0, 0.0, 0.0};
    for (int m = 0; m < d; ++m) {
      double prod = der[m];
      for (int k = 0; k < d; ++k)
        if (k != m) prod *= val[k];
      dN[m] = prod;
    }
    div_hat[i] = dN[c];

    SmallMatrix dv(d, d);  // dv(a,m) = d v_a / d xi_m
    for (int a = 0; a < d; ++a) {
      const double jac = md.jacobian(a, c);
      V(i, a) = jac * N * inv_det;
      for (int m = 0; m < d; ++m)
        dv(a, m) = (jac * dN[m] + N * md.d_jacobian[m](a, c)) * inv_det - N * jac * ddet[m] * inv_det * inv_det;
    }
    const SmallMatrix grad = dv * jinv;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) G(i, a * d + b) = grad(a, b);
  }
}

void eval_pressure(const LocalPattern& pat, const PointBasis& pb, int d, Eigen::VectorXd& Q) {
  const auto n = static_cast<Index>(pat.pj.size());
  Q.resize(n);
  for (Index i = 0; i < n; ++i) {
    double v = 1.0;
    for (int k = 0; k < d; ++k) v *= pb.reduced[k]->ders(0, pat.pj[static_cast<std::size_t>(i)][k]);
    Q[i] = v;
  }
}

struct ElementIndexer {
  const CompatibleComplex& c;
  int d;
  Index ne;

  std::vector<Index> multi(Index flat) const {
    std::vector<Index> e(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      e[static_cast<std::size_t>(k)] = flat % ne;
      flat /= ne;
    }
    return e;
  }

  Index n_elements() const {
    Index n = 1;
    for (int k = 0; k < d; ++k) n *= ne;
    return n;
  }

  // Free-velocity index of each local velocity function (-1 if constrained).
  void velocity_globals(const LocalPattern& pat, const std::vector<Index>& e, std::vector<Index>& out) const {
    out.resize(pat.comp.size());
    for (std::size_t i = 0; i < pat.comp.size(); ++i) {
      const int comp = pat.comp[i];
      const TensorSpace& s = c.velocity()[static_cast<std::size_t>(comp)];
      Index flat = 0;
      Index stride = 1;
      for (int k = 0; k < d; ++k) {
        flat += (e[static_cast<std::size_t>(k)] + pat.j[i][k]) * stride;
        stride *= s.extent(k);
      }
      out[i] = c.velocity_free_index(c.velocity_offset(comp) + flat);
    }
  }

  void pressure_globals(const LocalPattern& pat, const std::vector<Index>& e, std::vector<Index>& out) const {
    out.resize(pat.pj.size());
    const TensorSpace& s = c.pressure();
    for (std::size_t i = 0; i < pat.pj.size(); ++i) {
      Index flat = 0;
      Index stride = 1;
      for (int k = 0; k < d; ++k) {
        flat += (e[static_cast<std::size_t>(k)] + pat.pj[i][k]) * stride;
        stride *= s.extent(k);
      }
      out[i] = flat;
    }
  }
};

}  // namespace

SparseMatrix augmented_operator(const SparseMatrix& A, const SparseMatrix& B, const Eigen::VectorXd& m) {
  const Index nv = A.rows();
  const Index nq = B.cols();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(A.nonZeros() + 2 * B.nonZeros() + 2 * nq));
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
      t.emplace_back(it.row(), static_cast<int>(nv + it.col()), -it.value());
      t.emplace_back(static_cast<int>(nv + it.col()), it.row(), it.value());
    }
  const auto lam = static_cast<int>(nv + nq);
  for (Index j = 0; j < nq; ++j) {
    t.emplace_back(static_cast<int>(nv + j), lam, m[j]);
    t.emplace_back(lam, static_cast<int>(nv + j), m[j]);
  }
  SparseMatrix K(nv + nq + 1, nv + nq + 1);
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

double nitsche_h(const GeometryMap& geo, const CompatibleComplex& complex, int direction, int side,
                 std::span<const Index> element) {
  const int d = geo.dim();
  const Index ne = complex.elements_per_direction();
  const Index e = element[static_cast<std::size_t>(direction)];
  if ((side == 0 && e != 0) || (side == 1 && e != ne - 1))
    throw std::invalid_argument("nitsche_h: element does not touch the requested face");
  const std::vector<double> breaks = complex.full_space().knot_vector().unique_knots();
  SmallVector face(d);
  for (int k = 0; k < d; ++k) {
    const auto ek = static_cast<std::size_t>(element[static_cast<std::size_t>(k)]);
    face[k] = 0.5 * (breaks[ek] + breaks[ek + 1]);
  }
  SmallVector opposite = face;
  face[direction] = side == 0 ? 0.0 : 1.0;
  opposite[direction] = side == 0 ? breaks[static_cast<std::size_t>(e + 1)] : breaks[static_cast<std::size_t>(e)];
  const SmallVector n = geo.normal(face, direction, side);
  return std::abs((geo.map_point(opposite) - geo.map_point(face)).dot(n));
}

SaddleSystem assemble(const CompatibleComplex& complex, const GeometryMap& geo, const ProblemParams& params,
                      const ParametricField& forcing) {
  const int d = complex.dim();
  if (geo.dim() != d) throw std::invalid_argument("assemble: geometry and complex dimensions differ");
  const int p = complex.degree();
  const BasisTables tab = make_tables(complex);
  const LocalPattern pat = make_pattern(d, p);
  const ElementIndexer idx{complex, d, complex.elements_per_direction()};
  const Index ne = idx.ne;
  const int nq = tab.n_points;
  const auto nv_loc = static_cast<Index>(pat.comp.size());
  const auto np_loc = static_cast<Index>(pat.pj.size());
  const bool advect = static_cast<bool>(params.advection);

  SaddleSystem sys;
  sys.n_velocity = complex.free_velocity_size();
  sys.n_pressure = complex.pressure_size();
  sys.f = Eigen::VectorXd::Zero(sys.n_velocity);

  std::vector<Triplet> a_entries;
  std::vector<Triplet> b_entries;
  const Index n_el = idx.n_elements();
  a_entries.reserve(static_cast<std::size_t>(n_el * nv_loc * nv_loc));
  b_entries.reserve(static_cast<std::size_t>(n_el * nv_loc * np_loc));

  Eigen::MatrixXd A_loc(nv_loc, nv_loc);
  Eigen::MatrixXd B_loc(nv_loc, np_loc);
  Eigen::VectorXd f_loc(nv_loc);
  Eigen::MatrixXd V, G, Gn, AdvG;
  Eigen::VectorXd div_hat, Q;
  std::vector<Index> vg, pg;

  int n_qp = 1;
  for (int k = 0; k < d; ++k) n_qp *= nq;
  int n_face_qp = 1;
  for (int k = 0; k + 1 < d; ++k) n_face_qp *= nq;

  for (Index flat = 0; flat < n_el; ++flat) {
    const std::vector<Index> e = idx.multi(flat);
    A_loc.setZero();
    B_loc.setZero();
    f_loc.setZero();

    for (int qflat = 0; qflat < n_qp; ++qflat) {
      PointBasis pb;
      SmallVector xi(d);
      double w = 1.0;
      int rest = qflat;
      for (int k = 0; k < d; ++k) {
        const auto at = static_cast<std::size_t>(e[static_cast<std::size_t>(k)] * nq + rest % nq);
        rest /= nq;
        pb.full[k] = &tab.full[at];
        pb.reduced[k] = &tab.reduced[at];
        xi[k] = tab.points[at];
        w *= tab.weights[at];
      }
      const MapDerivatives md = geo.derivatives(xi);
      const SmallMatrix jinv = md.jacobian.inverse();
      eval_velocity(pat, pb, d, md, jinv, V, G, div_hat);
      eval_pressure(pat, pb, d, Q);

      const double wd = w * md.det;
      A_loc.noalias() += (wd * params.sigma) * V * V.transpose();
      A_loc.noalias() += (wd * params.nu) * G * G.transpose();
      if (advect) {
        const SmallVector a = params.advection(xi);
        AdvG.setZero(nv_loc, d);
        for (int r = 0; r < d; ++r)
          for (int b = 0; b < d; ++b) AdvG.col(r) += G.col(r * d + b) * a[b];
        A_loc.noalias() += wd * V * AdvG.transpose();
      }
      B_loc.noalias() += (w / md.det) * div_hat * Q.transpose();
      if (forcing) {
        const SmallVector fx = forcing(xi);
        f_loc.noalias() += wd * V * Eigen::VectorXd(fx);
      }
    }

    // Nitsche terms on the boundary faces this element touches.
    for (int dir = 0; dir < d; ++dir) {
      for (int side = 0; side < 2; ++side) {
        const Index boundary_e = side == 0 ? 0 : ne - 1;
        if (e[static_cast<std::size_t>(dir)] != boundary_e) continue;
        const double h = nitsche_h(geo, complex, dir, side, e);
        const double penalty = params.penalty / h;
        for (int qflat = 0; qflat < n_face_qp; ++qflat) {
          PointBasis pb;
          SmallVector xi(d);
          double w = 1.0;
          int rest = qflat;
          for (int k = 0; k < d; ++k) {
            if (k == dir) {
              pb.full[k] = &tab.full_face[static_cast<std::size_t>(side)];
              pb.reduced[k] = &tab.reduced_face[static_cast<std::size_t>(side)];
              xi[k] = side;
              continue;
            }
            const auto at = static_cast<std::size_t>(e[static_cast<std::size_t>(k)] * nq + rest % nq);
            rest /= nq;
            pb.full[k] = &tab.full[at];
            pb.reduced[k] = &tab.reduced[at];
            xi[k] = tab.points[at];
            w *= tab.weights[at];
          }
          const MapDerivatives md = geo.derivatives(xi);
          const SmallMatrix jinv = md.jacobian.inverse();
          SmallVector n_hat = SmallVector::Zero(d);
          n_hat[dir] = side == 0 ? -1.0 : 1.0;
          const SmallVector t = jinv.transpose() * n_hat;
          const double dgamma = w * md.det * t.norm();
          const SmallVector n = t / t.norm();
          eval_velocity(pat, pb, d, md, jinv, V, G, div_hat);
          Gn.setZero(nv_loc, d);
          for (int r = 0; r < d; ++r)
            for (int b = 0; b < d; ++b) Gn.col(r) += G.col(r * d + b) * n[b];
          const double s = dgamma * params.nu;
          A_loc.noalias() -= s * V * Gn.transpose();
          A_loc.noalias() -= s * Gn * V.transpose();
          A_loc.noalias() += (s * penalty) * V * V.transpose();
        }
      }
    }

    idx.velocity_globals(pat, e, vg);
    idx.pressure_globals(pat, e, pg);
    for (Index i = 0; i < nv_loc; ++i) {
      const Index gi = vg[static_cast<std::size_t>(i)];
      if (gi < 0) continue;
      sys.f[gi] += f_loc[i];
      for (Index j = 0; j < nv_loc; ++j) {
        const Index gj = vg[static_cast<std::size_t>(j)];
        if (gj >= 0) a_entries.emplace_back(static_cast<int>(gi), static_cast<int>(gj), A_loc(i, j));
      }
      for (Index j = 0; j < np_loc; ++j)
        b_entries.emplace_back(static_cast<int>(gi), static_cast<int>(pg[static_cast<std::size_t>(j)]), B_loc(i, j));
    }
  }

  sys.A.resize(sys.n_velocity, sys.n_velocity);
  sys.A.setFromTriplets(a_entries.begin(), a_entries.end());
  sys.B.resize(sys.n_velocity, sys.n_pressure);
  sys.B.setFromTriplets(b_entries.begin(), b_entries.end());
  sys.m = complex.pressure_integrals();
  sys.K = augmented_operator(sys.A, sys.B, sys.m);
  sys.F = Eigen::VectorXd::Zero(sys.size());
  sys.F.head(sys.n_velocity) = sys.f;
  return sys;
}

SparseMatrix pressure_mass_matrix(const CompatibleComplex& complex, const GeometryMap& geo) {
  const int d = complex.dim();
  const BasisTables tab = make_tables(complex);
  const LocalPattern pat = make_pattern(d, complex.degree());
  const ElementIndexer idx{complex, d, complex.elements_per_direction()};
  const int nq = tab.n_points;
  int n_qp = 1;
  for (int k = 0; k < d; ++k) n_qp *= nq;
  const auto np_loc = static_cast<Index>(pat.pj.size());

  std::vector<Triplet> entries;
  Eigen::VectorXd Q;
  std::vector<Index> pg;
  for (Index flat = 0; flat < idx.n_elements(); ++flat) {
    const std::vector<Index> e = idx.multi(flat);
    Eigen::MatrixXd M_loc = Eigen::MatrixXd::Zero(np_loc, np_loc);
    for (int qflat = 0; qflat < n_qp; ++qflat) {
      PointBasis pb;
      SmallVector xi(d);
      double w = 1.0;
      int rest = qflat;
      for (int k = 0; k < d; ++k) {
        const auto at = static_cast<std::size_t>(e[static_cast<std::size_t>(k)] * nq + rest % nq);
        rest /= nq;
        pb.reduced[k] = &tab.reduced[at];
        xi[k] = tab.points[at];
        w *= tab.weights[at];
      }
      const double det = geo.is_affine() ? 1.0 : geo.derivatives(xi).det;
      eval_pressure(pat, pb, d, Q);
      M_loc.noalias() += (w / det) * Q * Q.transpose();
    }
    idx.pressure_globals(pat, e, pg);
    for (Index i = 0; i < np_loc; ++i)
      for (Index j = 0; j < np_loc; ++j)
        entries.emplace_back(static_cast<int>(pg[static_cast<std::size_t>(i)]),
                             static_cast<int>(pg[static_cast<std::size_t>(j)]), M_loc(i, j));
  }
  SparseMatrix M(complex.pressure_size(), complex.pressure_size());
  M.setFromTriplets(entries.begin(), entries.end());
  return M;
}

Eigen::VectorXd residual(const SaddleSystem& system, const Eigen::VectorXd& U) { return system.F - system.K * U; }

double residual_norm(const SaddleSystem& system, const Eigen::VectorXd& U) { return residual(system, U).norm(); }

Eigen::VectorXd direct_solve(const SaddleSystem& system) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(system.K);
  if (lu.info() != Eigen::Success) throw std::runtime_error("direct_solve: factorization failed");
  return lu.solve(system.F);
}

double velocity_l2_error(const CompatibleComplex& complex, const GeometryMap& geo, const Eigen::VectorXd& velocity,
                         const ParametricField& exact) {
  const int d = complex.dim();
  const BasisTables tab = make_tables(complex);
  const LocalPattern pat = make_pattern(d, complex.degree());
  const ElementIndexer idx{complex, d, complex.elements_per_direction()};
  const int nq = tab.n_points;
  int n_qp = 1;
  for (int k = 0; k < d; ++k) n_qp *= nq;

  Eigen::MatrixXd V, G;
  Eigen::VectorXd div_hat;
  std::vector<Index> vg;
  double sum = 0.0;
  for (Index flat = 0; flat < idx.n_elements(); ++flat) {
    const std::vector<Index> e = idx.multi(flat);
    idx.velocity_globals(pat, e, vg);
    Eigen::VectorXd coeffs(static_cast<Index>(vg.size()));
    for (std::size_t i = 0; i < vg.size(); ++i) coeffs[static_cast<Index>(i)] = vg[i] < 0 ? 0.0 : velocity[vg[i]];
    for (int qflat = 0; qflat < n_qp; ++qflat) {
      PointBasis pb;
      SmallVector xi(d);
      double w = 1.0;
      int rest = qflat;
      for (int k = 0; k < d; ++k) {
        const auto at = static_cast<std::size_t>(e[static_cast<std::size_t>(k)] * nq + rest % nq);
        rest /= nq;
        pb.full[k] = &tab.full[at];
        pb.reduced[k] = &tab.reduced[at];
        xi[k] = tab.points[at];
        w *= tab.weights[at];
      }
      const MapDerivatives md = geo.derivatives(xi);
      eval_velocity(pat, pb, d, md, md.jacobian.inverse(), V, G, div_hat);
      const Eigen::VectorXd diff = V.transpose() * coeffs - Eigen::VectorXd(exact(xi));
      sum += w * md.det * diff.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

void write_matrix_market(const SaddleSystem& system, const std::string& prefix) {
  if (!Eigen::saveMarket(system.K, prefix + "_K.mtx") || !Eigen::saveMarketVector(system.F, prefix + "_F.mtx"))
    throw std::runtime_error("write_matrix_market: cannot write " + prefix);
}

}  // namespace stokesmg
