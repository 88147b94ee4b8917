#include "doctest.h"
#include "support.hpp"

#include "stokesmg/manufactured.hpp"
#include "stokesmg/multigrid.hpp"

#include <cmath>

using namespace stokesmg;

namespace {

struct Bench {
  ManufacturedCase mc;
  ProblemParams params;
};

Bench bench(GeometryKind kind, FlowProblem problem = FlowProblem::Stokes, double da = 1.0, double re = 1.0) {
  ManufacturedCase mc{GeometryMap(kind)};
  ProblemParams params = realize_parameters(problem, da, re, 2, mc);
  return {mc, params};
}

MultigridHierarchy hierarchy(const Bench& b, int level, int degree = 2) {
  return build_hierarchy(b.mc.dim(), degree, level, b.mc.geometry(), b.params,
                         [&](const SmallVector& xi) { return b.mc.forcing(b.params, xi); });
}

double dense_max(const SparseMatrix& m) { return max_abs(m); }

}  // namespace

TEST_CASE("Galerkin coarse operators") {
  const Bench b = bench(GeometryKind::UnitSquare);
  const MultigridHierarchy h = hierarchy(b, 1);
  REQUIRE(h.finest_level() == 1);
  const Eigen::MatrixXd P = h.level(1).P;
  const Eigen::MatrixXd K1 = h.level(1).K;
  const Eigen::MatrixXd K0 = h.level(0).K;
  CHECK((P.transpose() * K1 * P - K0).cwiseAbs().maxCoeff() < 1e-13 * K1.cwiseAbs().maxCoeff());
  const auto c0 = CompatibleComplex::build(2, 2, 0);
  const auto c1 = CompatibleComplex::build(2, 2, 1);
  CHECK(P.rows() == c1.free_velocity_size() + c1.pressure_size() + 1);
  CHECK(P.cols() == c0.free_velocity_size() + c0.pressure_size() + 1);
  CHECK(P(P.rows() - 1, P.cols() - 1) == 1.0);
  CHECK(dense_max(SparseMatrix(h.level(1).K - h.system().K)) == 0.0);
}

TEST_CASE("restriction is the transpose of prolongation") {
  for (int dim : {2, 3}) {
    const auto c = CompatibleComplex::build(dim, 2, 1);
    const auto f = CompatibleComplex::build(dim, 2, 2);
    const SparseMatrix P = prolongation(c, f);
    const SparseMatrix R = P.transpose();
    const Eigen::VectorXd x = testing::random_vector(P.rows(), 1);
    const Eigen::VectorXd y = testing::random_vector(P.cols(), 2);
    CHECK(std::abs((R * x).dot(y) - x.dot(P * y)) < 1e-13 * x.norm() * y.norm());
  }
}

TEST_CASE("prolongation reproduces the coarse fields") {
  for (int dim : {2, 3}) {
    for (int p : {2, 3}) {
      const auto c = CompatibleComplex::build(dim, p, 1);
      const auto f = CompatibleComplex::build(dim, p, 2);
      const SparseMatrix P = prolongation(c, f);
      const Eigen::VectorXd Uc = testing::random_vector(P.cols(), 3);
      const Eigen::VectorXd Uf = P * Uc;
      CHECK(Uf[Uf.size() - 1] == Uc[Uc.size() - 1]);
      const Eigen::VectorXd vc = c.expand_velocity(Uc.head(c.free_velocity_size()));
      const Eigen::VectorXd vf = f.expand_velocity(Uf.head(f.free_velocity_size()));
      const Eigen::VectorXd qc = Uc.segment(c.free_velocity_size(), c.pressure_size());
      const Eigen::VectorXd qf = Uf.segment(f.free_velocity_size(), f.pressure_size());
      for (const auto& x : testing::random_points(dim, dim == 2 ? 100 : 30, 4)) {
        CHECK((testing::eval_velocity(c, vc, x).v - testing::eval_velocity(f, vf, x).v).norm() < 1e-12);
        CHECK(std::abs(testing::eval_scalar(c.pressure(), qc, 0, x) - testing::eval_scalar(f.pressure(), qf, 0, x)) <
              1e-12);
      }
    }
  }
}

TEST_CASE("compatible subdomains") {
  const Bench b = bench(GeometryKind::UnitSquare);
  const MultigridHierarchy h = hierarchy(b, 1);
  const auto& subs = h.level(1).subdomains;
  REQUIRE(subs.size() == 4);
  const auto& c = *h.level(1).complex;
  const Eigen::MatrixXd div = c.div_free();
  for (const auto& s : subs) {
    CHECK(s.velocity.size() == 4);
    CHECK(s.pressure.size() == 4);
    CHECK(s.dofs.size() == 8);
    Eigen::MatrixXd local(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) local(i, j) = div(s.pressure[i], s.velocity[j]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(local);
    lu.setThreshold(1e-12);
    CHECK(lu.rank() == 3);
  }
  const auto c3 = CompatibleComplex::build(3, 2, 1);
  const Bench b3 = bench(GeometryKind::UnitCube);
  const MultigridHierarchy h3 = hierarchy(b3, 1);
  CHECK(h3.level(1).subdomains.size() == c3.free_potential().size());

  SparseMatrix zero(h.system().size(), h.system().size());
  CHECK_THROWS_AS(enumerate_subdomains(c, zero), std::runtime_error);
}

TEST_CASE("subdomains cover every level of every benchmark") {
  for (auto kind : {GeometryKind::UnitSquare, GeometryKind::QuarterAnnulus, GeometryKind::UnitCube,
                    GeometryKind::HollowCylinder}) {
    const Bench b = bench(kind);
    const MultigridHierarchy h = hierarchy(b, b.mc.dim() == 2 ? 4 : 2);
    for (int l = 1; l <= h.finest_level(); ++l) CHECK(subdomains_cover(*h.level(l).complex, h.level(l).subdomains));
  }
}

TEST_CASE("smoothing preserves discrete divergence-freedom") {
  for (auto kind : {GeometryKind::UnitSquare, GeometryKind::HollowCylinder}) {
    const Bench b = bench(kind, FlowProblem::Stokes, 1000.0);
    const MultigridHierarchy h = hierarchy(b, b.mc.dim() == 2 ? 3 : 2);
    const int l = h.finest_level();
    const auto& c = *h.level(l).complex;
    for (auto kind_s : {SmootherKind::Multiplicative, SmootherKind::Additive}) {
      SmootherConfig config;
      config.kind = kind_s;
      Eigen::VectorXd U = initial_guess(c, 5);
      // arbitrary momentum load, homogeneous constraint rows
      Eigen::VectorXd F = testing::random_vector(U.size(), 6);
      F.tail(U.size() - c.free_velocity_size()).setZero();
      for (int sweep = 0; sweep < 4; ++sweep) {
        smooth(h, l, U, F, config);
        const double scale = std::max(1.0, U.head(c.free_velocity_size()).cwiseAbs().maxCoeff());
        CHECK(max_divergence(c, U) < 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("exact solutions are fixed points of the smoothers") {
  const Bench b = bench(GeometryKind::QuarterAnnulus);
  const MultigridHierarchy h = hierarchy(b, 3);
  const Eigen::VectorXd U = direct_solve(h.system());
  for (auto kind : {SmootherKind::Multiplicative, SmootherKind::Additive}) {
    SmootherConfig config;
    config.kind = kind;
    Eigen::VectorXd V = U;
    smooth(h, 3, V, h.system().F, config);
    CHECK((V - U).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, U.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("single-level hierarchy is a direct solve") {
  const Bench b = bench(GeometryKind::UnitSquare);
  const MultigridHierarchy h = hierarchy(b, 0);
  Eigen::VectorXd U = Eigen::VectorXd::Zero(h.system().size());
  v_cycle(h, U, h.system().F, SmootherConfig{});
  CHECK(residual_norm(h.system(), U) < 1e-12 * h.system().F.norm());
}

TEST_CASE("initial guess") {
  const auto c = CompatibleComplex::build(2, 2, 3);
  const Eigen::VectorXd U = initial_guess(c, 9);
  const Index nv = c.free_velocity_size(), nq = c.pressure_size();
  CHECK(U.size() == nv + nq + 1);
  CHECK(max_divergence(c, U) < 1e-13);
  CHECK(std::abs(c.pressure_integrals().dot(U.segment(nv, nq))) < 1e-14);
  CHECK(U[nv + nq] == 0.0);
  CHECK(U == initial_guess(c, 9));
  CHECK(U != initial_guess(c, 10));
}

TEST_CASE("additive smoother contracts the residual") {
  const Bench b = bench(GeometryKind::UnitSquare);
  const MultigridHierarchy h = hierarchy(b, 2);
  SmootherConfig config;
  config.kind = SmootherKind::Additive;
  SolveOptions options;
  options.max_cycles = 5;
  const SolveResult r = solve(h, config, options);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i)
    CHECK(r.residual_history[i] < r.residual_history[i - 1]);
}

TEST_CASE("threaded additive smoothing is bitwise reproducible") {
  const Bench b = bench(GeometryKind::UnitCube);
  const MultigridHierarchy h = hierarchy(b, 2);
  SmootherConfig one;
  one.kind = SmootherKind::Additive;
  SmootherConfig four = one;
  four.threads = 4;
  SolveOptions options;
  options.max_cycles = 3;
  const SolveResult a = solve(h, one, options);
  const SolveResult c = solve(h, four, options);
  CHECK(a.U == c.U);
  CHECK(a.residual_history == c.residual_history);
}

TEST_CASE("multigrid solves converge monotonically and preserve divergence") {
  struct Run {
    GeometryKind kind;
    FlowProblem problem;
    double da, re;
    int level;
  };
  for (const Run& run : {Run{GeometryKind::UnitSquare, FlowProblem::Stokes, 1.0, 1.0, 4},
                         Run{GeometryKind::UnitSquare, FlowProblem::Stokes, 1000.0, 1.0, 4},
                         Run{GeometryKind::QuarterAnnulus, FlowProblem::Stokes, 1.0, 1.0, 4},
                         Run{GeometryKind::UnitCube, FlowProblem::Stokes, 1.0, 1.0, 2},
                         Run{GeometryKind::HollowCylinder, FlowProblem::Stokes, 1.0, 1.0, 2},
                         Run{GeometryKind::UnitSquare, FlowProblem::Oseen, 1000.0, 100.0, 4},
                         Run{GeometryKind::UnitCube, FlowProblem::Oseen, 1.0, 1.0, 2}}) {
    const Bench b = bench(run.kind, run.problem, run.da, run.re);
    const MultigridHierarchy h = hierarchy(b, run.level);
    const SolveResult r = solve(h, SmootherConfig{}, SolveOptions{});
    CHECK(r.converged);
    for (std::size_t i = 1; i < r.residual_history.size(); ++i)
      CHECK(r.residual_history[i] < r.residual_history[i - 1]);
    CHECK(r.max_div < 1e-11 * std::max(1.0, r.max_velocity));
    const SolveResult again = solve(h, SmootherConfig{}, SolveOptions{});
    CHECK(again.residual_history == r.residual_history);
  }
}

TEST_CASE("square Stokes cycle count near the reported value") {
  const Bench b = bench(GeometryKind::UnitSquare);
  const SolveResult r = solve(hierarchy(b, 5), SmootherConfig{}, SolveOptions{});
  CHECK(r.converged);
  CHECK(std::abs(r.cycles - 6) <= 2);
}

TEST_CASE("multigrid matches the direct solve") {
  const Bench b = bench(GeometryKind::UnitSquare);
  const MultigridHierarchy h = hierarchy(b, 2);
  SolveOptions options;
  options.tol = 1e-10;
  const SolveResult r = solve(h, SmootherConfig{}, options);
  const Eigen::MatrixXd K = h.system().K;
  const Eigen::VectorXd U = K.fullPivLu().solve(h.system().F);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
  const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  // forward error bounded by the condition number times the relative residual
  const double rel_residual = r.residual_history.back() / h.system().F.norm();
  CHECK(r.converged);
  CHECK((r.U - U).norm() <= cond * rel_residual * U.norm());
}
