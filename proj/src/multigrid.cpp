#include "stokesmg/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace stokesmg {

namespace {

std::vector<Index> support_elements(Index i, int degree, Index ne) {
  std::vector<Index> out;
  for (Index e = std::max<Index>(0, i - degree); e <= std::min(ne - 1, i); ++e) out.push_back(e);
  return out;
}

}  // namespace

SparseMatrix prolongation(const CompatibleComplex& coarse, const CompatibleComplex& fine) {
  const int d = coarse.dim();
  const SparseMatrix t_full = knot_insertion_matrix(coarse.full_space(), fine.full_space()).T;
  const SparseMatrix t_red = knot_insertion_matrix(coarse.reduced_space(), fine.reduced_space()).T;

  std::vector<SparseMatrix> comps;
  for (int c = 0; c < d; ++c) {
    std::vector<SparseMatrix> factors;
    for (int k = 0; k < d; ++k) factors.push_back(k == c ? t_full : t_red);
    comps.emplace_back(tensor_product(factors).transpose());
  }
  std::vector<std::vector<SparseMatrix>> zeros(static_cast<std::size_t>(d));
  std::vector<std::vector<const SparseMatrix*>> rows(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) zeros[a].emplace_back(comps[a].rows(), comps[b].cols());
    for (int b = 0; b < d; ++b) rows[a].push_back(a == b ? &comps[a] : &zeros[a][b]);
  }
  const SparseMatrix pv_all = block_matrix(rows);
  const SparseMatrix pv = select(pv_all, fine.free_velocity(), coarse.free_velocity());

  std::vector<SparseMatrix> pfactors(static_cast<std::size_t>(d), t_red);
  const SparseMatrix pq = tensor_product(pfactors).transpose();
  const SparseMatrix one = sparse_identity(1);

  const SparseMatrix z_vq(pv.rows(), pq.cols()), z_v1(pv.rows(), 1);
  const SparseMatrix z_qv(pq.rows(), pv.cols()), z_q1(pq.rows(), 1);
  const SparseMatrix z_1v(1, pv.cols()), z_1q(1, pq.cols());
  return block_matrix({{&pv, &z_vq, &z_v1}, {&z_qv, &pq, &z_q1}, {&z_1v, &z_1q, &one}});
}

std::vector<SchwarzSubdomain> enumerate_subdomains(const CompatibleComplex& complex, const SparseMatrix& K) {
  const RowSparseMatrix kr = K;
  const SparseMatrix& curl = complex.curl();
  const SparseMatrix& div = complex.div_free();
  const Index nv = complex.free_velocity_size();
  const Index lam = nv + complex.pressure_size();

  std::vector<SchwarzSubdomain> out;
  out.reserve(complex.free_potential().size());
  for (Index g : complex.free_potential()) {
    SchwarzSubdomain s;
    s.generator = g;
    for (SparseMatrix::InnerIterator it(curl, static_cast<int>(g)); it; ++it) {
      const Index v = complex.velocity_free_index(it.row());
      if (v < 0) throw std::logic_error("enumerate_subdomains: potential generates a constrained velocity");
      s.velocity.push_back(v);
    }
    std::sort(s.velocity.begin(), s.velocity.end());
    if (s.velocity.empty()) throw std::logic_error("enumerate_subdomains: empty velocity set");
    for (Index v : s.velocity)
      for (SparseMatrix::InnerIterator it(div, static_cast<int>(v)); it; ++it) s.pressure.push_back(it.row());
    std::sort(s.pressure.begin(), s.pressure.end());
    s.pressure.erase(std::unique(s.pressure.begin(), s.pressure.end()), s.pressure.end());

    s.dofs = s.velocity;
    for (Index q : s.pressure) s.dofs.push_back(nv + q);
    const auto n = static_cast<Index>(s.dofs.size());
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        local(i, j) = kr.coeff(static_cast<int>(s.dofs[i]), static_cast<int>(s.dofs[j]));
    for (Index i = static_cast<Index>(s.velocity.size()); i < n; ++i) {
      local(i, n) = kr.coeff(static_cast<int>(s.dofs[i]), static_cast<int>(lam));
      local(n, i) = kr.coeff(static_cast<int>(lam), static_cast<int>(s.dofs[i]));
    }
    s.solver.compute(local);
    if (!(s.solver.rcond() > 1e-14))
      throw std::runtime_error("enumerate_subdomains: singular local problem at level " +
                               std::to_string(complex.level()) + ", generator " + std::to_string(g));
    out.push_back(std::move(s));
  }
  return out;
}

bool subdomains_cover(const CompatibleComplex& complex, const std::vector<SchwarzSubdomain>& subdomains) {
  const int d = complex.dim();
  const Index ne = complex.elements_per_direction();
  Index n_el = 1;
  for (int k = 0; k < d; ++k) n_el *= ne;
  std::vector<char> covered(static_cast<std::size_t>(n_el), 0);
  const auto& pot = complex.potential();
  for (const auto& s : subdomains) {
    int comp = 0;
    while (comp + 1 < static_cast<int>(pot.size()) && s.generator >= complex.potential_offset(comp + 1)) ++comp;
    const TensorSpace& space = pot[static_cast<std::size_t>(comp)];
    const auto m = space.multi(s.generator - complex.potential_offset(comp));
    std::array<std::vector<Index>, 3> ranges{std::vector<Index>{0}, std::vector<Index>{0}, std::vector<Index>{0}};
    for (int k = 0; k < d; ++k) ranges[k] = support_elements(m[k], space.factor(k).degree(), ne);
    for (Index c : ranges[2])
      for (Index b : ranges[1])
        for (Index a : ranges[0]) covered[static_cast<std::size_t>(a + ne * (b + ne * c))] = 1;
  }
  return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
}

MultigridHierarchy::MultigridHierarchy(const SaddleSystem& finest, int dim, int degree, int finest_level)
    : system_(finest) {
  levels_.resize(static_cast<std::size_t>(finest_level + 1));
  for (int l = 0; l <= finest_level; ++l)
    levels_[l].complex = std::make_shared<const CompatibleComplex>(CompatibleComplex::build(dim, degree, l));
  if (levels_.back().complex->free_velocity_size() != finest.n_velocity ||
      levels_.back().complex->pressure_size() != finest.n_pressure)
    throw std::invalid_argument("MultigridHierarchy: system does not match the finest level");

  levels_.back().K = finest.K;
  for (int l = finest_level - 1; l >= 0; --l) {
    MultigridLevel& fine = levels_[l + 1];
    fine.P = prolongation(*levels_[l].complex, *fine.complex);
    const SparseMatrix R = fine.P.transpose();
    const SparseMatrix KP = fine.K * fine.P;
    levels_[l].K = R * KP;
  }
  for (int l = 1; l <= finest_level; ++l) {
    levels_[l].K_rows = levels_[l].K;
    levels_[l].subdomains = enumerate_subdomains(*levels_[l].complex, levels_[l].K);
  }
  coarse_.compute(Eigen::MatrixXd(levels_[0].K));
}

MultigridHierarchy build_hierarchy(int dim, int degree, int finest_level, const GeometryMap& geo,
                                   const ProblemParams& params, const ParametricField& forcing) {
  const CompatibleComplex finest = CompatibleComplex::build(dim, degree, finest_level);
  return MultigridHierarchy(assemble(finest, geo, params, forcing), dim, degree, finest_level);
}

namespace {

Eigen::VectorXd local_solve(const SchwarzSubdomain& s, const Eigen::VectorXd& r_local) {
  const auto n = static_cast<Index>(s.dofs.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs.head(n) = r_local;
  return s.solver.solve(rhs).head(n);
}

void additive_sweep(const MultigridLevel& lv, Eigen::VectorXd& U, const Eigen::VectorXd& F,
                    const SmootherConfig& config) {
  const Eigen::VectorXd r = F - lv.K_rows * U;
  const auto& subs = lv.subdomains;
  std::vector<Eigen::VectorXd> updates(subs.size());
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& s = subs[i];
      Eigen::VectorXd r_local(static_cast<Index>(s.dofs.size()));
      for (std::size_t k = 0; k < s.dofs.size(); ++k) r_local[static_cast<Index>(k)] = r[s.dofs[k]];
      updates[i] = local_solve(s, r_local);
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, config.threads));
  if (threads == 1) {
    work(0, subs.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (subs.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(subs.size(), t * chunk);
      const std::size_t end = std::min(subs.size(), begin + chunk);
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  // Ordered summation keeps the result independent of the thread count.
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t k = 0; k < subs[i].dofs.size(); ++k)
      U[subs[i].dofs[k]] += config.eta * updates[i][static_cast<Index>(k)];
}

void multiplicative_sweep(const MultigridLevel& lv, Eigen::VectorXd& U, const Eigen::VectorXd& F) {
  Eigen::VectorXd r_local;
  for (const auto& s : lv.subdomains) {
    r_local.resize(static_cast<Index>(s.dofs.size()));
    for (std::size_t k = 0; k < s.dofs.size(); ++k) {
      const Index row = s.dofs[k];
      r_local[static_cast<Index>(k)] = F[row] - lv.K_rows.row(row).dot(U);
    }
    const Eigen::VectorXd delta = local_solve(s, r_local);
    for (std::size_t k = 0; k < s.dofs.size(); ++k) U[s.dofs[k]] += delta[static_cast<Index>(k)];
  }
}

void mgv(const MultigridHierarchy& h, int l, Eigen::VectorXd& U, const Eigen::VectorXd& F,
         const SmootherConfig& config, const SmoothObserver& observer) {
  if (l == 0) {
    U = h.coarse_solver().solve(F);
    return;
  }
  const MultigridLevel& lv = h.level(l);
  for (int i = 0; i < config.nu1; ++i) {
    smooth(h, l, U, F, config);
    if (observer) observer(l, U);
  }
  const Eigen::VectorXd G = lv.P.transpose() * (F - lv.K_rows * U);
  Eigen::VectorXd dU = Eigen::VectorXd::Zero(G.size());
  mgv(h, l - 1, dU, G, config, observer);
  U += lv.P * dU;
  for (int i = 0; i < config.nu2; ++i) {
    smooth(h, l, U, F, config);
    if (observer) observer(l, U);
  }
}

}  // namespace

void smooth(const MultigridHierarchy& h, int level, Eigen::VectorXd& U, const Eigen::VectorXd& F,
            const SmootherConfig& config) {
  const MultigridLevel& lv = h.level(level);
  if (config.kind == SmootherKind::Additive) {
    additive_sweep(lv, U, F, config);
  } else {
    multiplicative_sweep(lv, U, F);
  }
}

void v_cycle(const MultigridHierarchy& h, Eigen::VectorXd& U, const Eigen::VectorXd& F, const SmootherConfig& config,
             const SmoothObserver& observer) {
  mgv(h, h.finest_level(), U, F, config, observer);
}

Eigen::VectorXd initial_guess(const CompatibleComplex& complex, std::uint64_t seed) {
  const Index nv = complex.free_velocity_size();
  const Index nq = complex.pressure_size();
  Eigen::VectorXd U = Eigen::VectorXd::Zero(nv + nq + 1);
  U.head(nv) = complex.restrict_velocity(random_divfree_velocity(complex, seed));
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd p(nq);
  for (Index i = 0; i < nq; ++i) p[i] = uniform(rng);
  // Subtract the constant function (all coefficients one) to reach zero mean.
  const Eigen::VectorXd& m = complex.pressure_integrals();
  p.array() -= m.dot(p) / m.sum();
  U.segment(nv, nq) = p;
  return U;
}

double max_divergence(const CompatibleComplex& complex, const Eigen::VectorXd& U) {
  const Eigen::VectorXd div = complex.div_free() * U.head(complex.free_velocity_size());
  return div.size() == 0 ? 0.0 : div.cwiseAbs().maxCoeff();
}

SolveResult solve(const MultigridHierarchy& h, const SmootherConfig& config, const SolveOptions& options,
                  const SmoothObserver& observer) {
  const CompatibleComplex& complex = *h.level(h.finest_level()).complex;
  const SaddleSystem& sys = h.system();
  SolveResult result;
  result.U = initial_guess(complex, options.seed);
  const double r0 = residual_norm(sys, result.U);
  result.residual_history.push_back(r0);
  result.divergence_history.push_back(max_divergence(complex, result.U));
  result.converged = r0 == 0.0;
  while (!result.converged && result.cycles < options.max_cycles) {
    v_cycle(h, result.U, sys.F, config, observer);
    ++result.cycles;
    const double r = residual_norm(sys, result.U);
    result.residual_history.push_back(r);
    result.divergence_history.push_back(max_divergence(complex, result.U));
    if (!std::isfinite(r)) break;
    result.converged = r <= options.tol * r0;
  }
  result.max_div = *std::max_element(result.divergence_history.begin(), result.divergence_history.end());
  const Eigen::VectorXd u = result.U.head(complex.free_velocity_size());
  result.max_velocity = u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
  return result;
}

}  // namespace stokesmg
