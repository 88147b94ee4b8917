#include "stokesmg/complex.hpp"

#include <random>
#include <string>

namespace stokesmg {

SparseMatrix derivative_matrix(const UnivariateSpace& space) {
  const int p = space.degree();
  const auto& knots = space.knot_vector();
  const Index n = space.size();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(2 * (n - 1)));
  for (Index k = 0; k + 1 < n; ++k) {
    const double w = p / (knots[k + p + 1] - knots[k + 1]);
    entries.emplace_back(static_cast<int>(k), static_cast<int>(k), -w);
    entries.emplace_back(static_cast<int>(k), static_cast<int>(k + 1), w);
  }
  SparseMatrix g(n - 1, n);
  g.setFromTriplets(entries.begin(), entries.end());
  return g;
}

namespace {

bool interior(Index i, Index n) { return i > 0 && i + 1 < n; }

std::vector<Index> offsets_of(const std::vector<TensorSpace>& spaces) {
  std::vector<Index> offsets{0};
  for (const auto& s : spaces) offsets.push_back(offsets.back() + s.size());
  return offsets;
}

}  // namespace

CompatibleComplex::CompatibleComplex(int dim, int degree, int level, UnivariateSpace full, UnivariateSpace reduced)
    : dim_(dim),
      degree_(degree),
      level_(level),
      full_(std::move(full)),
      reduced_(std::move(reduced)),
      pressure_(std::vector<UnivariateSpace>(static_cast<std::size_t>(dim), reduced_)) {}

CompatibleComplex CompatibleComplex::build(int dim, int degree, int level) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("CompatibleComplex: dimension must be 2 or 3");
  if (degree < 2)
    throw UnsupportedDegreeError("CompatibleComplex: degree " + std::to_string(degree) +
                                 " < 2 leaves a discontinuous pressure space");
  if (level < 0 || level > 20) throw std::invalid_argument("CompatibleComplex: level out of range");

  UnivariateSpace full(KnotVector::uniform(degree, 1 << level));
  UnivariateSpace reduced(full.knot_vector().lowered());
  CompatibleComplex c(dim, degree, level, full, reduced);

  // Space of type `pattern`: bit k set means direction k uses the reduced space.
  const auto space_with = [&](unsigned reduced_mask) {
    std::vector<UnivariateSpace> factors;
    for (int k = 0; k < dim; ++k) factors.push_back((reduced_mask >> k) & 1U ? reduced : full);
    return TensorSpace(std::move(factors));
  };
  const unsigned all = (1U << dim) - 1U;

  if (dim == 2) {
    c.potential_.push_back(space_with(0U));
  } else {
    c.scalar_potential_ = space_with(0U);
    for (int k = 0; k < 3; ++k) c.potential_.push_back(space_with(1U << k));
  }
  for (int k = 0; k < dim; ++k) c.velocity_.push_back(space_with(all & ~(1U << k)));
  c.potential_offsets_ = offsets_of(c.potential_);
  c.velocity_offsets_ = offsets_of(c.velocity_);

  const Index n_full = full.size();

  // Boundary-condition masks.
  if (c.scalar_potential_) {
    const TensorSpace& phi = *c.scalar_potential_;
    for (Index i = 0; i < phi.size(); ++i) {
      const auto m = phi.multi(i);
      bool keep = true;
      for (int k = 0; k < dim; ++k) keep = keep && interior(m[k], n_full);
      if (keep) c.free_scalar_potential_.push_back(i);
    }
  }
  for (int comp = 0; comp < static_cast<int>(c.potential_.size()); ++comp) {
    const TensorSpace& s = c.potential_[comp];
    for (Index i = 0; i < s.size(); ++i) {
      const auto m = s.multi(i);
      bool keep = true;
      for (int k = 0; k < dim; ++k) {
        // Tangential components vanish on faces normal to the other directions.
        if (dim == 3 && k == comp) continue;
        keep = keep && interior(m[k], n_full);
      }
      if (keep) c.free_potential_.push_back(c.potential_offsets_[comp] + i);
    }
  }
  c.velocity_free_index_.assign(static_cast<std::size_t>(c.velocity_size()), -1);
  for (int comp = 0; comp < dim; ++comp) {
    const TensorSpace& s = c.velocity_[comp];
    for (Index i = 0; i < s.size(); ++i) {
      const auto m = s.multi(i);
      if (!interior(m[comp], n_full)) continue;
      const Index full_index = c.velocity_offsets_[comp] + i;
      c.velocity_free_index_[full_index] = static_cast<Index>(c.free_velocity_.size());
      c.free_velocity_.push_back(full_index);
    }
  }

  // Differential operators as tensor products of 1D factors.
  const SparseMatrix G = derivative_matrix(full);
  const SparseMatrix I_full = sparse_identity(full.size());
  const SparseMatrix I_red = sparse_identity(reduced.size());
  const auto factor = [&](unsigned reduced_mask, int diff_dir) {
    std::vector<SparseMatrix> f;
    for (int k = 0; k < dim; ++k) {
      if (k == diff_dir) {
        f.push_back(G);
      } else {
        f.push_back((reduced_mask >> k) & 1U ? I_red : I_full);
      }
    }
    return tensor_product(f);
  };

  {
    std::vector<SparseMatrix> parts;
    for (int k = 0; k < dim; ++k) parts.push_back(factor(all & ~(1U << k), k));
    std::vector<const SparseMatrix*> row;
    for (const auto& m : parts) row.push_back(&m);
    c.div_ = block_matrix({row});
  }

  if (dim == 2) {
    const SparseMatrix dy = factor(0U, 1);
    const SparseMatrix minus_dx = -factor(0U, 0);
    c.curl_ = block_matrix({{&dy}, {&minus_dx}});
  } else {
    // d_dir applied to potential component `comp`.
    const auto d = [&](int comp, int dir) { return factor(1U << comp, dir); };
    const auto zero = [&](int vel_comp, int pot_comp) {
      return SparseMatrix(c.velocity_[vel_comp].size(), c.potential_[pot_comp].size());
    };
    // v1 = d_y psi3 - d_z psi2, v2 = d_z psi1 - d_x psi3, v3 = d_x psi2 - d_y psi1.
    const SparseMatrix z11 = zero(0, 0), d_y3 = d(2, 1), m_d_z2 = -d(1, 2);
    const SparseMatrix d_z1 = d(0, 2), z22 = zero(1, 1), m_d_x3 = -d(2, 0);
    const SparseMatrix m_d_y1 = -d(0, 1), d_x2 = d(1, 0), z33 = zero(2, 2);
    c.curl_ = block_matrix({{&z11, &m_d_z2, &d_y3}, {&d_z1, &z22, &m_d_x3}, {&m_d_y1, &d_x2, &z33}});

    const SparseMatrix gx = factor(0U, 0), gy = factor(0U, 1), gz = factor(0U, 2);
    c.grad_ = block_matrix({{&gx}, {&gy}, {&gz}});
  }

  c.div_free_ = select(c.div_, {}, c.free_velocity_);

  const Index nq = c.pressure_.size();
  c.pressure_integrals_.resize(nq);
  const auto& rk = reduced.knot_vector();
  const int q = reduced.degree();
  for (Index i = 0; i < nq; ++i) {
    const auto m = c.pressure_.multi(i);
    double integral = 1.0;
    for (int k = 0; k < dim; ++k) integral *= (rk[m[k] + q + 1] - rk[m[k]]) / (q + 1);
    c.pressure_integrals_[i] = integral;
  }
  return c;
}

Eigen::VectorXd CompatibleComplex::restrict_velocity(const Eigen::VectorXd& full) const {
  Eigen::VectorXd free(free_velocity_size());
  for (std::size_t i = 0; i < free_velocity_.size(); ++i) free[static_cast<Index>(i)] = full[free_velocity_[i]];
  return free;
}

Eigen::VectorXd CompatibleComplex::expand_velocity(const Eigen::VectorXd& free) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(velocity_size());
  for (std::size_t i = 0; i < free_velocity_.size(); ++i) full[free_velocity_[i]] = free[static_cast<Index>(i)];
  return full;
}

Eigen::VectorXd random_divfree_velocity(const CompatibleComplex& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd potential = Eigen::VectorXd::Zero(c.potential_size());
  for (Index i : c.free_potential()) potential[i] = uniform(rng);
  return c.curl() * potential;
}

}  // namespace stokesmg
