#pragma once

#include "stokesmg/complex.hpp"

#include <random>
#include <vector>

namespace testing {

using stokesmg::Index;

inline std::vector<std::vector<double>> random_points(int dim, int count, std::uint64_t seed, double lo = 0.0,
                                                      double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& v : p) v = u(rng);
  return pts;
}

inline Eigen::VectorXd random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

// Parametric velocity and its divergence from full-length coefficients.
struct VelocityValue {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  double div = 0.0;
};

inline VelocityValue eval_velocity(const stokesmg::CompatibleComplex& c, const Eigen::VectorXd& coeffs,
                                   const std::vector<double>& xi) {
  VelocityValue out;
  for (int k = 0; k < c.dim(); ++k) {
    const auto& space = c.velocity()[static_cast<std::size_t>(k)];
    const Index off = c.velocity_offset(k);
    for (Index i = 0; i < space.size(); ++i) {
      const double a = coeffs[off + i];
      if (a == 0.0) continue;
      out.v[k] += a * space.eval(i, xi);
      out.div += a * space.gradient(i, xi)[k];
    }
  }
  return out;
}

inline double eval_scalar(const stokesmg::TensorSpace& space, const Eigen::VectorXd& coeffs, Index offset,
                          const std::vector<double>& xi) {
  double s = 0.0;
  for (Index i = 0; i < space.size(); ++i) s += coeffs[offset + i] * space.eval(i, xi);
  return s;
}

}  // namespace testing
