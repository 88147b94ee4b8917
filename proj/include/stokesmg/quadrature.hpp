#pragma once

#include <vector>

namespace stokesmg {

struct QuadratureRule {
  std::vector<double> points;   // in [0,1]
  std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0,1].
QuadratureRule gauss_legendre(int n);

/// The same rule mapped to [a,b].
QuadratureRule gauss_legendre(int n, double a, double b);

}  // namespace stokesmg
