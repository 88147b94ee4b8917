#pragma once

#include "stokesmg/geometry.hpp"

#include <functional>

namespace stokesmg {

enum class FlowProblem { Stokes, Oseen };

/// Physical vector field evaluated through its parametric preimage: the
/// argument is xi and the result is the field at F(xi).
using ParametricField = std::function<SmallVector(const SmallVector& xi)>;

/// Coefficients of sigma u - nu Lap u + a . grad u + grad p = f.
struct ProblemParams {
  FlowProblem kind = FlowProblem::Stokes;
  double sigma = 1.0;
  double nu = 1.0;
  double penalty = 4.0;       // Nitsche constant C_I
  ParametricField advection;  // empty for Stokes
};

/// Nitsche constant used throughout: C_I = 4 (p - 1).
inline double default_penalty(int degree) { return 4.0 * (degree - 1); }

}  // namespace stokesmg
