#ifndef OSTRO_SURFACE_HPP
#define OSTRO_SURFACE_HPP

#include "ostro/affine_model.hpp"

namespace ostro {

/// L rewritten as L_d + L_s where L_s = d/dtau Lambda carries the whole
/// acceleration dependence and L_d is an ordinary first-order Lagrangian.
struct SurfaceSplit {
  Expr Lambda;     // boundary function with K_mu = dLambda/dxdot^mu
  bool separable = false;
  Expr g;          // Lambda = g(x) h(xdot) when separable
  Expr h;
  Expr Ld;         // dynamic part, acceleration-free
  Expr Ls;         // surface part, d(Lambda)/dtau
  SymVector pBold;  // momenta of L_d
  SymVector pFrak;  // momenta of L_s, dLambda/dx^mu
};

/// Reconstruct the boundary function by term-wise rule-based
/// antidifferentiation of K_mu in the velocities (polynomial terms, rational
/// a(x) xdot / (quadratic in xdot) terms and the atanh family), then split.
///
/// Throws Err::SymmetryViolated when dK_mu/dxdot^nu is not symmetric (no
/// boundary function exists) and Err::AntiderivativeNotFound when the rule
/// table cannot integrate some term.
SurfaceSplit surfaceDecompose(const AffineModel& m,
                              const DerivedTensors& tensors, int trials = 8,
                              double tol = 1e-9, std::uint64_t seed = 0);

}  // namespace ostro

#endif
