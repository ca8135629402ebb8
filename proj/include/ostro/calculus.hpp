#ifndef OSTRO_CALCULUS_HPP
#define OSTRO_CALCULUS_HPP

#include "ostro/expr.hpp"
#include "ostro/symbol.hpp"

namespace ostro {

/// Exact partial derivative; all symbols are treated as independent
/// (configuration-space partials, never total derivatives).
Expr diff(const Expr& e, const Symbol& s);

/// Total derivative along the evolution parameter:
///   d/dtau = d/dtau|explicit + xdot d/dx + xddot d/dxdot + ...
/// introducing next-order derivative symbols as needed, up to orderCap.
/// Throws Err::CapExceeded when e already contains orderCap-th derivatives.
Expr totalDerivative(const Expr& e, const Chart& chart, int orderCap);

}  // namespace ostro

#endif
