#ifndef OSTRO_SIMPLIFY_HPP
#define OSTRO_SIMPLIFY_HPP

#include <utility>
#include <vector>

#include "ostro/expr.hpp"

namespace ostro {

/// Rule-based normal form: flattens sums and products, folds constants
/// exactly (rational arithmetic until a transcendental forces floating
/// point), collects like terms and like powers, expands small products of
/// sums, and combines fractions over a common denominator with cancellation
/// of shared factors. Idempotent; numerically equivalent to the input at
/// every admissible binding.
Expr simplify(const Expr& e);

// Structural accessors over normalized expressions; used by the surface-term
// antidifferentiation rules and the separability analysis.

/// e viewed as a list of summands (a non-Sum is a single term).
std::vector<Expr> sumTerms(const Expr& e);

/// e viewed as a list of multiplicative factors (a non-Product is one factor).
std::vector<Expr> productFactors(const Expr& e);

/// Split a term into (numeric coefficient, remaining monic part).
std::pair<Number, Expr> splitCoeff(const Expr& e);

/// View a factor as base^exponent; plain factors report exponent 1.
std::pair<Expr, Expr> asPow(const Expr& f);

}  // namespace ostro

#endif
