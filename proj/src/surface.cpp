#include "ostro/surface.hpp"

#include <optional>

#include "ostro/calculus.hpp"
#include "ostro/error.hpp"
#include "ostro/simplify.hpp"

namespace ostro {

namespace {

/// W with W^2 = q, up to sign (any root works for the atanh rules, which are
/// odd in W). Returns nullopt when no usable root is recognizable.
std::optional<Expr> squareRootOf(const Expr& q) {
  if (q.isZero()) return std::nullopt;
  if (q.isConstant()) {
    if (q.value().isNegative()) return std::nullopt;
    return simplify(Expr::apply(Func::Sqrt, q));  // exact for perfect squares
  }
  if (q.kind() == NodeKind::Power && q.exponent().isConstant() &&
      q.exponent().value().isExact() && q.exponent().value().isInteger() &&
      q.exponent().value().asInteger() % 2 == 0) {
    return simplify(Expr::pow(
        q.base(), Expr::integer(q.exponent().value().asInteger() / 2)));
  }
  if (q.kind() == NodeKind::Product) {
    std::vector<Expr> roots;
    for (const auto& f : q.kids()) {
      auto r = squareRootOf(f);
      if (!r) return std::nullopt;
      roots.push_back(*r);
    }
    return simplify(Expr::product(std::move(roots)));
  }
  return std::nullopt;
}

/// Antiderivative of one simplified term with respect to velocity v.
/// Rule table: v-free terms, c v^k, c/v, the rational family
/// c/(A + B v^2) -> atanh, and c v/(A + B v^2) -> ln.
std::optional<Expr> antiderivTerm(const Expr& term, const Symbol& v) {
  Expr vs = Expr::sym(v);
  std::vector<Expr> vFree, vDep;
  for (const auto& f : productFactors(term)) {
    (f.dependsOn(v) ? vDep : vFree).push_back(f);
  }
  Expr c = Expr::product(std::move(vFree));
  if (vDep.empty()) {
    return simplify(c * vs);
  }

  // c * v^k
  if (vDep.size() == 1) {
    auto [base, exp] = asPow(vDep[0]);
    if (base.same(vs) && exp.isConstant() && exp.value().isExact()) {
      const Rational& k = exp.value().rat();
      if (k == Rational(-1)) {
        return simplify(c * Expr::apply(Func::Ln, Expr::apply(Func::Abs, vs)));
      }
      auto k1 = Rational::add(k, Rational(1));
      if (!k1) return std::nullopt;
      auto inv = k1->inv();
      if (!inv) return std::nullopt;
      return simplify(c * Expr::constant(Number::exact(*inv)) *
                      Expr::pow(vs, Expr::constant(Number::exact(*k1))));
    }
  }

  // recognize D = A + B v^2 with B a nonzero rational constant, A v-free
  auto quadratic = [&](const Expr& d) -> std::optional<std::pair<Expr, Expr>> {
    Expr b2 = simplify(diff(diff(d, v), v) * Expr::rational(1, 2));
    if (!b2.isConstant() || b2.isZero()) return std::nullopt;
    Expr a = simplify(d - b2 * vs * vs);
    if (a.dependsOn(v)) return std::nullopt;  // stray linear term
    return std::make_pair(a, b2);
  };

  // c / (A + B v^2)  and  c v / (A + B v^2)
  Expr denomBase;
  bool haveDen = false;
  bool haveLinearV = false;
  for (const auto& f : vDep) {
    auto [base, exp] = asPow(f);
    if (base.same(vs) && exp.isOne()) {
      if (haveLinearV) return std::nullopt;
      haveLinearV = true;
      continue;
    }
    if (exp.isInteger(-1) && base.dependsOn(v)) {
      if (haveDen) return std::nullopt;
      haveDen = true;
      denomBase = base;
      continue;
    }
    return std::nullopt;
  }
  if (!haveDen) return std::nullopt;
  auto ab = quadratic(denomBase);
  if (!ab) return std::nullopt;
  const auto& [A, B] = *ab;

  if (haveLinearV) {
    // int c v dv / (A + B v^2) = c/(2B) ln|A + B v^2|
    return simplify(c / (Expr::integer(2) * B) *
                    Expr::apply(Func::Ln, Expr::apply(Func::Abs, denomBase)));
  }
  Expr q = simplify(-(A / B));
  auto w = squareRootOf(q);
  if (!w) return std::nullopt;
  if (B.value().isNegative()) {
    // D = |B| (W^2 - v^2): (-1/B) c/W atanh(v/W)
    return simplify(-(c / (B * *w)) * Expr::apply(Func::Atanh, vs / *w));
  }
  // D = B (v^2 - W^2): -(c/(B W)) atanh(W/v)
  return simplify(-(c / (B * *w)) * Expr::apply(Func::Atanh, *w / vs));
}

}  // namespace

SurfaceSplit surfaceDecompose(const AffineModel& m,
                              const DerivedTensors& tensors, int trials,
                              double tol, std::uint64_t seed) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  if (!checkAffineSymmetry(m, trials, tol, seed).symmetric) {
    throw OstroError(Err::SymmetryViolated,
                     "dK_mu/dxdot^nu is not symmetric: no boundary function "
                     "exists for this model");
  }

  SampleDomain dom = m.domain();
  Expr lambda;
  for (int mu = 0; mu < n; ++mu) {
    Symbol v = c.velocity(mu);
    Expr remainder = simplify(m.K()[mu] - diff(lambda, v));
    for (const auto& term : sumTerms(remainder)) {
      if (term.isZero()) continue;
      auto part = antiderivTerm(term, v);
      if (!part) {
        throw OstroError(Err::AntiderivativeNotFound,
                         "no antiderivative rule matches the K[" +
                             c.coordinateNames()[mu] + "] term " + term.str());
      }
      lambda = simplify(lambda + *part);
    }
  }
  lambda = simplify(lambda);

  // verify K_mu = dLambda/dxdot^mu before trusting the split
  for (int mu = 0; mu < n; ++mu) {
    Expr residual = simplify(m.K()[mu] - diff(lambda, c.velocity(mu)));
    if (residual.isZero()) continue;
    if (!equalProbabilistic(residual, Expr(), m.chart(), dom, trials, tol,
                            seed)) {
      throw OstroError(Err::AntiderivativeNotFound,
                       "boundary-function reconstruction failed: residual " +
                           residual.str() + " in component " +
                           std::to_string(mu));
    }
  }

  SurfaceSplit split;
  split.Lambda = lambda;
  split.Ls = simplify(totalDerivative(lambda, c, 2));
  split.Ld = simplify(m.lagrangian() - split.Ls);
  split.pFrak.resize(n);
  split.pBold.resize(n);
  for (int mu = 0; mu < n; ++mu) {
    split.pFrak[mu] = simplify(diff(lambda, c.coordinate(mu)));
    split.pBold[mu] = simplify(tensors.p[mu] - split.pFrak[mu]);
  }

  // separable boundary function Lambda = g(x) h(xdot)? All factors must be
  // pure in one sector; parameters and the magnitude of the numeric
  // coefficient go to g, the sign goes to h.
  if (lambda.kind() != NodeKind::Sum && !lambda.isZero()) {
    auto [coeff, monic] = splitCoeff(lambda);
    std::vector<Expr> gFac, hFac;
    bool ok = true;
    for (const auto& f : productFactors(monic)) {
      bool hasX = false, hasV = false;
      f.forEachSymbol([&](const Symbol& s) {
        if (s.kind() != SymbolKind::Deriv) return;
        (s.order() == 0 ? hasX : hasV) = true;
      });
      if (hasX && hasV) {
        ok = false;
        break;
      }
      (hasV ? hFac : gFac).push_back(f);
    }
    if (ok) {
      Number mag = coeff.isNegative() ? coeff.neg() : coeff;
      Expr sign = coeff.isNegative() ? Expr::integer(-1) : Expr::integer(1);
      split.separable = true;
      split.g = simplify(Expr::constant(mag) * Expr::product(std::move(gFac)));
      split.h = simplify(sign * Expr::product(std::move(hFac)));
    }
  }
  return split;
}

}  // namespace ostro
