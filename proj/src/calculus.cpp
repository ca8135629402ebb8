#include "ostro/calculus.hpp"

#include "ostro/error.hpp"

namespace ostro {

namespace {

Expr diffApply(const Expr& e, const Expr& du) {
  const Expr& u = e.arg();
  switch (e.func()) {
    case Func::Sqrt:
      // u' / (2 sqrt(u))
      return du / (Expr::integer(2) * e);
    case Func::Atanh:
      return du / (Expr::integer(1) - u * u);
    case Func::Tanh:
      return du * (Expr::integer(1) - e * e);
    case Func::Sin:
      return du * Expr::apply(Func::Cos, u);
    case Func::Cos:
      return -(du * Expr::apply(Func::Sin, u));
    case Func::Exp:
      return du * e;
    case Func::Ln:
      return du / u;
    case Func::Abs:
      // d|u| = u u' / |u|, valid away from u = 0
      return u * du / e;
  }
  return Expr();
}

}  // namespace

Expr diff(const Expr& e, const Symbol& s) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return Expr();
    case NodeKind::Sym:
      return e.symbol() == s ? Expr::integer(1) : Expr();
    case NodeKind::Sum: {
      std::vector<Expr> parts;
      for (const auto& k : e.kids()) {
        Expr d = diff(k, s);
        if (!d.isZero()) parts.push_back(d);
      }
      return Expr::sum(std::move(parts));
    }
    case NodeKind::Product: {
      std::vector<Expr> parts;
      const auto& ks = e.kids();
      for (std::size_t i = 0; i < ks.size(); ++i) {
        Expr d = diff(ks[i], s);
        if (d.isZero()) continue;
        std::vector<Expr> fac;
        fac.reserve(ks.size());
        for (std::size_t j = 0; j < ks.size(); ++j)
          fac.push_back(i == j ? d : ks[j]);
        parts.push_back(Expr::product(std::move(fac)));
      }
      return Expr::sum(std::move(parts));
    }
    case NodeKind::Power: {
      const Expr& b = e.base();
      const Expr& x = e.exponent();
      Expr db = diff(b, s);
      Expr dx = diff(x, s);
      if (dx.isZero()) {
        if (db.isZero()) return Expr();
        // x * b^(x-1) * b'
        Expr xm1 = x.isConstant()
                       ? Expr::constant(Number::add(
                             x.value(), Number::exact(Rational(-1))))
                       : Expr::sum({x, Expr::integer(-1)});
        return x * Expr::pow(b, xm1) * db;
      }
      // general case: b^x (x' ln b + x b'/b)
      Expr term = dx * Expr::apply(Func::Ln, b) + x * db / b;
      return e * term;
    }
    case NodeKind::Apply: {
      Expr du = diff(e.arg(), s);
      if (du.isZero()) return Expr();
      return diffApply(e, du);
    }
  }
  return Expr();
}

Expr totalDerivative(const Expr& e, const Chart& chart, int orderCap) {
  if (e.hasKind(SymbolKind::MomentumQ) || e.hasKind(SymbolKind::MomentumP)) {
    throw OstroError(Err::Validation,
                     "total derivative is undefined for phase momenta");
  }
  int maxOrd = e.maxDerivOrder();
  if (maxOrd >= orderCap) {
    throw OstroError(Err::CapExceeded,
                     "expression already contains derivatives of order " +
                         std::to_string(maxOrd) +
                         " with cap " + std::to_string(orderCap));
  }
  std::vector<Expr> parts;
  for (const auto& s : e.freeSymbols()) {
    if (s.kind() == SymbolKind::Time) {
      Expr d = diff(e, s);
      if (!d.isZero()) parts.push_back(d);
    } else if (s.kind() == SymbolKind::Deriv) {
      Expr d = diff(e, s);
      if (!d.isZero())
        parts.push_back(d * Expr::sym(chart.deriv(s.index(), s.order() + 1)));
    }
  }
  return Expr::sum(std::move(parts));
}

}  // namespace ostro
