#include "ostro/numeric.hpp"

#include <cmath>

#include "ostro/error.hpp"

namespace ostro {

namespace {

double applyFunc(Func f, double a) {
  switch (f) {
    case Func::Sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(a);
    case Func::Atanh:
      if (a <= -1.0 || a >= 1.0)
        throw DomainError("atanh argument outside (-1, 1)");
      return std::atanh(a);
    case Func::Tanh:
      return std::tanh(a);
    case Func::Sin:
      return std::sin(a);
    case Func::Cos:
      return std::cos(a);
    case Func::Exp:
      return std::exp(a);
    case Func::Ln:
      if (a <= 0.0) throw DomainError("ln of non-positive value");
      return std::log(a);
    case Func::Abs:
      return std::abs(a);
  }
  throw DomainError("unknown function");
}

double evalRec(const Expr& e, const Binding& b) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return e.value().toDouble();
    case NodeKind::Sym: {
      const Symbol& s = e.symbol();
      if (!b.has(s))
        throw OstroError(Err::Validation,
                         "binding does not cover symbol '" + s.name() + "'");
      return b.get(s);
    }
    case NodeKind::Sum: {
      double acc = 0.0;
      for (const auto& k : e.kids()) acc += evalRec(k, b);
      return acc;
    }
    case NodeKind::Product: {
      double acc = 1.0;
      for (const auto& k : e.kids()) acc *= evalRec(k, b);
      return acc;
    }
    case NodeKind::Power: {
      double base = evalRec(e.base(), b);
      double expo = evalRec(e.exponent(), b);
      if (base == 0.0 && expo < 0.0) throw DomainError("division by zero");
      if (base < 0.0 && expo != std::floor(expo))
        throw DomainError("non-integer power of negative base");
      return std::pow(base, expo);
    }
    case NodeKind::Apply:
      return applyFunc(e.func(), evalRec(e.arg(), b));
  }
  throw DomainError("unknown node");
}

}  // namespace

double evaluate(const Expr& e, const Binding& b) {
  double v = evalRec(e, b);
  if (!std::isfinite(v)) throw DomainError("evaluation is not finite");
  return v;
}

double centralDiff(const std::function<double(double)>& f, double x,
                   double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double centralDiffRichardson(const std::function<double(double)>& f, double x,
                             double h) {
  double d1 = centralDiff(f, x, h);
  double d2 = centralDiff(f, x, h / 2.0);
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace ostro
