#include "ostro/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace ostro {

namespace {

constexpr std::size_t kExpandTermLimit = 500;
constexpr std::int64_t kExpandPowLimit = 8;

Expr normalize(const Expr& e);
Expr normalizeSum(std::vector<Expr> terms);
Expr normalizeProduct(std::vector<Expr> factors);

// ---------------------------------------------------------------------------
// small structural helpers

std::pair<Expr, Expr> asPowImpl(const Expr& f) {
  if (f.kind() == NodeKind::Power) return {f.base(), f.exponent()};
  return {f, Expr::integer(1)};
}

std::pair<Number, Expr> splitCoeffImpl(const Expr& t) {
  if (t.isConstant()) return {t.value(), Expr::integer(1)};
  if (t.kind() == NodeKind::Product && !t.kids().empty() &&
      t.kids()[0].isConstant()) {
    std::vector<Expr> rest(t.kids().begin() + 1, t.kids().end());
    return {t.kids()[0].value(), Expr::product(std::move(rest))};
  }
  return {Number::exact(1), t};
}

Expr makeTerm(const Number& coeff, const Expr& monic) {
  if (coeff.isZero()) return Expr();
  if (monic.isOne()) return Expr::constant(coeff);
  if (coeff.isOne()) return monic;
  std::vector<Expr> kids;
  kids.push_back(Expr::constant(coeff));
  if (monic.kind() == NodeKind::Product) {
    for (const auto& k : monic.kids()) kids.push_back(k);
  } else {
    kids.push_back(monic);
  }
  return Expr::product(std::move(kids));
}

/// Key -> accumulated value map over expressions (hash prefilter + structural
/// equality), preserving first-insertion determinism until the final sort.
template <typename V>
class ExprMap {
 public:
  V& at(const Expr& key) {
    auto range = index_.equal_range(key.hash());
    for (auto it = range.first; it != range.second; ++it) {
      if (entries_[it->second].first.same(key)) return entries_[it->second].second;
    }
    index_.emplace(key.hash(), entries_.size());
    entries_.emplace_back(key, V{});
    return entries_.back().second;
  }
  std::vector<std::pair<Expr, V>>& entries() { return entries_; }

 private:
  std::vector<std::pair<Expr, V>> entries_;
  std::unordered_multimap<std::size_t, std::size_t> index_;
};

/// gcd over rationals: gcd(n1/d1, n2/d2) = gcd(n1 d2, n2 d1) / (d1 d2).
std::optional<Rational> ratGcd(const Rational& a, const Rational& b) {
  if (a.isZero()) return b.isNegative() ? b.neg() : b;
  if (b.isZero()) return a.isNegative() ? a.neg() : a;
  double est = std::abs(a.toDouble()) + std::abs(b.toDouble());
  if (est > 1e15) return std::nullopt;
  // work over the common denominator d1*d2 with 128-bit intermediates
  __int128 x = static_cast<__int128>(a.num()) * b.den();
  __int128 y = static_cast<__int128>(b.num()) * a.den();
  auto gcd128 = [](__int128 u, __int128 v) {
    if (u < 0) u = -u;
    if (v < 0) v = -v;
    while (v) { __int128 t = u % v; u = v; v = t; }
    return u;
  };
  __int128 g = gcd128(x, y);
  __int128 den = static_cast<__int128>(a.den()) * b.den();
  __int128 gg = gcd128(g, den);
  g /= gg;
  den /= gg;
  if (g > INT64_MAX || den > INT64_MAX) return std::nullopt;
  return Rational(static_cast<std::int64_t>(g), static_cast<std::int64_t>(den));
}

// ---------------------------------------------------------------------------
// expansion of products of sums: cross-multiplies term lists, normalizing
// each combination as a flat (sum-free) product

std::optional<Expr> expandTermLists(
    const std::vector<std::vector<Expr>>& lists,
    const std::vector<Expr>& extra, const Number& coeff) {
  std::size_t total = 1;
  for (const auto& l : lists) {
    total *= l.size();
    if (total > kExpandTermLimit) return std::nullopt;
  }
  std::vector<Expr> outTerms;
  outTerms.reserve(total);
  std::vector<std::size_t> idx(lists.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<Expr> fac;
    fac.reserve(lists.size() + extra.size() + 1);
    fac.push_back(Expr::constant(coeff));
    for (std::size_t i = 0; i < lists.size(); ++i) fac.push_back(lists[i][idx[i]]);
    for (const auto& x : extra) fac.push_back(x);
    outTerms.push_back(normalizeProduct(std::move(fac)));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (++idx[i] < lists[i].size()) break;
      idx[i] = 0;
    }
  }
  return normalizeSum(std::move(outTerms));
}

// ---------------------------------------------------------------------------
// Apply

Expr normalizeApply(Func f, const Expr& a) {
  // inverse pairs
  if (a.kind() == NodeKind::Apply) {
    Func g = a.func();
    if ((f == Func::Ln && g == Func::Exp) ||
        (f == Func::Exp && g == Func::Ln) ||
        (f == Func::Atanh && g == Func::Tanh) ||
        (f == Func::Tanh && g == Func::Atanh)) {
      return a.arg();
    }
    if (f == Func::Abs && g == Func::Abs) return a;
  }
  // |c*u| = |c|*|u|
  if (f == Func::Abs) {
    auto [c, monic] = splitCoeffImpl(a);
    if (c.isNegative()) {
      return normalizeProduct(
          {Expr::constant(c.neg()), Expr::apply(Func::Abs, monic)});
    }
  }
  if (a.isConstant()) {
    const Number& v = a.value();
    if (v.isExact()) {
      const Rational& r = v.rat();
      if (f == Func::Abs) {
        return Expr::constant(Number::exact(r.isNegative() ? r.neg() : r));
      }
      if (r.isZero() &&
          (f == Func::Sin || f == Func::Tanh || f == Func::Atanh ||
           f == Func::Sqrt)) {
        return Expr::integer(0);
      }
      if (r.isZero() && (f == Func::Cos || f == Func::Exp)) {
        return Expr::integer(1);
      }
      if (r.isOne() && f == Func::Ln) return Expr::integer(0);
      if (f == Func::Sqrt && !r.isNegative()) {
        // exact square roots of perfect squares
        auto isq = [](std::int64_t x) -> std::optional<std::int64_t> {
          if (x < 0) return std::nullopt;
          auto s = static_cast<std::int64_t>(std::llround(std::sqrt(double(x))));
          for (std::int64_t c = s - 1; c <= s + 1; ++c)
            if (c >= 0 && c * c == x) return c;
          return std::nullopt;
        };
        auto sn = isq(r.num());
        auto sd = isq(r.den());
        if (sn && sd) return Expr::constant(Number::exact(Rational(*sn, *sd)));
      }
    }
    // numeric fold when inside the domain
    double x = v.toDouble();
    double y = 0.0;
    bool ok = true;
    switch (f) {
      case Func::Sqrt: ok = x >= 0.0; y = std::sqrt(x); break;
      case Func::Atanh: ok = x > -1.0 && x < 1.0; y = std::atanh(x); break;
      case Func::Tanh: y = std::tanh(x); break;
      case Func::Sin: y = std::sin(x); break;
      case Func::Cos: y = std::cos(x); break;
      case Func::Exp: y = std::exp(x); break;
      case Func::Ln: ok = x > 0.0; y = std::log(x); break;
      case Func::Abs: y = std::abs(x); break;
    }
    if (ok && std::isfinite(y)) return Expr::real(y);
  }
  return Expr::apply(f, a);
}

// ---------------------------------------------------------------------------
// Power

Expr normalizePower(const Expr& b, const Expr& x) {
  if (x.isZero()) return Expr::integer(1);
  if (x.isOne()) return b;
  if (b.isOne()) return Expr::integer(1);
  if (b.isZero()) {
    if (x.isConstant() && !x.value().isNegative()) return Expr();
    return Expr::pow(b, x);  // 0^negative surfaces as a domain error later
  }
  if (b.isConstant() && x.isConstant()) {
    const Number& xv = x.value();
    if (xv.isInteger() && std::llabs(xv.asInteger()) <= 64) {
      return Expr::constant(Number::pow(b.value(), xv));
    }
    double base = b.value().toDouble();
    double ex = xv.toDouble();
    if (base > 0.0) {
      double y = std::pow(base, ex);
      if (std::isfinite(y)) return Expr::real(y);
    }
  }
  bool intExp = x.isConstant() && x.value().isExact() && x.value().isInteger();
  if (intExp && b.kind() == NodeKind::Power) {
    // (u^v)^n = u^(v n) for integer n
    Expr mergedExp = normalizeProduct({b.exponent(), x});
    return normalizePower(b.base(), mergedExp);
  }
  if (intExp && b.kind() == NodeKind::Product) {
    std::vector<Expr> fac;
    fac.reserve(b.kids().size());
    for (const auto& k : b.kids()) fac.push_back(normalizePower(k, x));
    return normalizeProduct(std::move(fac));
  }
  if (intExp && b.kind() == NodeKind::Sum) {
    std::int64_t n = x.value().asInteger();
    if (n >= 2 && n <= kExpandPowLimit) {
      std::vector<std::vector<Expr>> lists(
          static_cast<std::size_t>(n), b.kids());
      auto expanded = expandTermLists(lists, {}, Number::exact(1));
      if (expanded) return *expanded;
    }
  }
  return Expr::pow(b, x);
}

// ---------------------------------------------------------------------------
// Product

struct FactorAcc {
  Number coeff = Number::exact(1);
  ExprMap<std::vector<Expr>> exps;  // base -> exponent summands
};

void accumulateFactor(FactorAcc& acc, const Expr& f) {
  if (f.isConstant()) {
    acc.coeff = Number::mul(acc.coeff, f.value());
    return;
  }
  auto [base, exp] = asPowImpl(f);
  acc.exps.at(base).push_back(exp);
}

Expr normalizeProduct(std::vector<Expr> factors) {
  // flatten and accumulate
  FactorAcc acc;
  std::vector<Expr> sums;          // expandable sum factors (exponent 1)
  std::vector<std::vector<Expr>> sumLists;
  bool hasNegExp = false;
  std::vector<Expr> flat;
  for (auto& f : factors) {
    if (f.kind() == NodeKind::Product) {
      for (const auto& k : f.kids()) flat.push_back(k);
    } else {
      flat.push_back(f);
    }
  }
  for (const auto& f : flat) {
    auto [base, exp] = asPowImpl(f);
    if (exp.isConstant() && exp.value().isNegative()) hasNegExp = true;
  }
  // expansion pass: distribute sums unless a denominator is present
  // (fraction combination owns that direction; expanding would undo it)
  if (!hasNegExp) {
    std::vector<Expr> other;
    Number coeff = Number::exact(1);
    for (const auto& f : flat) {
      if (f.isConstant()) {
        coeff = Number::mul(coeff, f.value());
        continue;
      }
      if (f.kind() == NodeKind::Sum) {
        sumLists.push_back(f.kids());
        continue;
      }
      if (f.kind() == NodeKind::Power && f.base().kind() == NodeKind::Sum &&
          f.exponent().isConstant() && f.exponent().value().isExact() &&
          f.exponent().value().isInteger()) {
        std::int64_t n = f.exponent().value().asInteger();
        if (n >= 1 && n <= kExpandPowLimit) {
          for (std::int64_t i = 0; i < n; ++i) sumLists.push_back(f.base().kids());
          continue;
        }
      }
      other.push_back(f);
    }
    if (!sumLists.empty()) {
      auto expanded = expandTermLists(sumLists, other, coeff);
      if (expanded) return *expanded;
    }
  }
  for (const auto& f : flat) accumulateFactor(acc, f);

  if (acc.coeff.isZero()) return Expr();

  std::vector<Expr> out;
  for (auto& [base, expList] : acc.exps.entries()) {
    Expr exp = normalizeSum(std::move(expList));
    if (exp.isZero()) continue;
    Expr f = normalizePower(base, exp);
    if (f.isConstant()) {
      acc.coeff = Number::mul(acc.coeff, f.value());
      continue;
    }
    // merged powers may re-expose product structure, e.g. (x*y)^2
    if (f.kind() == NodeKind::Product) {
      for (const auto& k : f.kids()) {
        if (k.isConstant()) {
          acc.coeff = Number::mul(acc.coeff, k.value());
        } else {
          out.push_back(k);
        }
      }
    } else {
      out.push_back(f);
    }
  }
  if (acc.coeff.isZero()) return Expr();
  std::sort(out.begin(), out.end(),
            [](const Expr& a, const Expr& b) { return Expr::compare(a, b) < 0; });
  if (out.empty()) return Expr::constant(acc.coeff);
  if (!acc.coeff.isOne()) {
    out.insert(out.begin(), Expr::constant(acc.coeff));
  }
  return Expr::product(std::move(out));
}

// ---------------------------------------------------------------------------
// exact multivariate polynomial division (for numerator/denominator
// cancellation of sum factors, e.g. (A x^3 - A x y^2 + ...)/(x^2 - y^2))

struct Mono {
  std::vector<int> e;  // exponents over a shared atomic-base list
  Rational c;
};

bool monoDivides(const Mono& a, const Mono& b) {  // a | b
  for (std::size_t i = 0; i < a.e.size(); ++i) {
    if (a.e[i] > b.e[i]) return false;
  }
  return true;
}

/// graded lexicographic order, highest first
bool monoGreater(const Mono& a, const Mono& b) {
  int da = 0, db = 0;
  for (std::size_t i = 0; i < a.e.size(); ++i) {
    da += a.e[i];
    db += b.e[i];
  }
  if (da != db) return da > db;
  for (std::size_t i = 0; i < a.e.size(); ++i) {
    if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
  }
  return false;
}

class PolyView {
 public:
  /// Register terms of a sum as exponent vectors over a growing base list.
  /// Fails on inexact coefficients or non-integer / negative exponents.
  static bool collect(const Expr& e, std::vector<Expr>& bases,
                      std::vector<Mono>& out) {
    for (const auto& term : sumTerms(e)) {
      auto [coeff, monic] = splitCoeffImpl(term);
      if (!coeff.isExact()) return false;
      Mono mono;
      mono.c = coeff.rat();
      mono.e.assign(bases.size(), 0);
      if (!monic.isOne()) {
        for (const auto& f : productFactors(monic)) {
          auto [base, exp] = asPowImpl(f);
          if (!exp.isConstant() || !exp.value().isExact() ||
              !exp.value().isInteger()) {
            return false;
          }
          std::int64_t k = exp.value().asInteger();
          if (k <= 0 || k > 64) return false;
          std::size_t idx = 0;
          for (; idx < bases.size(); ++idx) {
            if (bases[idx].same(base)) break;
          }
          if (idx == bases.size()) {
            bases.push_back(base);
            for (auto& m2 : out) m2.e.push_back(0);
            mono.e.push_back(0);
          }
          mono.e[idx] += static_cast<int>(k);
        }
      }
      out.push_back(std::move(mono));
    }
    return true;
  }
};

void monoNormalize(std::vector<Mono>& p) {
  std::sort(p.begin(), p.end(), monoGreater);
  std::vector<Mono> merged;
  for (auto& m2 : p) {
    if (!merged.empty() && merged.back().e == m2.e) {
      auto s = Rational::add(merged.back().c, m2.c);
      if (!s) continue;  // overflow: keep separate, harmless
      merged.back().c = *s;
    } else {
      merged.push_back(m2);
    }
  }
  p.clear();
  for (auto& m2 : merged) {
    if (!m2.c.isZero()) p.push_back(m2);
  }
}

/// num / div exactly, or nullopt when the division does not come out even.
std::optional<std::vector<Mono>> polyDivide(std::vector<Mono> rem,
                                            std::vector<Mono> div) {
  if (div.empty()) return std::nullopt;
  monoNormalize(rem);
  monoNormalize(div);
  if (div.empty()) return std::nullopt;
  std::vector<Mono> quot;
  const Mono& lead = div.front();
  int guard = 0;
  while (!rem.empty()) {
    if (++guard > 2000) return std::nullopt;
    const Mono& top = rem.front();
    if (!monoDivides(lead, top)) return std::nullopt;
    Mono q;
    q.e.resize(top.e.size());
    for (std::size_t i = 0; i < top.e.size(); ++i) {
      q.e[i] = top.e[i] - lead.e[i];
    }
    auto leadInv = lead.c.inv();
    if (!leadInv) return std::nullopt;
    auto qc = Rational::mul(top.c, *leadInv);
    if (!qc) return std::nullopt;
    q.c = *qc;
    quot.push_back(q);
    for (const auto& d : div) {
      Mono sub;
      sub.e.resize(q.e.size());
      for (std::size_t i = 0; i < q.e.size(); ++i) sub.e[i] = q.e[i] + d.e[i];
      auto c = Rational::mul(q.c, d.c);
      if (!c) return std::nullopt;
      sub.c = c->neg();
      rem.push_back(sub);
    }
    monoNormalize(rem);
  }
  return quot;
}

Expr monosToExpr(const std::vector<Mono>& monos,
                 const std::vector<Expr>& bases) {
  std::vector<Expr> terms;
  for (const auto& m2 : monos) {
    std::vector<Expr> fac;
    fac.push_back(Expr::constant(Number::exact(m2.c)));
    for (std::size_t i = 0; i < bases.size(); ++i) {
      if (m2.e[i] == 0) continue;
      fac.push_back(normalizePower(bases[i], Expr::integer(m2.e[i])));
    }
    terms.push_back(normalizeProduct(std::move(fac)));
  }
  return normalizeSum(std::move(terms));
}

/// Try num / base exactly, treating both as polynomials over atomic bases.
std::optional<Expr> tryPolyQuotient(const Expr& num, const Expr& base) {
  if (base.kind() != NodeKind::Sum) return std::nullopt;
  if (num.kind() != NodeKind::Sum && num.kind() != NodeKind::Product)
    return std::nullopt;
  std::vector<Expr> bases;
  std::vector<Mono> numP, divP;
  if (!PolyView::collect(num, bases, numP)) return std::nullopt;
  if (!PolyView::collect(base, bases, divP)) return std::nullopt;
  for (auto& m2 : numP) m2.e.resize(bases.size(), 0);
  for (auto& m2 : divP) m2.e.resize(bases.size(), 0);
  auto q = polyDivide(std::move(numP), std::move(divP));
  if (!q) return std::nullopt;
  return monosToExpr(*q, bases);
}

// ---------------------------------------------------------------------------
// fraction combination over a common denominator

struct TermParts {
  Number coeff = Number::exact(1);
  std::vector<Expr> num;                          // numerator factors
  std::vector<std::pair<Expr, Number>> den;       // base -> positive exponent
};

TermParts splitFraction(const Number& coeff, const Expr& monic) {
  TermParts p;
  p.coeff = coeff;
  if (monic.isOne()) return p;
  for (const auto& f : productFactors(monic)) {
    auto [base, exp] = asPowImpl(f);
    if (exp.isConstant() && exp.value().isExact() &&
        exp.value().isNegative()) {
      p.den.emplace_back(base, exp.value().neg());
    } else {
      p.num.push_back(f);
    }
  }
  return p;
}

std::optional<Expr> combineFractions(
    const std::vector<std::pair<Expr, Number>>& termList) {
  std::vector<TermParts> parts;
  bool anyDen = false;
  for (const auto& [monic, coeff] : termList) {
    parts.push_back(splitFraction(coeff, monic));
    anyDen = anyDen || !parts.back().den.empty();
  }
  if (!anyDen || parts.size() < 2) return std::nullopt;

  // least common denominator: per base, the maximal exponent
  ExprMap<Number> lcd;
  for (const auto& p : parts) {
    for (const auto& [base, exp] : p.den) {
      Number& cur = lcd.at(base);
      if (cur.isZero() || Number::compare(cur, exp) < 0) cur = exp;
    }
  }

  std::vector<Expr> numTerms;
  for (const auto& p : parts) {
    std::vector<Expr> fac;
    fac.push_back(Expr::constant(p.coeff));
    for (const auto& f : p.num) fac.push_back(f);
    for (auto& [base, maxExp] : lcd.entries()) {
      Number have = Number::exact(0);
      for (const auto& [b2, e2] : p.den) {
        if (b2.same(base)) { have = e2; break; }
      }
      Number boost = Number::add(maxExp, have.neg());
      if (!boost.isZero()) {
        fac.push_back(normalizePower(base, Expr::constant(boost)));
      }
    }
    numTerms.push_back(normalizeProduct(std::move(fac)));
  }
  Expr num = normalizeSum(std::move(numTerms));
  if (num.isZero()) return num;

  // factor cancellation between numerator and denominator
  auto [numCoeff, numMonic] = splitCoeffImpl(num);
  std::vector<std::pair<Expr, Number>> remaining;
  for (auto& [base, lexp] : lcd.entries()) remaining.emplace_back(base, lexp);

  // explicit shared factors: of the product numerator directly, of a sum
  // numerator through the common factor of every summand
  std::vector<std::pair<Expr, Number>> numFactors;
  if (numMonic.kind() == NodeKind::Sum) {
    bool first = true;
    for (const auto& t : sumTerms(numMonic)) {
      auto [c, mm] = splitCoeffImpl(t);
      (void)c;
      std::vector<std::pair<Expr, Number>> cur;
      for (const auto& f : productFactors(mm)) {
        auto [base, exp] = asPowImpl(f);
        if (exp.isConstant() && exp.value().isExact() &&
            !exp.value().isNegative()) {
          cur.emplace_back(base, exp.value());
        }
      }
      if (first) {
        numFactors = cur;
        first = false;
      } else {
        std::vector<std::pair<Expr, Number>> keep;
        for (const auto& [base, exp] : numFactors) {
          for (const auto& [b2, e2] : cur) {
            if (b2.same(base)) {
              keep.emplace_back(base, Number::compare(exp, e2) < 0 ? exp : e2);
              break;
            }
          }
        }
        numFactors = keep;
      }
      if (numFactors.empty()) break;
    }
  } else {
    for (const auto& f : productFactors(numMonic)) {
      auto [base, exp] = asPowImpl(f);
      if (exp.isConstant() && exp.value().isExact()) {
        numFactors.emplace_back(base, exp.value());
      }
    }
  }
  for (auto& [base, lexp] : remaining) {
    Number cancelExp = Number::exact(0);
    for (const auto& [nb, nexp] : numFactors) {
      if (nb.same(base)) {
        cancelExp = Number::compare(nexp, lexp) < 0 ? nexp : lexp;
        break;
      }
    }
    if (cancelExp.isZero() || cancelExp.isNegative()) continue;
    Expr divisor = normalizePower(base, Expr::constant(cancelExp.neg()));
    Expr reduced;
    if (numMonic.kind() == NodeKind::Sum) {
      std::vector<Expr> terms;
      for (const auto& t : sumTerms(numMonic)) {
        terms.push_back(normalizeProduct({t, divisor}));
      }
      reduced = normalizeSum(std::move(terms));
    } else {
      reduced = normalizeProduct({numMonic, divisor});
    }
    auto [c2, m2] = splitCoeffImpl(reduced);
    numCoeff = Number::mul(numCoeff, c2);
    numMonic = m2;
    lexp = Number::add(lexp, cancelExp.neg());
  }

  // exact polynomial division against composite (sum) denominator factors,
  // e.g. (P x^3 + P x y^2 + ...)/(x^2 - y^2)
  for (auto& [base, lexp] : remaining) {
    while (base.kind() == NodeKind::Sum && lexp.isExact() &&
           lexp.isInteger() && lexp.asInteger() >= 1) {
      auto q = tryPolyQuotient(numMonic, base);
      if (!q) break;
      auto [c2, m2] = splitCoeffImpl(*q);
      numCoeff = Number::mul(numCoeff, c2);
      numMonic = m2;
      lexp = Number::add(lexp, Number::exact(Rational(-1)));
    }
  }

  std::vector<Expr> resultFac;
  resultFac.push_back(Expr::constant(numCoeff));
  if (!numMonic.isOne()) {
    if (numMonic.kind() == NodeKind::Product) {
      for (const auto& f : numMonic.kids()) resultFac.push_back(f);
    } else {
      resultFac.push_back(numMonic);
    }
  }
  for (auto& [base, lexp] : remaining) {
    if (!lexp.isZero()) {
      resultFac.push_back(normalizePower(base, Expr::constant(lexp.neg())));
    }
  }
  return normalizeProduct(std::move(resultFac));
}

// ---------------------------------------------------------------------------
// Sum

Expr normalizeSum(std::vector<Expr> terms) {
  Number constant = Number::exact(0);
  ExprMap<Number> byMonic;
  // flatten plain sums and scaled sums c*(a + b + ...) alike
  std::vector<Expr> work(terms.rbegin(), terms.rend());
  std::vector<Expr> flat;
  while (!work.empty()) {
    Expr t = work.back();
    work.pop_back();
    if (t.kind() == NodeKind::Sum) {
      for (auto it = t.kids().rbegin(); it != t.kids().rend(); ++it)
        work.push_back(*it);
      continue;
    }
    auto [coeff, monic] = splitCoeffImpl(t);
    if (monic.kind() == NodeKind::Sum) {
      Expr c = Expr::constant(coeff);
      for (auto it = monic.kids().rbegin(); it != monic.kids().rend(); ++it)
        work.push_back(normalizeProduct({c, *it}));
      continue;
    }
    flat.push_back(t);
  }
  for (const auto& t : flat) {
    if (t.isConstant()) {
      constant = Number::add(constant, t.value());
      continue;
    }
    auto [coeff, monic] = splitCoeffImpl(t);
    Number& slot = byMonic.at(monic);
    slot = Number::add(slot, coeff);
  }

  std::vector<std::pair<Expr, Number>> kept;
  for (auto& [monic, coeff] : byMonic.entries()) {
    if (!coeff.isZero()) kept.emplace_back(monic, coeff);
  }
  if (!constant.isZero()) {
    kept.emplace_back(Expr::integer(1), constant);
  }
  if (kept.empty()) return Expr();

  if (auto combined = combineFractions(kept)) return *combined;

  // deterministic order keyed on the monic part; negation-covariant so that
  // s and -s reduce to the same monic sum up to the extracted constant
  std::sort(kept.begin(), kept.end(),
            [](const std::pair<Expr, Number>& a,
               const std::pair<Expr, Number>& b) {
              return Expr::compare(a.first, b.first) < 0;
            });

  // rational content extraction keeps sums monic so that equal sums match
  // structurally up to an overall constant
  bool allExact = true;
  for (const auto& [m, c] : kept) {
    (void)m;
    allExact = allExact && c.isExact();
  }
  Rational content(1);
  if (allExact && kept.size() >= 2) {
    std::optional<Rational> g;
    for (const auto& [m, c] : kept) {
      (void)m;
      g = g ? ratGcd(*g, c.rat()) : std::optional<Rational>(
                                        c.rat().isNegative() ? c.rat().neg()
                                                             : c.rat());
      if (!g) break;
    }
    if (g && !g->isZero()) {
      content = kept.front().second.isNegative() ? g->neg() : *g;
      if (!content.isOne()) {
        auto inv = content.inv();
        bool ok = inv.has_value();
        std::vector<std::pair<Expr, Number>> scaled;
        if (ok) {
          scaled.reserve(kept.size());
          for (const auto& [monic, coeff] : kept) {
            auto s = Rational::mul(coeff.rat(), *inv);
            if (!s) { ok = false; break; }
            scaled.emplace_back(monic, Number::exact(*s));
          }
        }
        if (ok) {
          kept = std::move(scaled);
        } else {
          content = Rational(1);
        }
      }
    }
  }

  std::vector<Expr> out;
  out.reserve(kept.size());
  for (auto& [monic, coeff] : kept) {
    out.push_back(makeTerm(coeff, monic));
  }
  std::sort(out.begin(), out.end(),
            [](const Expr& a, const Expr& b) { return Expr::compare(a, b) < 0; });
  Expr inner = Expr::sum(std::move(out));
  if (content.isOne()) return inner;
  return Expr::product({Expr::constant(Number::exact(content)), inner});
}

Expr normalize(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Sym:
      return e;
    case NodeKind::Sum: {
      std::vector<Expr> kids;
      kids.reserve(e.kids().size());
      for (const auto& k : e.kids()) kids.push_back(normalize(k));
      return normalizeSum(std::move(kids));
    }
    case NodeKind::Product: {
      std::vector<Expr> kids;
      kids.reserve(e.kids().size());
      for (const auto& k : e.kids()) kids.push_back(normalize(k));
      return normalizeProduct(std::move(kids));
    }
    case NodeKind::Power:
      return normalizePower(normalize(e.base()), normalize(e.exponent()));
    case NodeKind::Apply:
      return normalizeApply(e.func(), normalize(e.arg()));
  }
  return e;
}

}  // namespace

Expr simplify(const Expr& e) {
  Expr cur = e;
  for (int iter = 0; iter < 4; ++iter) {
    Expr next = normalize(cur);
    if (next.same(cur)) return next;
    cur = next;
  }
  return cur;
}

std::vector<Expr> sumTerms(const Expr& e) {
  if (e.kind() == NodeKind::Sum) return e.kids();
  return {e};
}

std::vector<Expr> productFactors(const Expr& e) {
  if (e.kind() == NodeKind::Product) return e.kids();
  return {e};
}

std::pair<Number, Expr> splitCoeff(const Expr& e) { return splitCoeffImpl(e); }

std::pair<Expr, Expr> asPow(const Expr& f) { return asPowImpl(f); }

}  // namespace ostro
