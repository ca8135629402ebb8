#include "ostro/expr.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <sstream>

namespace ostro {

const char* funcName(Func f) {
  switch (f) {
    case Func::Sqrt: return "sqrt";
    case Func::Atanh: return "atanh";
    case Func::Tanh: return "tanh";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Abs: return "abs";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Number

bool Number::isInteger() const {
  if (exact_) return rat_.isInteger();
  return std::isfinite(val_) && val_ == std::floor(val_) &&
         std::abs(val_) < 9.0e15;
}

std::int64_t Number::asInteger() const {
  return exact_ ? rat_.num() : static_cast<std::int64_t>(val_);
}

Number Number::neg() const {
  return exact_ ? exact(rat_.neg()) : real(-val_);
}

Number Number::add(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    if (auto r = Rational::add(a.rat_, b.rat_)) return exact(*r);
  }
  return real(a.val_ + b.val_);
}

Number Number::mul(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    if (auto r = Rational::mul(a.rat_, b.rat_)) return exact(*r);
  }
  return real(a.val_ * b.val_);
}

Number Number::div(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_ && !b.rat_.isZero()) {
    if (auto inv = b.rat_.inv()) {
      if (auto r = Rational::mul(a.rat_, *inv)) return exact(*r);
    }
  }
  return real(a.val_ / b.val_);
}

Number Number::pow(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_ && b.rat_.isInteger()) {
    if (auto r = Rational::pow(a.rat_, b.rat_.num())) return exact(*r);
  }
  return real(std::pow(a.val_, b.val_));
}

bool operator==(const Number& a, const Number& b) {
  if (a.exact_ != b.exact_) return false;
  if (a.exact_) return a.rat_ == b.rat_;
  return a.val_ == b.val_;
}

int Number::compare(const Number& a, const Number& b) {
  if (a.val_ != b.val_) return a.val_ < b.val_ ? -1 : 1;
  if (a.exact_ != b.exact_) return a.exact_ ? -1 : 1;
  if (a.exact_) {
    if (a.rat_ == b.rat_) return 0;
    return a.rat_ < b.rat_ ? -1 : 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Node construction

namespace {

std::size_t hashCombine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hashNumber(const Number& n) {
  std::size_t h = std::hash<double>()(n.toDouble());
  if (n.isExact()) {
    h = hashCombine(h, std::hash<std::int64_t>()(n.rat().num()));
    h = hashCombine(h, std::hash<std::int64_t>()(n.rat().den()));
  }
  return h;
}

std::size_t computeHash(const ExprNode& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x100000001b3ULL + 1469598103934665603ULL;
  switch (n.kind) {
    case NodeKind::Constant:
      h = hashCombine(h, hashNumber(n.value));
      break;
    case NodeKind::Sym:
      h = hashCombine(h, std::hash<std::string>()(n.symbol.name()));
      h = hashCombine(h, static_cast<std::size_t>(n.symbol.kind()));
      break;
    case NodeKind::Apply:
      h = hashCombine(h, static_cast<std::size_t>(n.func));
      break;
    default:
      break;
  }
  for (const auto& k : n.kids) h = hashCombine(h, k.hash());
  return h;
}

std::shared_ptr<const ExprNode> makeNode(ExprNode n) {
  n.hash = computeHash(n);
  return std::make_shared<const ExprNode>(std::move(n));
}

const std::shared_ptr<const ExprNode>& zeroNode() {
  static const std::shared_ptr<const ExprNode> z = [] {
    ExprNode n;
    n.kind = NodeKind::Constant;
    n.value = Number::exact(0);
    return makeNode(std::move(n));
  }();
  return z;
}

}  // namespace

Expr::Expr() : node_(zeroNode()) {}

Expr Expr::constant(const Number& v) {
  ExprNode n;
  n.kind = NodeKind::Constant;
  n.value = v;
  return Expr(makeNode(std::move(n)));
}

Expr Expr::sym(const Symbol& s) {
  ExprNode n;
  n.kind = NodeKind::Sym;
  n.symbol = s;
  return Expr(makeNode(std::move(n)));
}

Expr Expr::sum(std::vector<Expr> kids) {
  if (kids.empty()) return Expr();
  if (kids.size() == 1) return kids[0];
  ExprNode n;
  n.kind = NodeKind::Sum;
  n.kids = std::move(kids);
  return Expr(makeNode(std::move(n)));
}

Expr Expr::product(std::vector<Expr> kids) {
  if (kids.empty()) return integer(1);
  if (kids.size() == 1) return kids[0];
  ExprNode n;
  n.kind = NodeKind::Product;
  n.kids = std::move(kids);
  return Expr(makeNode(std::move(n)));
}

Expr Expr::pow(const Expr& base, const Expr& exponent) {
  ExprNode n;
  n.kind = NodeKind::Power;
  n.kids = {base, exponent};
  return Expr(makeNode(std::move(n)));
}

Expr Expr::apply(Func f, const Expr& arg) {
  ExprNode n;
  n.kind = NodeKind::Apply;
  n.func = f;
  n.kids = {arg};
  return Expr(makeNode(std::move(n)));
}

NodeKind Expr::kind() const { return node_->kind; }
const Number& Expr::value() const { return node_->value; }
const Symbol& Expr::symbol() const { return node_->symbol; }
const std::vector<Expr>& Expr::kids() const { return node_->kids; }
Func Expr::func() const { return node_->func; }
std::size_t Expr::hash() const { return node_->hash; }

bool Expr::isZero() const {
  return kind() == NodeKind::Constant && value().isZero();
}

bool Expr::isOne() const {
  return kind() == NodeKind::Constant && value().isOne();
}

bool Expr::isInteger(std::int64_t v) const {
  return kind() == NodeKind::Constant && value().isExact() &&
         value().rat() == Rational(v);
}

bool Expr::same(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (node_->hash != other.node_->hash) return false;
  return compare(*this, other) == 0;
}

int Expr::compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  auto ka = a.kind(), kb = b.kind();
  if (ka != kb) return static_cast<int>(ka) < static_cast<int>(kb) ? -1 : 1;
  switch (ka) {
    case NodeKind::Constant: {
      int c = Number::compare(a.value(), b.value());
      if (c) return c;
      break;
    }
    case NodeKind::Sym: {
      int c = Symbol::compare(a.symbol(), b.symbol());
      if (c) return c;
      break;
    }
    case NodeKind::Apply: {
      if (a.func() != b.func())
        return static_cast<int>(a.func()) < static_cast<int>(b.func()) ? -1 : 1;
      break;
    }
    default:
      break;
  }
  const auto& as = a.kids();
  const auto& bs = b.kids();
  if (as.size() != bs.size()) return as.size() < bs.size() ? -1 : 1;
  for (std::size_t i = 0; i < as.size(); ++i) {
    int c = compare(as[i], bs[i]);
    if (c) return c;
  }
  return 0;
}

void Expr::forEachSymbol(const std::function<void(const Symbol&)>& fn) const {
  if (kind() == NodeKind::Sym) {
    fn(symbol());
    return;
  }
  for (const auto& k : kids()) k.forEachSymbol(fn);
}

std::vector<Symbol> Expr::freeSymbols() const {
  std::vector<Symbol> out;
  forEachSymbol([&](const Symbol& s) {
    for (const auto& o : out)
      if (o == s) return;
    out.push_back(s);
  });
  std::sort(out.begin(), out.end(), [](const Symbol& x, const Symbol& y) {
    return Symbol::compare(x, y) < 0;
  });
  return out;
}

bool Expr::dependsOn(const Symbol& s) const {
  if (kind() == NodeKind::Sym) return symbol() == s;
  for (const auto& k : kids())
    if (k.dependsOn(s)) return true;
  return false;
}

int Expr::maxDerivOrder() const {
  int best = -1;
  forEachSymbol([&](const Symbol& s) {
    if (s.kind() == SymbolKind::Deriv && s.order() > best) best = s.order();
  });
  return best;
}

bool Expr::hasKind(SymbolKind k) const {
  bool found = false;
  forEachSymbol([&](const Symbol& s) {
    if (s.kind() == k) found = true;
  });
  return found;
}

std::size_t Expr::nodeCount() const {
  std::size_t n = 1;
  for (const auto& k : kids()) n += k.nodeCount();
  return n;
}

// ---------------------------------------------------------------------------
// Convenience arithmetic

Expr operator+(const Expr& a, const Expr& b) {
  if (a.isZero()) return b;
  if (b.isZero()) return a;
  return Expr::sum({a, b});
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.isZero()) return a;
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.isZero() || b.isZero()) return Expr();
  if (a.isOne()) return b;
  if (b.isOne()) return a;
  return Expr::product({a, b});
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.isZero()) return Expr();
  if (b.isOne()) return a;
  return a * Expr::pow(b, Expr::integer(-1));
}

Expr operator-(const Expr& a) {
  if (a.isZero()) return a;
  if (a.isConstant()) return Expr::constant(a.value().neg());
  return Expr::integer(-1) * a;
}

Expr dot(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  assert(a.size() == b.size());
  Expr acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

Expr substitute(const Expr& e,
                const std::vector<std::pair<Symbol, Expr>>& map) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return e;
    case NodeKind::Sym:
      for (const auto& [s, repl] : map)
        if (s == e.symbol()) return repl;
      return e;
    default: {
      std::vector<Expr> kids;
      kids.reserve(e.kids().size());
      bool changed = false;
      for (const auto& k : e.kids()) {
        kids.push_back(substitute(k, map));
        changed = changed || !kids.back().same(k);
      }
      if (!changed) return e;
      switch (e.kind()) {
        case NodeKind::Sum: return Expr::sum(std::move(kids));
        case NodeKind::Product: return Expr::product(std::move(kids));
        case NodeKind::Power: return Expr::pow(kids[0], kids[1]);
        case NodeKind::Apply: return Expr::apply(e.func(), kids[0]);
        default: return e;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// precedence levels: sum 1, product 2, power 3, atom 4
constexpr int kPrecSum = 1, kPrecProduct = 2, kPrecPower = 3, kPrecAtom = 4;

std::string numberStr(const Number& n) {
  if (n.isExact()) {
    std::string s = std::to_string(n.rat().num());
    if (!n.rat().isInteger()) s += "/" + std::to_string(n.rat().den());
    return s;
  }
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), n.toDouble());
  return std::string(buf, res.ptr);
}

void printExpr(const Expr& e, int parentPrec, std::string& out);

void wrap(const Expr& e, int prec, int parentPrec, std::string& out) {
  if (prec < parentPrec) {
    out += "(";
    printExpr(e, 0, out);
    out += ")";
  } else {
    printExpr(e, parentPrec, out);
  }
}

bool isNegativeLeading(const Expr& e) {
  if (e.isConstant()) return e.value().isNegative();
  if (e.kind() == NodeKind::Product && !e.kids().empty() &&
      e.kids()[0].isConstant())
    return e.kids()[0].value().isNegative();
  return false;
}

Expr withoutLeadingSign(const Expr& e) {
  if (e.isConstant()) return Expr::constant(e.value().neg());
  if (e.kind() == NodeKind::Product && e.kids()[0].isConstant()) {
    std::vector<Expr> kids = e.kids();
    kids[0] = Expr::constant(kids[0].value().neg());
    if (kids[0].isOne() && kids.size() >= 2) {
      kids.erase(kids.begin());
    }
    return Expr::product(std::move(kids));
  }
  return e;
}

void printProduct(const Expr& e, int parentPrec, std::string& out) {
  // split numerator / denominator on the sign of constant integer exponents
  std::vector<Expr> num, den;
  Number coeff = Number::exact(1);
  bool haveCoeff = false;
  for (const auto& f : e.kids()) {
    if (f.isConstant()) {
      coeff = Number::mul(coeff, f.value());
      haveCoeff = true;
      continue;
    }
    if (f.kind() == NodeKind::Power && f.exponent().isConstant() &&
        f.exponent().value().isNegative()) {
      Expr flipped = Expr::pow(
          f.base(), Expr::constant(f.exponent().value().neg()));
      den.push_back(flipped);
      continue;
    }
    num.push_back(f);
  }

  std::string s;
  bool neg = coeff.isNegative();
  if (neg) coeff = coeff.neg();
  bool coeffOne = coeff.isOne();
  if (haveCoeff && (!coeffOne || num.empty())) {
    s += numberStr(coeff);
  }
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (!s.empty()) s += "*";
    std::string part;
    wrap(num[i], num[i].kind() == NodeKind::Sum ? kPrecSum
             : num[i].kind() == NodeKind::Product ? kPrecProduct
                                                  : kPrecAtom,
         kPrecProduct, part);
    s += part;
  }
  if (s.empty()) s = "1";
  if (!den.empty()) {
    std::string d;
    for (std::size_t i = 0; i < den.size(); ++i) {
      if (i) d += "*";
      std::string part;
      Expr f = den[i].exponent().isOne() ? den[i].base() : den[i];
      wrap(f, f.kind() == NodeKind::Sum ? kPrecSum
             : f.kind() == NodeKind::Product ? kPrecProduct
                                             : kPrecAtom,
           kPrecPower, part);
      d += part;
    }
    if (den.size() > 1) d = "(" + d + ")";
    s += "/" + d;
  }
  if (neg) s = "-" + s;
  int prec = neg ? kPrecSum : kPrecProduct;
  if (prec < parentPrec) {
    out += "(" + s + ")";
  } else {
    out += s;
  }
}

void printExpr(const Expr& e, int parentPrec, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Constant: {
      std::string s = numberStr(e.value());
      if (e.value().isNegative() && parentPrec >= kPrecProduct) {
        out += "(" + s + ")";
      } else {
        out += s;
      }
      break;
    }
    case NodeKind::Sym:
      out += e.symbol().name();
      break;
    case NodeKind::Sum: {
      std::string s;
      for (std::size_t i = 0; i < e.kids().size(); ++i) {
        const Expr& t = e.kids()[i];
        if (i == 0) {
          printExpr(t, kPrecSum, s);
        } else if (isNegativeLeading(t)) {
          s += " - ";
          printExpr(withoutLeadingSign(t), kPrecSum + 1, s);
        } else {
          s += " + ";
          printExpr(t, kPrecSum + 1, s);
        }
      }
      if (kPrecSum < parentPrec) {
        out += "(" + s + ")";
      } else {
        out += s;
      }
      break;
    }
    case NodeKind::Product:
      printProduct(e, parentPrec, out);
      break;
    case NodeKind::Power: {
      std::string s;
      wrap(e.base(),
           e.base().kind() == NodeKind::Sym ||
                   (e.base().isConstant() && !e.base().value().isNegative())
               ? kPrecAtom
               : 0,
           kPrecPower + 1, s);
      s += "^";
      const Expr& x = e.exponent();
      bool simple = (x.kind() == NodeKind::Sym) ||
                    (x.isConstant() && !x.value().isNegative() &&
                     x.value().isInteger());
      if (simple) {
        printExpr(x, kPrecAtom, s);
      } else {
        s += "(";
        printExpr(x, 0, s);
        s += ")";
      }
      if (kPrecPower < parentPrec) {
        out += "(" + s + ")";
      } else {
        out += s;
      }
      break;
    }
    case NodeKind::Apply:
      out += funcName(e.func());
      out += "(";
      printExpr(e.arg(), 0, out);
      out += ")";
      break;
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  printExpr(*this, 0, out);
  return out;
}

std::string to_string(const Expr& e) { return e.str(); }

}  // namespace ostro
