#ifndef OSTRO_EXPR_HPP
#define OSTRO_EXPR_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ostro/rational.hpp"
#include "ostro/symbol.hpp"

namespace ostro {

enum class NodeKind : std::uint8_t { Constant, Sym, Sum, Product, Power, Apply };

enum class Func : std::uint8_t { Sqrt, Atanh, Tanh, Sin, Cos, Exp, Ln, Abs };

const char* funcName(Func f);

/// Numeric constant that stays an exact rational until a transcendental
/// operation forces floating point.
class Number {
 public:
  Number() : exact_(true), rat_(0), val_(0.0) {}
  static Number exact(const Rational& r) {
    Number n;
    n.exact_ = true;
    n.rat_ = r;
    n.val_ = r.toDouble();
    return n;
  }
  static Number real(double v) {
    Number n;
    n.exact_ = false;
    n.val_ = v;
    return n;
  }

  bool isExact() const { return exact_; }
  const Rational& rat() const { return rat_; }
  double toDouble() const { return val_; }

  bool isZero() const { return exact_ ? rat_.isZero() : val_ == 0.0; }
  bool isOne() const { return exact_ ? rat_.isOne() : val_ == 1.0; }
  bool isInteger() const;
  std::int64_t asInteger() const;  // valid only when isInteger()
  bool isNegative() const { return exact_ ? rat_.isNegative() : val_ < 0.0; }

  Number neg() const;
  static Number add(const Number& a, const Number& b);
  static Number mul(const Number& a, const Number& b);
  static Number div(const Number& a, const Number& b);
  /// a^b when it can be folded; exponent must be numeric.
  static Number pow(const Number& a, const Number& b);

  friend bool operator==(const Number& a, const Number& b);
  /// Deterministic total order (value first, then exactness).
  static int compare(const Number& a, const Number& b);

 private:
  bool exact_;
  Rational rat_;
  double val_;
};

struct ExprNode;

/// Immutable symbolic expression handle with value semantics. Trees are
/// shared; nothing mutates a node after construction, so expressions are
/// safe to evaluate concurrently.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr integer(std::int64_t n) { return constant(Number::exact(n)); }
  static Expr rational(std::int64_t n, std::int64_t d) {
    return constant(Number::exact(Rational(n, d)));
  }
  static Expr real(double v) { return constant(Number::real(v)); }
  static Expr constant(const Number& n);
  static Expr sym(const Symbol& s);
  static Expr sum(std::vector<Expr> kids);
  static Expr product(std::vector<Expr> kids);
  static Expr pow(const Expr& base, const Expr& exponent);
  static Expr apply(Func f, const Expr& arg);

  NodeKind kind() const;
  const Number& value() const;            // Constant nodes
  const Symbol& symbol() const;           // Sym nodes
  const std::vector<Expr>& kids() const;  // all composite nodes
  const Expr& base() const { return kids()[0]; }
  const Expr& exponent() const { return kids()[1]; }
  const Expr& arg() const { return kids()[0]; }
  Func func() const;

  bool isConstant() const { return kind() == NodeKind::Constant; }
  bool isZero() const;
  bool isOne() const;
  bool isInteger(std::int64_t v) const;

  std::size_t hash() const;
  /// Structural equality.
  bool same(const Expr& other) const;
  /// Deterministic total order; defines canonical child ordering.
  static int compare(const Expr& a, const Expr& b);

  void forEachSymbol(const std::function<void(const Symbol&)>& fn) const;
  std::vector<Symbol> freeSymbols() const;
  bool dependsOn(const Symbol& s) const;
  /// Highest derivative order among Deriv symbols; -1 when none appear.
  int maxDerivOrder() const;
  bool hasKind(SymbolKind k) const;
  std::size_t nodeCount() const;

  std::string str() const;

  const ExprNode* node() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  NodeKind kind;
  Number value;            // Constant
  Symbol symbol;           // Sym
  Func func = Func::Sqrt;  // Apply
  std::vector<Expr> kids;  // Sum/Product: n-ary; Power: {base, exp}; Apply: {arg}
  std::size_t hash = 0;
};

// Convenience builders; these do not simplify beyond trivial identities.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr dot(const std::vector<Expr>& a, const std::vector<Expr>& b);

/// Replace symbols by expressions throughout (no simplification).
Expr substitute(const Expr& e,
                const std::vector<std::pair<Symbol, Expr>>& map);

std::string to_string(const Expr& e);

}  // namespace ostro

#endif
