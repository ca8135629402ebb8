#include "ostro/parse.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>

#include "ostro/error.hpp"

namespace ostro {

namespace {

std::optional<Func> lookupFunc(const std::string& name) {
  if (name == "sqrt") return Func::Sqrt;
  if (name == "atanh") return Func::Atanh;
  if (name == "tanh") return Func::Tanh;
  if (name == "sin") return Func::Sin;
  if (name == "cos") return Func::Cos;
  if (name == "exp") return Func::Exp;
  if (name == "ln") return Func::Ln;
  if (name == "abs") return Func::Abs;
  return std::nullopt;
}

class Parser {
 public:
  Parser(const std::string& text, const Chart& chart)
      : text_(text), chart_(chart) {}

  Expr run() {
    skipSpace();
    Expr e = parseSum();
    skipSpace();
    if (pos_ < text_.size()) {
      throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'",
                        pos_ + 1);
    }
    // Symbol resolution is deferred so that structural errors win, e.g.
    // "foo(" reports the stray parenthesis, not the unknown name.
    if (firstUnknown_) throw *firstUnknown_;
    return e;
  }

 private:
  Expr parseSum() {
    Expr e = parseTerm();
    for (;;) {
      skipSpace();
      if (peek() == '+') {
        ++pos_;
        Expr rhs = parseTerm();
        e = Expr::sum({e, rhs});
      } else if (peek() == '-') {
        ++pos_;
        Expr rhs = parseTerm();
        e = Expr::sum({e, -rhs});
      } else {
        return e;
      }
    }
  }

  Expr parseTerm() {
    Expr e = parseUnary();
    for (;;) {
      skipSpace();
      if (peek() == '*') {
        ++pos_;
        Expr rhs = parseUnary();
        e = Expr::product({e, rhs});
      } else if (peek() == '/') {
        ++pos_;
        Expr rhs = parseUnary();
        e = e / rhs;
      } else {
        return e;
      }
    }
  }

  Expr parseUnary() {
    skipSpace();
    if (peek() == '-') {
      ++pos_;
      return -parseUnary();
    }
    if (peek() == '+') {
      ++pos_;
      return parseUnary();
    }
    return parsePower();
  }

  Expr parsePower() {
    Expr base = parseAtom();
    skipSpace();
    if (peek() == '^') {
      ++pos_;
      Expr expo = parseUnary();  // right-associative, allows x^-2
      return Expr::pow(base, expo);
    }
    return base;
  }

  Expr parseAtom() {
    skipSpace();
    char c = peek();
    if (c == '\0') throw SyntaxError("unexpected end of input", pos_ + 1);
    if (c == '(') {
      ++pos_;
      Expr e = parseSum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parseNumber();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parseNameAtom();
    }
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_ + 1);
  }

  Expr parseNumber() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    bool hasFrac = false;
    if (peek() == '.') {
      hasFrac = true;
      ++pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    std::int64_t exp10 = 0;
    bool hasExp = false;
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      ++pos_;
      bool negExp = false;
      if (peek() == '+' || peek() == '-') {
        negExp = peek() == '-';
        ++pos_;
      }
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        hasExp = true;
        std::int64_t v = 0;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          v = v * 10 + (text_[pos_] - '0');
          ++pos_;
        }
        exp10 = negExp ? -v : v;
      } else {
        pos_ = save;  // a name follows, e.g. "2*e0" would be odd but legal-ish
      }
    }
    std::string tok = text_.substr(start, pos_ - start);
    // Exact rational when the literal is short enough; double otherwise.
    std::string digits;
    bool afterPoint = false;
    for (char ch : tok) {
      if (ch == '.') {
        afterPoint = true;
        continue;
      }
      if (ch == 'e' || ch == 'E') break;
      digits += ch;
      if (afterPoint) --exp10;
    }
    if (digits.empty()) {
      throw SyntaxError("malformed number", start + 1);
    }
    if (digits.size() <= 17) {
      std::int64_t mant = std::strtoll(digits.c_str(), nullptr, 10);
      Rational r(mant);
      bool ok = true;
      std::int64_t e = exp10;
      while (e > 0 && ok) {
        auto m = Rational::mul(r, Rational(10));
        ok = m.has_value();
        if (ok) r = *m;
        --e;
      }
      while (e < 0 && ok) {
        auto m = Rational::mul(r, Rational(1, 10));
        ok = m.has_value();
        if (ok) r = *m;
        ++e;
      }
      if (ok) return Expr::constant(Number::exact(r));
    }
    (void)hasFrac;
    (void)hasExp;
    return Expr::real(std::strtod(tok.c_str(), nullptr));
  }

  Expr parseNameAtom() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (auto f = lookupFunc(name)) {
      skipSpace();
      expect('(');
      Expr a = parseSum();
      expect(')');
      return Expr::apply(*f, a);
    }
    Symbol s = chart_.find(name);
    if (!s.valid()) {
      if (!firstUnknown_) {
        firstUnknown_.emplace(name, start + 1);
      }
      return Expr();  // placeholder; the recorded error is thrown at the end
    }
    return Expr::sym(s);
  }

  void expect(char c) {
    skipSpace();
    if (peek() != c) {
      throw SyntaxError(std::string("expected '") + c + "'", pos_ + 1);
    }
    ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  const std::string& text_;
  const Chart& chart_;
  std::size_t pos_ = 0;
  std::optional<UnknownSymbolError> firstUnknown_;
};

}  // namespace

Expr parse(const std::string& text, const Chart& chart) {
  return Parser(text, chart).run();
}

}  // namespace ostro
