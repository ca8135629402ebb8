#ifndef OSTRO_RATIONAL_HPP
#define OSTRO_RATIONAL_HPP

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>

namespace ostro {

/// Exact rational number over int64 with overflow-checked arithmetic.
/// Operations that would overflow return std::nullopt so callers can
/// demote to floating point instead of silently wrapping.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { reduce(); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool isZero() const { return num_ == 0; }
  bool isOne() const { return num_ == 1 && den_ == 1; }
  bool isInteger() const { return den_ == 1; }
  bool isNegative() const { return num_ < 0; }

  double toDouble() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  static std::optional<Rational> add(const Rational& a, const Rational& b) {
    auto n1 = mul128(a.num_, b.den_);
    auto n2 = mul128(b.num_, a.den_);
    auto d = mul128(a.den_, b.den_);
    return fromParts(n1 + n2, d);
  }

  static std::optional<Rational> mul(const Rational& a, const Rational& b) {
    return fromParts(mul128(a.num_, b.num_), mul128(a.den_, b.den_));
  }

  Rational neg() const { return Rational(-num_, den_, NoReduce{}); }

  std::optional<Rational> inv() const {
    if (num_ == 0) return std::nullopt;
    std::int64_t n = den_, d = num_;
    if (d < 0) { n = -n; d = -d; }
    return Rational(n, d, NoReduce{});
  }

  /// a^k for integer k; nullopt on overflow or 0^negative.
  static std::optional<Rational> pow(const Rational& a, std::int64_t k) {
    if (k == 0) return Rational(1);
    Rational base = a;
    if (k < 0) {
      auto i = a.inv();
      if (!i) return std::nullopt;
      base = *i;
      k = -k;
    }
    Rational acc(1);
    for (std::int64_t i = 0; i < k; ++i) {
      auto m = mul(acc, base);
      if (!m) return std::nullopt;
      acc = *m;
    }
    return acc;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return mul128(a.num_, b.den_) < mul128(b.num_, a.den_);
  }

 private:
  struct NoReduce {};
  Rational(std::int64_t n, std::int64_t d, NoReduce) : num_(n), den_(d) {}

  static __int128 mul128(std::int64_t a, std::int64_t b) {
    return static_cast<__int128>(a) * static_cast<__int128>(b);
  }

  static std::optional<Rational> fromParts(__int128 n, __int128 d) {
    if (d == 0) return std::nullopt;
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    constexpr __int128 lim = INT64_MAX;
    if (n > lim || n < -lim || d > lim) return std::nullopt;
    return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d),
                    NoReduce{});
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  void reduce() {
    if (den_ == 0) { num_ = 0; den_ = 1; return; }  // caller must pre-check
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace ostro

#endif
