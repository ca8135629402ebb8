#ifndef OSTRO_NUMERIC_HPP
#define OSTRO_NUMERIC_HPP

#include <functional>
#include <vector>

#include "ostro/expr.hpp"
#include "ostro/symbol.hpp"

namespace ostro {

/// Dense symbol-to-value assignment over one chart.
class Binding {
 public:
  explicit Binding(const ChartPtr& chart)
      : chart_(chart),
        vals_(static_cast<std::size_t>(chart->slotCount()), 0.0),
        set_(static_cast<std::size_t>(chart->slotCount()), 0) {}

  void set(const Symbol& s, double v) {
    vals_[static_cast<std::size_t>(s.slot())] = v;
    set_[static_cast<std::size_t>(s.slot())] = 1;
  }
  bool has(const Symbol& s) const {
    return set_[static_cast<std::size_t>(s.slot())] != 0;
  }
  double get(const Symbol& s) const {
    return vals_[static_cast<std::size_t>(s.slot())];
  }
  const ChartPtr& chart() const { return chart_; }

 private:
  ChartPtr chart_;
  std::vector<double> vals_;
  std::vector<char> set_;
};

/// Evaluate to a finite real; throws DomainError when an argument leaves a
/// function's domain (atanh with |a| >= 1, sqrt of a negative, ln of a
/// non-positive, division by zero) or the result is not finite, and throws
/// with the symbol name when the binding does not cover a free symbol.
double evaluate(const Expr& e, const Binding& b);

/// Central finite difference of f at x with step h.
double centralDiff(const std::function<double(double)>& f, double x, double h);

/// Richardson-improved central difference using steps h and h/2.
double centralDiffRichardson(const std::function<double(double)>& f, double x,
                             double h);

/// Step policy used throughout the project: h = scale * (1 + |x|).
inline double fdStep(double x, double scale = 1e-5) {
  return scale * (1.0 + (x < 0 ? -x : x));
}

}  // namespace ostro

#endif
