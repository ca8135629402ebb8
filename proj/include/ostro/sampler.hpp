#ifndef OSTRO_SAMPLER_HPP
#define OSTRO_SAMPLER_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "ostro/expr.hpp"
#include "ostro/numeric.hpp"
#include "ostro/symbol.hpp"

namespace ostro {

/// Deterministic RNG; the uniform draw is built from raw mt19937_64 bits so
/// that identical seeds give byte-identical runs across standard libraries.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : eng_(seed) {}
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 eng_;
};

/// Where admissible points live: a box per symbol, inequality guards
/// (each expression must evaluate > margin), and a rejection budget.
struct SampleDomain {
  std::vector<Expr> guards;
  double lo = -2.0;
  double hi = 2.0;
  double margin = 0.0;
  int maxTriesPerPoint = 4000;
};

/// Rejection-sample a binding for `symbols` uniform over the box, retrying
/// until every guard holds with the requested margin and every probe
/// expression evaluates without domain errors.
/// Throws Err::SamplerExhausted when the budget runs out.
Binding sampleAdmissible(const std::vector<Symbol>& symbols,
                         const SampleDomain& domain,
                         const std::vector<Expr>& probes, DetRng& rng,
                         const ChartPtr& chart);

/// Numeric identity check at seeded random admissible points:
/// true iff |a - b| <= tol * (1 + |a|) at every sampled binding.
bool equalProbabilistic(const Expr& a, const Expr& b, const ChartPtr& chart,
                        const SampleDomain& domain, int trials = 8,
                        double tol = 1e-9, std::uint64_t seed = 0);

}  // namespace ostro

#endif
