#include "ostro/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "ostro/error.hpp"

namespace ostro {

Binding sampleAdmissible(const std::vector<Symbol>& symbols,
                         const SampleDomain& domain,
                         const std::vector<Expr>& probes, DetRng& rng,
                         const ChartPtr& chart) {
  // guards may mention symbols that the caller's expressions do not
  std::vector<Symbol> all = symbols;
  for (const auto& g : domain.guards) {
    g.forEachSymbol([&](const Symbol& s) {
      if (std::find(all.begin(), all.end(), s) == all.end()) all.push_back(s);
    });
  }
  std::sort(all.begin(), all.end(), [](const Symbol& a, const Symbol& b) {
    return Symbol::compare(a, b) < 0;
  });

  for (int attempt = 0; attempt < domain.maxTriesPerPoint; ++attempt) {
    Binding b(chart);
    for (const auto& s : all) b.set(s, rng.uniform(domain.lo, domain.hi));
    bool ok = true;
    try {
      for (const auto& g : domain.guards) {
        if (evaluate(g, b) <= domain.margin) {
          ok = false;
          break;
        }
      }
      if (ok) {
        for (const auto& p : probes) (void)evaluate(p, b);
      }
    } catch (const DomainError&) {
      ok = false;
    }
    if (ok) return b;
  }
  throw OstroError(Err::SamplerExhausted,
                   "could not find an admissible point after " +
                       std::to_string(domain.maxTriesPerPoint) +
                       " rejections; guards too tight for the sampling box?");
}

bool equalProbabilistic(const Expr& a, const Expr& b, const ChartPtr& chart,
                        const SampleDomain& domain, int trials, double tol,
                        std::uint64_t seed) {
  // cheap exits for structurally identical trees
  if (a.same(b)) return true;

  std::vector<Symbol> syms;
  auto collect = [&](const Expr& e) {
    e.forEachSymbol([&](const Symbol& s) {
      if (std::find(syms.begin(), syms.end(), s) == syms.end())
        syms.push_back(s);
    });
  };
  collect(a);
  collect(b);
  if (syms.empty()) {
    Binding empty(chart);
    double va = evaluate(a, empty);
    double vb = evaluate(b, empty);
    return std::abs(va - vb) <= tol * (1.0 + std::abs(va));
  }

  DetRng rng(seed);
  for (int t = 0; t < trials; ++t) {
    Binding bind = sampleAdmissible(syms, domain, {a, b}, rng, chart);
    double va = evaluate(a, bind);
    double vb = evaluate(b, bind);
    if (std::abs(va - vb) > tol * (1.0 + std::abs(va))) return false;
  }
  return true;
}

}  // namespace ostro
