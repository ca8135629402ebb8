#include "ostro/phase.hpp"

#include "ostro/error.hpp"
#include "ostro/simplify.hpp"
#include "ostro/calculus.hpp"

namespace ostro {

Expr poisson(const Expr& F, const Expr& G, const Chart& chart) {
  std::vector<Expr> parts;
  for (int mu = 0; mu < chart.dim(); ++mu) {
    Symbol x = chart.coordinate(mu);
    Symbol xd = chart.velocity(mu);
    Symbol pq = chart.momentumQ(mu);
    Symbol pP = chart.momentumP(mu);
    parts.push_back(diff(F, x) * diff(G, pq));
    parts.push_back(diff(F, xd) * diff(G, pP));
    parts.push_back(-(diff(G, x) * diff(F, pq)));
    parts.push_back(-(diff(G, xd) * diff(F, pP)));
  }
  return simplify(Expr::sum(std::move(parts)));
}

void requirePhaseFunction(const Expr& e) {
  std::string offender;
  e.forEachSymbol([&](const Symbol& s) {
    bool ok = s.kind() == SymbolKind::Parameter ||
              s.kind() == SymbolKind::MomentumQ ||
              s.kind() == SymbolKind::MomentumP ||
              (s.kind() == SymbolKind::Deriv && s.order() <= 1);
    if (!ok && offender.empty()) offender = s.name();
  });
  if (!offender.empty()) {
    throw ValidationError("phase-function",
                          "'" + offender + "' is not a phase-space symbol");
  }
}

Binding bindState(const AffineModel& m, const PhaseState& s) {
  Binding b = m.parameterBinding();
  const Chart& c = *m.chart();
  for (int mu = 0; mu < m.dim(); ++mu) {
    b.set(c.coordinate(mu), s.x[mu]);
    b.set(c.velocity(mu), s.xdot[mu]);
    b.set(c.momentumQ(mu), s.p[mu]);
    b.set(c.momentumP(mu), s.P[mu]);
  }
  return b;
}

PhaseState samplePhaseState(const AffineModel& m, DetRng& rng) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  std::vector<Symbol> syms;
  for (int mu = 0; mu < n; ++mu) {
    syms.push_back(c.coordinate(mu));
    syms.push_back(c.velocity(mu));
  }
  Binding b = sampleAdmissible(syms, m.domain(), {}, rng, m.chart());
  PhaseState s;
  s.x.resize(n);
  s.xdot.resize(n);
  s.p.resize(n);
  s.P.resize(n);
  for (int mu = 0; mu < n; ++mu) {
    s.x[mu] = b.get(c.coordinate(mu));
    s.xdot[mu] = b.get(c.velocity(mu));
    s.p[mu] = rng.uniform(m.sampling().lo, m.sampling().hi);
    s.P[mu] = rng.uniform(m.sampling().lo, m.sampling().hi);
  }
  return s;
}

}  // namespace ostro
