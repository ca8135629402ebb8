#include "ostro/affine_model.hpp"

#include <algorithm>
#include <cmath>

#include "ostro/calculus.hpp"
#include "ostro/error.hpp"
#include "ostro/simplify.hpp"

namespace ostro {

namespace {

void requireConfigurationSpace(const Expr& e, const std::string& field,
                               int maxOrder) {
  bool bad = false;
  std::string offender;
  e.forEachSymbol([&](const Symbol& s) {
    bool ok = s.kind() == SymbolKind::Parameter ||
              (s.kind() == SymbolKind::Deriv && s.order() <= maxOrder);
    if (!ok) {
      bad = true;
      offender = s.name();
    }
  });
  if (bad) {
    throw ValidationError(field, "depends on '" + offender +
                                     "', which is not allowed here");
  }
}

}  // namespace

AffineModel AffineModel::make(std::string name, ChartPtr chart, SymVector K,
                              Expr V, Eigen::VectorXd signature,
                              std::vector<Expr> guards,
                              std::vector<double> paramDefaults,
                              SamplingSpec sampling,
                              std::vector<GaugeCondition> gauges) {
  const int n = chart->dim();
  if (K.size() != n) {
    throw ValidationError("K", "expected " + std::to_string(n) +
                                   " components, got " +
                                   std::to_string(K.size()));
  }
  if (signature.size() == 0) {
    signature = Eigen::VectorXd::Ones(n);
  }
  if (signature.size() != n) {
    throw ValidationError("metric", "signature length does not match dimension");
  }
  for (int i = 0; i < n; ++i) {
    if (signature[i] != 1.0 && signature[i] != -1.0) {
      throw ValidationError("metric", "signature entries must be +1 or -1");
    }
  }
  if (paramDefaults.size() != chart->parameters().size()) {
    throw ValidationError("parameters", "each parameter needs a default value");
  }
  for (int mu = 0; mu < n; ++mu) {
    requireConfigurationSpace(K[mu], "K[" + chart->coordinateNames()[mu] + "]",
                              1);
  }
  requireConfigurationSpace(V, "V", 1);
  for (const auto& g : guards) requireConfigurationSpace(g, "guards", 1);
  for (const auto& gc : gauges) {
    if (gc.a.size() != n) {
      throw ValidationError("gauge",
                            "condition needs one coefficient per coordinate");
    }
    for (int mu = 0; mu < n; ++mu)
      requireConfigurationSpace(gc.a[mu], "gauge", 1);
    requireConfigurationSpace(gc.b, "gauge", 1);
  }

  AffineModel m;
  m.name_ = std::move(name);
  m.chart_ = std::move(chart);
  m.K_ = std::move(K);
  for (int mu = 0; mu < n; ++mu) m.K_[mu] = simplify(m.K_[mu]);
  m.V_ = simplify(V);
  m.signature_ = std::move(signature);
  m.guards_ = std::move(guards);
  m.paramDefaults_ = std::move(paramDefaults);
  m.sampling_ = sampling;
  m.gauges_ = std::move(gauges);
  return m;
}

Expr AffineModel::lagrangian() const {
  Expr L = V_;
  for (int mu = 0; mu < dim(); ++mu) {
    L = L + K_[mu] * Expr::sym(chart_->acceleration(mu));
  }
  return simplify(L);
}

SampleDomain AffineModel::domain(double margin) const {
  SampleDomain d;
  d.guards = guards_;
  d.lo = sampling_.lo;
  d.hi = sampling_.hi;
  d.margin = margin;
  return d;
}

Binding AffineModel::parameterBinding() const {
  Binding b(chart_);
  const auto& params = chart_->parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    b.set(params[i], paramDefaults_[i]);
  }
  b.set(chart_->time(), 0.0);
  return b;
}

bool AffineModel::admissible(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& xdot) const {
  Binding b = parameterBinding();
  for (int mu = 0; mu < dim(); ++mu) {
    b.set(chart_->coordinate(mu), x[mu]);
    b.set(chart_->velocity(mu), xdot[mu]);
  }
  try {
    for (const auto& g : guards_) {
      if (evaluate(g, b) <= 0.0) return false;
    }
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

AffineModel AffineModel::withParameter(const std::string& name,
                                       double value) const {
  const auto& params = chart_->parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name() == name) {
      AffineModel m = *this;
      m.paramDefaults_[i] = value;
      return m;
    }
  }
  throw ValidationError("set", "model has no parameter '" + name + "'");
}

DerivedTensors derive(const AffineModel& m) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  DerivedTensors t;
  t.P = m.K();
  t.p.resize(n);
  t.F.resize(n);
  t.M.resize(n, n);
  t.Ncurl.resize(n, n);
  t.X.resize(n, n);
  t.Theta.resize(n, n);

  for (int mu = 0; mu < n; ++mu) {
    Expr acc = diff(m.V(), c.velocity(mu));
    for (int nu = 0; nu < n; ++nu) {
      acc = acc - diff(m.K()[mu], c.coordinate(nu)) * Expr::sym(c.velocity(nu));
    }
    t.p[mu] = simplify(acc);
  }
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      t.M(mu, nu) = simplify(diff(t.P[nu], c.coordinate(mu)) -
                             diff(t.p[mu], c.velocity(nu)));
    }
  }
  for (int mu = 0; mu < n; ++mu) {
    Expr acc = -diff(m.V(), c.coordinate(mu));
    for (int nu = 0; nu < n; ++nu) {
      acc = acc + diff(t.p[mu], c.coordinate(nu)) * Expr::sym(c.velocity(nu));
    }
    t.F[mu] = simplify(acc);
  }
  // curls mirrored across the diagonal so antisymmetry is exact as trees
  auto antisym = [&](SymMatrix& out, auto&& entry) {
    for (int mu = 0; mu < n; ++mu) out(mu, mu) = Expr();
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = mu + 1; nu < n; ++nu) {
        Expr e = simplify(entry(mu, nu));
        out(mu, nu) = e;
        out(nu, mu) = simplify(-e);
      }
    }
  };
  antisym(t.Ncurl, [&](int mu, int nu) {
    return diff(t.P[nu], c.velocity(mu)) - diff(t.P[mu], c.velocity(nu));
  });
  antisym(t.X, [&](int mu, int nu) {
    return diff(t.p[nu], c.coordinate(mu)) - diff(t.p[mu], c.coordinate(nu));
  });
  antisym(t.Theta, [&](int mu, int nu) {
    return diff(t.P[mu], c.coordinate(nu)) - diff(t.P[nu], c.coordinate(mu));
  });

  Expr e1;
  for (int mu = 0; mu < n; ++mu) {
    e1 = e1 - Expr::sym(c.velocity(mu)) * m.K()[mu];
  }
  t.E1 = simplify(e1);

  Expr e2;
  for (int mu = 0; mu < n; ++mu) {
    Expr xd = Expr::sym(c.velocity(mu));
    e2 = e2 + diff(m.V(), c.velocity(mu)) * xd;
    for (int nu = 0; nu < n; ++nu) {
      e2 = e2 -
           diff(m.K()[mu], c.coordinate(nu)) * Expr::sym(c.velocity(nu)) * xd;
    }
  }
  t.E2 = simplify(e2 - m.V());

  Expr h0;
  for (int mu = 0; mu < n; ++mu) {
    h0 = h0 + t.p[mu] * Expr::sym(c.velocity(mu));
  }
  t.H0 = simplify(h0 - m.V());
  return t;
}

SymmetryReport checkAffineSymmetry(const AffineModel& m, int trials,
                                   double tol, std::uint64_t seed) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  SymmetryReport rep;
  rep.residual.resize(n, n);
  for (int mu = 0; mu < n; ++mu) rep.residual(mu, mu) = Expr();
  bool symmetric = true;
  SampleDomain dom = m.domain();
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = mu + 1; nu < n; ++nu) {
      Expr r = simplify(diff(m.K()[mu], c.velocity(nu)) -
                        diff(m.K()[nu], c.velocity(mu)));
      rep.residual(mu, nu) = r;
      rep.residual(nu, mu) = simplify(-r);
      if (r.isZero()) continue;
      if (!equalProbabilistic(r, Expr(), m.chart(), dom, trials, tol, seed)) {
        symmetric = false;
      }
    }
  }
  rep.symmetric = symmetric;
  return rep;
}

AffineModel gaugeShift(const AffineModel& m, const Expr& Y) {
  requireConfigurationSpace(Y, "Y", 1);
  const Chart& c = *m.chart();
  const int n = m.dim();
  SymVector K(n);
  for (int mu = 0; mu < n; ++mu) {
    K[mu] = simplify(m.K()[mu] + diff(Y, c.velocity(mu)));
  }
  Expr V = m.V();
  for (int mu = 0; mu < n; ++mu) {
    V = V + diff(Y, c.coordinate(mu)) * Expr::sym(c.velocity(mu));
  }
  return AffineModel::make(m.name() + "~", m.chart(), std::move(K),
                           simplify(V), m.signature(), m.guards(),
                           m.paramDefaults(), m.sampling(), m.gauges());
}

ZermeloReport zermeloCheck(const AffineModel& m, int points, double tol,
                           std::uint64_t seed) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  Expr i1;
  for (int mu = 0; mu < n; ++mu) {
    i1 = i1 + Expr::integer(2) * Expr::sym(c.velocity(mu)) * m.K()[mu];
  }
  i1 = simplify(i1);
  Expr i2;
  for (int mu = 0; mu < n; ++mu) {
    Expr coef = Expr::integer(2) * m.K()[mu];
    for (int nu = 0; nu < n; ++nu) {
      coef = coef + diff(m.K()[mu], c.velocity(nu)) * Expr::sym(c.velocity(nu));
    }
    i2 = i2 + coef * Expr::sym(c.acceleration(mu)) +
         diff(m.V(), c.velocity(mu)) * Expr::sym(c.velocity(mu));
  }
  Expr L = m.lagrangian();
  Expr i2res = simplify(i2 - L);

  ZermeloReport rep;
  rep.samples = points;
  rep.tol = tol;
  rep.seed = seed;
  // accelerations are sampled alongside (x, xdot): I2 carries them
  std::vector<Symbol> syms;
  auto collect = [&](const Expr& e) {
    e.forEachSymbol([&](const Symbol& s) {
      if (std::find(syms.begin(), syms.end(), s) == syms.end())
        syms.push_back(s);
    });
  };
  collect(i1);
  collect(i2res);
  collect(L);
  DetRng rng(seed);
  SampleDomain dom = m.domain();
  bool ok = true;
  for (int i = 0; i < points; ++i) {
    Binding b = sampleAdmissible(syms, dom, {i1, i2res, L}, rng, m.chart());
    double scale = 1.0 + std::abs(evaluate(L, b));
    double r1 = std::abs(evaluate(i1, b));
    double r2 = std::abs(evaluate(i2res, b));
    rep.maxI1Residual = std::max(rep.maxI1Residual, r1);
    rep.maxI2Residual = std::max(rep.maxI2Residual, r2);
    if (r1 > tol * scale || r2 > tol * scale) ok = false;
  }
  rep.covariant = ok;
  return rep;
}

SymVector eulerLagrangeOperator(const AffineModel& m) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  Expr L = m.lagrangian();
  SymVector e0(n);
  for (int mu = 0; mu < n; ++mu) {
    Expr dLdx = diff(L, c.coordinate(mu));
    Expr dLdxd = diff(L, c.velocity(mu));
    Expr dK = totalDerivative(m.K()[mu], c, 3);
    Expr ddK = totalDerivative(dK, c, 4);
    e0[mu] = simplify(dLdx - totalDerivative(dLdxd, c, 3) + ddK);
  }
  return e0;
}

Eigen::MatrixXd eulerLagrangeResidual(const AffineModel& m,
                                      const DerivedTensors& t,
                                      const CurveSamples& curve) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  const bool symmetric = checkAffineSymmetry(m).symmetric;
  SymVector residual(n);
  if (symmetric) {
    for (int mu = 0; mu < n; ++mu) {
      Expr acc;
      for (int nu = 0; nu < n; ++nu) {
        acc = acc + t.M(mu, nu) * Expr::sym(c.acceleration(nu));
      }
      residual[mu] = simplify(acc - t.F[mu]);
    }
  } else {
    if (curve.xdddot.size() != curve.times.size()) {
      throw OstroError(Err::MissingDerivativeOrder,
                       "third-order model needs xdddot samples on the curve");
    }
    residual = eulerLagrangeOperator(m);
  }

  Eigen::MatrixXd out(curve.times.size(), n);
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    Binding b = m.parameterBinding();
    b.set(c.time(), curve.times[k]);
    for (int mu = 0; mu < n; ++mu) {
      b.set(c.coordinate(mu), curve.x[k][mu]);
      b.set(c.velocity(mu), curve.xdot[k][mu]);
      b.set(c.acceleration(mu), curve.xddot[k][mu]);
      if (!curve.xdddot.empty()) b.set(c.deriv(mu, 3), curve.xdddot[k][mu]);
    }
    for (int mu = 0; mu < n; ++mu) {
      out(static_cast<Eigen::Index>(k), mu) = evaluate(residual[mu], b);
    }
  }
  return out;
}

}  // namespace ostro
