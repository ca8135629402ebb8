#include "ostro/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "ostro/calculus.hpp"
#include "ostro/error.hpp"
#include "ostro/simplify.hpp"

namespace ostro {

double Trajectory::maxDrift(double StepDiagnostics::*field) const {
  double worst = 0.0;
  for (const auto& d : diagnostics) {
    worst = std::max(worst, std::abs(d.*field));
  }
  return worst;
}

double Trajectory::maxPrimaryDrift() const {
  return maxDrift(&StepDiagnostics::Cmax);
}

double Trajectory::maxSecondaryDrift() const {
  return maxDrift(&StepDiagnostics::Smax);
}

HamiltonFlow::HamiltonFlow(const AffineModel& m, const DerivedTensors& t,
                           const IntegrateOptions& opts)
    : model_(m), tensors_(t), opts_(opts) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  thirdOrder_ = !checkAffineSymmetry(m).symmetric;
  dKdxd_.resize(n, n);
  dKdx_.resize(n, n);
  dVdxd_.resize(n);
  dVdx_.resize(n);
  secondary_.resize(n);
  for (int nu = 0; nu < n; ++nu) {
    for (int mu = 0; mu < n; ++mu) {
      dKdxd_(nu, mu) = simplify(diff(m.K()[nu], c.velocity(mu)));
      dKdx_(nu, mu) = simplify(diff(m.K()[nu], c.coordinate(mu)));
    }
  }
  for (int mu = 0; mu < n; ++mu) {
    dVdxd_[mu] = simplify(diff(m.V(), c.velocity(mu)));
    dVdx_[mu] = simplify(diff(m.V(), c.coordinate(mu)));
    secondary_[mu] =
        simplify(Expr::sym(c.momentumQ(mu)) - t.p[mu]);  // p - W(x, xdot)
  }
  gauges_ = m.gauges();
  gauges_.insert(gauges_.end(), opts.extraGauges.begin(),
                 opts.extraGauges.end());
}

Eigen::VectorXd HamiltonFlow::multiplier(const PhaseState& s) const {
  const int n = model_.dim();
  Binding b = bindState(model_, s);

  if (thirdOrder_) {
    // persistence of the primaries: Ncurl_{mu nu} u^nu = (p - W)_mu
    Eigen::MatrixXd Nmat = evalMatrix(tensors_.Ncurl, b);
    Eigen::VectorXd rhs = evalVector(secondary_, b);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Nmat);
    if (!lu.isInvertible()) {
      throw OstroError(Err::NoSolution,
                       "primary-persistence matrix {C, C} is singular; the "
                       "multipliers cannot be resolved");
    }
    return lu.solve(rhs);
  }

  Eigen::MatrixXd M = evalMatrix(tensors_.M, b);
  Eigen::VectorXd F = evalVector(tensors_.F, b);
  const int extra = static_cast<int>(gauges_.size());
  Eigen::MatrixXd A(n + extra, n);
  Eigen::VectorXd rhs(n + extra);
  A.topRows(n) = M;
  rhs.head(n) = F;
  for (int g = 0; g < extra; ++g) {
    for (int mu = 0; mu < n; ++mu) {
      A(n + g, mu) = evaluate(gauges_[g].a[mu], b);
    }
    rhs[n + g] = evaluate(gauges_[g].b, b);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-9);
  if (svd.rank() < n && opts_.policy == MultiplierPolicy::RequireUnique) {
    throw OstroError(
        Err::Gauge,
        "singular mass matrix leaves multiplier freedom: supply a gauge "
        "condition or select the minimum-norm policy");
  }
  Eigen::VectorXd u = svd.solve(rhs);
  double resid = (A * u - rhs).norm();
  if (resid > 1e-6 * (1.0 + rhs.norm())) {
    throw OstroError(Err::NoSolution,
                     "multiplier system (including gauge rows) is "
                     "inconsistent at this state (residual " +
                         std::to_string(resid) + ")");
  }
  return u;
}

Eigen::VectorXd HamiltonFlow::rhs(double tau, const PhaseState& s) const {
  const int n = model_.dim();
  Binding b = bindState(model_, s);
  b.set(model_.chart()->time(), tau);
  Eigen::VectorXd u = multiplier(s);

  Eigen::VectorXd out(4 * n);
  // dx = xdot, dxdot = u
  out.head(n) = s.xdot;
  out.segment(n, n) = u;
  // dp_mu = dV/dx^mu + u^nu dK_nu/dx^mu
  // dP_mu = -p_mu + dV/dxdot^mu + u^nu dK_nu/dxdot^mu
  for (int mu = 0; mu < n; ++mu) {
    double dp = evaluate(dVdx_[mu], b);
    double dP = -s.p[mu] + evaluate(dVdxd_[mu], b);
    for (int nu = 0; nu < n; ++nu) {
      dp += u[nu] * evaluate(dKdx_(nu, mu), b);
      dP += u[nu] * evaluate(dKdxd_(nu, mu), b);
    }
    out[2 * n + mu] = dp;
    out[3 * n + mu] = dP;
  }
  return out;
}

Eigen::VectorXd HamiltonFlow::pack(const PhaseState& s) {
  const int n = static_cast<int>(s.x.size());
  Eigen::VectorXd y(4 * n);
  y << s.x, s.xdot, s.p, s.P;
  return y;
}

PhaseState HamiltonFlow::unpack(const Eigen::VectorXd& y, int n) {
  PhaseState s;
  s.x = y.head(n);
  s.xdot = y.segment(n, n);
  s.p = y.segment(2 * n, n);
  s.P = y.tail(n);
  return s;
}

PhaseState projectInitial(const AffineModel& m, const DerivedTensors& t,
                          const Eigen::VectorXd& x,
                          const Eigen::VectorXd& xdot) {
  if (!m.admissible(x, xdot)) {
    throw OstroError(Err::GuardViolation,
                     "initial (x, xdot) violates the model guards");
  }
  const int n = m.dim();
  Binding b = m.parameterBinding();
  for (int mu = 0; mu < n; ++mu) {
    b.set(m.chart()->coordinate(mu), x[mu]);
    b.set(m.chart()->velocity(mu), xdot[mu]);
  }
  PhaseState s;
  s.x = x;
  s.xdot = xdot;
  s.P = evalVector(t.P, b);
  s.p = evalVector(t.p, b);
  return s;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
// error coefficients: 5th-order weights minus the embedded 4th-order ones
constexpr double kE[7] = {71.0 / 57600,     0.0,         -71.0 / 16695,
                          71.0 / 1920,      -17253.0 / 339200,
                          22.0 / 525,       -1.0 / 40};

}  // namespace

Trajectory integrate(const AffineModel& m, const DerivedTensors& t,
                     const PhaseState& s0, double tau0, double tau1,
                     const IntegrateOptions& opts) {
  const int n = m.dim();
  HamiltonFlow flow(m, t, opts);

  Trajectory traj;
  auto record = [&](double tau, const PhaseState& s, double h) {
    Binding b = bindState(m, s);
    b.set(m.chart()->time(), tau);
    StepDiagnostics d;
    d.E1 = evaluate(t.E1, b);
    d.E2 = evaluate(t.E2, b);
    for (int mu = 0; mu < n; ++mu) {
      double cVal = s.P[mu] - evaluate(t.P[mu], b);
      double sVal = s.p[mu] - evaluate(t.p[mu], b);
      d.Cmax = std::max(d.Cmax, std::abs(cVal));
      d.Smax = std::max(d.Smax, std::abs(sVal));
    }
    d.u = flow.multiplier(s);
    d.h = h;
    traj.times.push_back(tau);
    traj.states.push_back(s);
    traj.diagnostics.push_back(d);
  };

  const double dir = tau1 >= tau0 ? 1.0 : -1.0;
  double tau = tau0;
  Eigen::VectorXd y = HamiltonFlow::pack(s0);
  record(tau, s0, 0.0);

  double h = dir * std::min(opts.initialStep, std::abs(tau1 - tau0));
  if (h == 0.0) return traj;

  std::vector<Eigen::VectorXd> k(7);
  long steps = 0;
  while (dir * (tau1 - tau) > 1e-15 * (1.0 + std::abs(tau1))) {
    if (++steps > opts.maxSteps) {
      throw OstroError(Err::NoSolution, "integrator exceeded max step count");
    }
    if (dir * (tau + h) > dir * tau1) h = tau1 - tau;

    bool ok = true;
    Eigen::VectorXd y5;
    double errNorm = 0.0;
    try {
      k[0] = flow.rhs(tau, HamiltonFlow::unpack(y, n));
      for (int stage = 1; stage < 7; ++stage) {
        Eigen::VectorXd yi = y;
        for (int j = 0; j < stage; ++j) {
          if (kA[stage][j] != 0.0) yi += h * kA[stage][j] * k[j];
        }
        if (stage == 6) {
          y5 = yi;  // FSAL: the 7th stage is evaluated at the 5th-order result
        }
        k[stage] = flow.rhs(tau + kC[stage] * h, HamiltonFlow::unpack(yi, n));
      }
      Eigen::VectorXd errVec = Eigen::VectorXd::Zero(4 * n);
      for (int j = 0; j < 7; ++j) {
        if (kE[j] != 0.0) errVec += h * kE[j] * k[j];
      }
      double acc = 0.0;
      for (int i = 0; i < 4 * n; ++i) {
        double sc = opts.absTol +
                    opts.relTol * std::max(std::abs(y[i]), std::abs(y5[i]));
        acc += (errVec[i] / sc) * (errVec[i] / sc);
      }
      errNorm = std::sqrt(acc / (4 * n));
      PhaseState trial = HamiltonFlow::unpack(y5, n);
      if (!m.admissible(trial.x, trial.xdot)) ok = false;
    } catch (const DomainError&) {
      ok = false;
    } catch (const OstroError& e) {
      if (e.code() == Err::Gauge) throw;  // configuration problem, not a step
      ok = false;
    }

    if (ok && errNorm <= 1.0) {
      tau += h;
      y = y5;
      record(tau, HamiltonFlow::unpack(y, n), h);
      double factor = errNorm > 0 ? 0.9 * std::pow(errNorm, -0.2) : 5.0;
      h *= std::clamp(factor, 0.2, 5.0);
    } else if (ok) {
      double factor = 0.9 * std::pow(errNorm, -0.2);
      h *= std::clamp(factor, 0.1, 0.7);
    } else {
      h *= 0.5;  // guard boundary or domain error: retreat
    }
    if (std::abs(h) < opts.minStep) {
      throw OstroError(Err::GuardViolation,
                       "step size underflow at tau = " + std::to_string(tau) +
                           " (guard boundary?); last good state recorded");
    }
  }
  return traj;
}

NoetherSeries monitorNoether(const Trajectory& traj, const NoetherSpec& spec,
                             const AffineModel& m, const DerivedTensors& t) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  for (int mu = 0; mu < n; ++mu) {
    if (spec.W[mu].maxDerivOrder() > 0) {
      throw ValidationError("noether", "W must depend on x and tau only");
    }
  }
  if (spec.eta.maxDerivOrder() > 0) {
    throw ValidationError("noether", "eta must depend on x and tau only");
  }
  if (spec.phi.maxDerivOrder() > 1) {
    throw ValidationError("noether", "phi must depend on (x, xdot) only");
  }

  // invariant-operator form
  Expr i1, i2;
  SymVector wdot(n);
  for (int mu = 0; mu < n; ++mu) {
    wdot[mu] = totalDerivative(spec.W[mu], c, 2);
    i1 = i1 + Expr::integer(2) * spec.W[mu] * m.K()[mu];
    Expr dLdxd = diff(m.V(), c.velocity(mu));
    for (int nu = 0; nu < n; ++nu) {
      dLdxd = dLdxd +
              diff(m.K()[nu], c.velocity(mu)) * Expr::sym(c.acceleration(nu));
    }
    i2 = i2 + spec.W[mu] * dLdxd +
         Expr::integer(2) * wdot[mu] * m.K()[mu];
  }
  Expr etadot = totalDerivative(spec.eta, c, 2);
  Expr G = simplify(i2 - Expr::rational(1, 2) * totalDerivative(i1, c, 3) -
                    spec.eta * t.E2 + etadot * t.E1 - spec.phi);

  // momentum form, with p and P as phase symbols from the state
  Expr Gm;
  for (int mu = 0; mu < n; ++mu) {
    Gm = Gm + spec.W[mu] * Expr::sym(c.momentumQ(mu)) -
         wdot[mu] * Expr::sym(c.momentumP(mu));
  }
  Gm = simplify(Gm - spec.eta * t.E1 + etadot * t.E2 - spec.phi);

  NoetherSeries out;
  for (std::size_t kIdx = 0; kIdx < traj.times.size(); ++kIdx) {
    Binding b = bindState(m, traj.states[kIdx]);
    b.set(c.time(), traj.times[kIdx]);
    for (int mu = 0; mu < n; ++mu) {
      b.set(c.acceleration(mu), traj.diagnostics[kIdx].u[mu]);
    }
    out.G.push_back(evaluate(G, b));
    out.Gmomentum.push_back(evaluate(Gm, b));
  }
  for (std::size_t kIdx = 0; kIdx < out.G.size(); ++kIdx) {
    out.drift = std::max(out.drift, std::abs(out.G[kIdx] - out.G[0]));
    out.driftMomentum = std::max(
        out.driftMomentum, std::abs(out.Gmomentum[kIdx] - out.Gmomentum[0]));
  }
  return out;
}

CurveSamples toCurveSamples(const Trajectory& traj,
                            bool withThirdDerivatives) {
  CurveSamples c;
  c.times = traj.times;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    c.x.push_back(traj.states[k].x);
    c.xdot.push_back(traj.states[k].xdot);
    c.xddot.push_back(traj.diagnostics[k].u);
  }
  if (withThirdDerivatives && traj.times.size() >= 3) {
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      std::size_t lo = k == 0 ? 0 : k - 1;
      std::size_t hi = k + 1 < traj.times.size() ? k + 1 : k;
      double dt = traj.times[hi] - traj.times[lo];
      c.xdddot.push_back((traj.diagnostics[hi].u - traj.diagnostics[lo].u) /
                         dt);
    }
  }
  return c;
}

namespace {

void appendDouble(std::string& line, double v) {
  char buf[40];
  int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  line.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

void writeTrajectoryCsv(const Trajectory& traj, int dim, std::ostream& out) {
  std::string header = "tau";
  auto cols = [&](const char* stem) {
    for (int mu = 0; mu < dim; ++mu) {
      header += ",";
      header += stem;
      header += std::to_string(mu);
    }
  };
  cols("x");
  cols("xdot");
  cols("p");
  cols("P");
  header += ",E1,E2,Cmax,Smax";
  cols("u");
  out << header << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::string line;
    appendDouble(line, traj.times[k]);
    auto vec = [&](const Eigen::VectorXd& v) {
      for (int mu = 0; mu < dim; ++mu) {
        line += ",";
        appendDouble(line, v[mu]);
      }
    };
    vec(traj.states[k].x);
    vec(traj.states[k].xdot);
    vec(traj.states[k].p);
    vec(traj.states[k].P);
    line += ",";
    appendDouble(line, traj.diagnostics[k].E1);
    line += ",";
    appendDouble(line, traj.diagnostics[k].E2);
    line += ",";
    appendDouble(line, traj.diagnostics[k].Cmax);
    line += ",";
    appendDouble(line, traj.diagnostics[k].Smax);
    vec(traj.diagnostics[k].u);
    out << line << "\n";
  }
}

}  // namespace ostro
