// Acceptance suite: one criterion per section, one pass/fail line each.
// Exercises the library against the worked examples and identity suites,
// plus byte-level determinism of the command-line tool (path in argv[1]).

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ostro/calculus.hpp"
#include "ostro/catalog.hpp"
#include "ostro/constraints.hpp"
#include "ostro/dynamics.hpp"
#include "ostro/helmholtz.hpp"
#include "ostro/parse.hpp"
#include "ostro/report.hpp"
#include "ostro/simplify.hpp"

using namespace ostro;

namespace {

int failures = 0;

void criterion(int number, const std::string& label,
               const std::function<bool(std::string&)>& body,
               double timeLimitSeconds) {
  std::string detail;
  bool ok = false;
  auto start = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    ok = false;
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (timeLimitSeconds > 0 && seconds > timeLimitSeconds) {
    ok = false;
    detail += " [exceeded " + std::to_string(timeLimitSeconds) + " s limit]";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", seconds);
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << number << ": "
            << label << " (" << buf << " s)";
  if (!ok && !detail.empty()) std::cout << " -- " << detail;
  std::cout << "\n";
  if (!ok) ++failures;
}

bool equalOnModel(const AffineModel& m, const Expr& a, const Expr& b,
                  double tol) {
  return equalProbabilistic(a, b, m.chart(), m.domain(), 8, tol, 0);
}

PhaseState onSurface(const AffineModel& m, const DerivedTensors& t,
                     DetRng& rng) {
  PhaseState raw = samplePhaseState(m, rng);
  return projectInitial(m, t, raw.x, raw.xdot);
}

// --------------------------------------------------------------------------

bool chiralOscillator(std::string& detail) {
  AffineModel m = loadCatalog("chiral");
  if (checkAffineSymmetry(m).symmetric) {
    detail = "symmetry not flagged as violated";
    return false;
  }
  DerivedTensors t = derive(m);
  ConstraintSystem cs = buildConstraints(m, t);
  Expr lambda = Expr::sym(m.chart()->find("lambda"));
  Expr bracket = poisson(cs.C[0], cs.C[1], *m.chart());
  // {C_mu, C_nu} = lambda eps_numu: the (x, y) entry is lambda eps_21 = -lambda
  if (!bracket.same(simplify(-lambda)) &&
      !equalOnModel(m, bracket, simplify(-lambda), 1e-12)) {
    detail = "{C_x, C_y} != -lambda: " + bracket.str();
    return false;
  }
  DetRng rng(0);
  Classification cls = classify(cs, t, m, samplePhaseState(m, rng));
  if (cls.dof != 3) {
    detail = "dof = " + std::to_string(cls.dof);
    return false;
  }
  return true;
}

bool geodesicModel(std::string& detail) {
  AffineModel m = loadCatalog("geodesic");
  DerivedTensors t = derive(m);
  const Chart& c = *m.chart();
  const int n = m.dim();

  // g_munu = w_munu - (d_nu w_mu + d_mu w_nu)/2 from the model functions
  SymMatrix g(n, n);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      Expr w = simplify(diff(diff(m.V(), c.velocity(mu)), c.velocity(nu)) *
                        Expr::rational(1, 2));
      g(mu, nu) = simplify(w - Expr::rational(1, 2) *
                                   (diff(m.K()[mu], c.coordinate(nu)) +
                                    diff(m.K()[nu], c.coordinate(mu))));
    }
  }
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      Expr expected = simplify(Expr::integer(-2) * g(mu, nu));
      if (!t.M(mu, nu).same(expected)) {
        detail = "M != -2g entrywise";
        return false;
      }
    }
  }

  // secondary constraints match p_mu - (2 w_munu - d_nu w_mu) xdot^nu
  ConstraintSystem cs = buildConstraints(m, t);
  for (int mu = 0; mu < n; ++mu) {
    Expr expected = Expr::sym(c.momentumQ(mu));
    for (int nu = 0; nu < n; ++nu) {
      Expr w = simplify(diff(diff(m.V(), c.velocity(mu)), c.velocity(nu)) *
                        Expr::rational(1, 2));
      expected =
          expected - (Expr::integer(2) * w - diff(m.K()[mu], c.coordinate(nu))) *
                         Expr::sym(c.velocity(nu));
    }
    if (!equalOnModel(m, cs.S[mu], simplify(expected), 1e-12)) {
      detail = "secondary constraint mismatch";
      return false;
    }
  }

  // Omega = [[0, 2g], [-2g, X]], inverse = 1/4 [[ginv X ginv, -2 ginv],
  // [2 ginv, 0]] at 8 random points
  DetRng rng(0);
  for (int k = 0; k < 8; ++k) {
    PhaseState s = onSurface(m, t, rng);
    Binding b = bindState(m, s);
    Eigen::MatrixXd omega = omegaAt(cs, m, s);
    Eigen::MatrixXd gv = evalMatrix(g, b);
    Eigen::MatrixXd Xv = evalMatrix(t.X, b);
    Eigen::MatrixXd expect(2 * n, 2 * n);
    expect.topLeftCorner(n, n).setZero();
    expect.topRightCorner(n, n) = 2 * gv;
    expect.bottomLeftCorner(n, n) = -2 * gv;
    expect.bottomRightCorner(n, n) = Xv;
    if ((omega - expect).cwiseAbs().maxCoeff() > 1e-10) {
      detail = "Omega block mismatch";
      return false;
    }
    Eigen::MatrixXd ginv = gv.inverse();
    Eigen::MatrixXd inv(2 * n, 2 * n);
    inv.topLeftCorner(n, n) = 0.25 * ginv * Xv * ginv;
    inv.topRightCorner(n, n) = -0.5 * ginv;
    inv.bottomLeftCorner(n, n) = 0.5 * ginv;
    inv.bottomRightCorner(n, n).setZero();
    if ((omega.inverse() - inv).cwiseAbs().maxCoeff() > 1e-10) {
      detail = "Omega inverse block mismatch";
      return false;
    }
  }

  DetRng rng2(1);
  Classification cls = classify(cs, t, m, onSurface(m, t, rng2));
  if (cls.dof != n) {
    detail = "dof = " + std::to_string(cls.dof);
    return false;
  }
  return true;
}

bool chargedBubble(std::string& detail) {
  AffineModel m = loadCatalog("bubble");
  DerivedTensors t = derive(m);
  const Chart& c = *m.chart();
  ConstraintSystem cs = buildConstraints(m, t);

  // all four momenta
  struct { const char* text; const Expr* got; } momenta[] = {
      {"alpha*r^2*rdot/(tdot^2 - rdot^2)", &t.P[0]},
      {"-alpha*r^2*tdot/(tdot^2 - rdot^2)", &t.P[1]},
      {"-2*alpha*r*tdot^2/(tdot^2 - rdot^2) - beta*q^2/r", &t.p[0]},
      {"2*alpha*r*rdot*tdot/(tdot^2 - rdot^2)", &t.p[1]},
  };
  for (const auto& mom : momenta) {
    Expr expected = simplify(parse(mom.text, c));
    if (!mom.got->same(expected) && !equalOnModel(m, *mom.got, expected, 1e-12)) {
      detail = std::string("momentum mismatch vs ") + mom.text;
      return false;
    }
  }

  // M display (rank one) and X off-diagonal entry at 8 admissible points
  Expr mScale = parse("-4*alpha*r*tdot/(tdot^2 - rdot^2)^2", c);
  Expr xEntry = parse("2*alpha*tdot^2/(tdot^2 - rdot^2) - beta*q^2/r^2", c);
  DetRng rng(0);
  for (int k = 0; k < 8; ++k) {
    PhaseState s = onSurface(m, t, rng);
    Binding b = bindState(m, s);
    double scale = evaluate(mScale, b);
    Eigen::MatrixXd Mv = evalMatrix(t.M, b);
    Eigen::Matrix2d disp;
    double td = s.xdot[0], rd = s.xdot[1];
    disp << rd * rd, -rd * td, -rd * td, td * td;
    if ((Mv - scale * disp).cwiseAbs().maxCoeff() > 1e-10) {
      detail = "M display mismatch";
      return false;
    }
    double xv = evaluate(t.X(0, 1), b);
    if (std::abs(xv - evaluate(xEntry, b)) > 1e-10) {
      detail = "X entry mismatch";
      return false;
    }
    // zero mode parallel to (tdot, rdot)
    ZeroModes zm = zeroModesAt(t, m, s);
    if (zm.basis.cols() != 1) {
      detail = "zero mode count != 1";
      return false;
    }
    Eigen::Vector2d xi = s.xdot.normalized();
    if (std::abs(std::abs(zm.basis.col(0).dot(xi)) - 1.0) > 1e-9) {
      detail = "zero mode not parallel to the velocity";
      return false;
    }
  }

  // classification: reference projections
  DetRng rng2(3);
  PhaseState ref = onSurface(m, t, rng2);
  Classification cls = classify(cs, t, m, ref);
  if (cls.firstClass.size() != 2 || cls.secondClass.size() != 2) {
    detail = "classification counts wrong";
    return false;
  }
  Expr f1 = simplify(parse("P_t*tdot + P_r*rdot", c));
  Expr f2 =
      simplify(parse("p_t*tdot + p_r*rdot + (2*alpha*r + beta*q^2/r)*tdot", c));
  Expr s1 = simplify(parse("P_t*rdot + P_r*tdot + alpha*r^2", c));
  Expr s2 = simplify(parse("p_t*rdot + p_r*tdot + beta*q^2*rdot/r", c));
  if (!cls.firstClass[0].same(f1) || !equalOnModel(m, cls.firstClass[1], f2, 1e-10)) {
    detail = "first-class projections differ from the reference forms";
    return false;
  }
  if (!equalOnModel(m, cls.secondClass[0], s1, 1e-10) ||
      !equalOnModel(m, cls.secondClass[1], s2, 1e-10)) {
    detail = "second-class projections differ from the reference forms";
    return false;
  }

  // {f1, f2} = -f2: Poisson at generic phase states, Dirac on the surface
  Expr pb = poisson(f1, f2, c);
  if (!equalOnModel(m, pb, simplify(-f2), 1e-8)) {
    detail = "{f1, f2} != -f2 (Poisson)";
    return false;
  }
  DetRng rng3(5);
  for (int k = 0; k < 8; ++k) {
    PhaseState s = onSurface(m, t, rng3);
    double db = diracBracket(f1, f2, cs, t, m, s);
    double rhs = -evaluate(f2, bindState(m, s));
    if (std::abs(db - rhs) > 1e-8) {
      detail = "{f1, f2}* != -f2 (Dirac)";
      return false;
    }
  }

  // surface split and covariance
  SurfaceSplit split = surfaceDecompose(m, t);
  Expr lambdaExpected = simplify(parse("-alpha*r^2*atanh(rdot/tdot)", c));
  if (!split.Lambda.same(lambdaExpected)) {
    detail = "Lambda mismatch: " + split.Lambda.str();
    return false;
  }
  if (!zermeloCheck(m).covariant) {
    detail = "Zermelo check failed";
    return false;
  }
  if (!t.E1.isZero() || !t.E2.isZero()) {
    detail = "energies not identically zero";
    return false;
  }
  DetRng rng4(7);
  for (int k = 0; k < 8; ++k) {
    PhaseState s = onSurface(m, t, rng4);
    Binding b = bindState(m, s);
    if (std::abs(evaluate(t.E1, b)) > 1e-10 ||
        std::abs(evaluate(t.E2, b)) > 1e-10) {
      detail = "E1/E2 nonzero at an admissible point";
      return false;
    }
  }
  return true;
}

bool regularDofLaw(std::string& detail) {
  // three random regular models: K from a random polynomial boundary
  // function (so dK/dxdot is symmetric by construction), random V with a
  // dominant velocity-quadratic part
  DetRng rng(42);
  for (int trial = 0; trial < 3; ++trial) {
    auto chart = Chart::make({"x", "y"}, {});
    const Chart& c = *chart;
    auto rnd = [&] { return std::round(rng.uniform(-0.3, 0.3) * 100) / 100; };
    Expr x = Expr::sym(c.coordinate(0)), y = Expr::sym(c.coordinate(1));
    Expr xd = Expr::sym(c.velocity(0)), yd = Expr::sym(c.velocity(1));
    Expr lambda = Expr::real(rnd()) * x * xd + Expr::real(rnd()) * y * xd * xd +
                  Expr::real(rnd()) * x * y * yd + Expr::real(rnd()) * xd * yd +
                  Expr::real(rnd()) * y * yd * yd;
    SymVector K(2);
    K[0] = simplify(diff(lambda, c.velocity(0)));
    K[1] = simplify(diff(lambda, c.velocity(1)));
    Expr V = simplify(Expr::real(-(1.2 + rng.uniform(0, 1))) * (xd * xd + yd * yd) +
                      Expr::real(rnd()) * x * x * yd +
                      Expr::real(rnd()) * y * xd + Expr::real(rnd()) * x * y);
    AffineModel m = AffineModel::make("random", chart, K, V, {}, {}, {});
    DerivedTensors t = derive(m);
    if (!checkAffineSymmetry(m).symmetric) {
      detail = "generated model not symmetric";
      return false;
    }
    ConstraintSystem cs = buildConstraints(m, t);
    DetRng rng2(trial + 1);
    PhaseState s = onSurface(m, t, rng2);
    Eigen::MatrixXd omega = omegaAt(cs, m, s);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(omega);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()[i] > 1e-9 * svd.singularValues()[0]) ++rank;
    }
    if (rank != 2 * m.dim()) {
      detail = "rank(Omega) = " + std::to_string(rank);
      return false;
    }
    Classification cls = classify(cs, t, m, s);
    if (cls.dof != m.dim()) {
      detail = "dof = " + std::to_string(cls.dof);
      return false;
    }
  }
  return true;
}

bool gaugeInvariance(std::string& detail) {
  for (const auto& name : catalogNames()) {
    AffineModel m = loadCatalog(name);
    const Chart& c = *m.chart();
    std::string x0 = c.coordinateNames()[0];
    std::string x1 = c.coordinateNames()[1];
    std::vector<Expr> shifts = {
        parse("sin(" + x0 + ")*" + Chart::derivName(x0, 1), c),
        parse(x0 + "^2*" + Chart::derivName(x1, 1) + " + " + x1, c),
        parse(Chart::derivName(x0, 1) + "*" + Chart::derivName(x1, 1), c),
    };
    DerivedTensors t0 = derive(m);
    for (const auto& Y : shifts) {
      DerivedTensors t1 = derive(gaugeShift(m, Y));
      for (int mu = 0; mu < m.dim(); ++mu) {
        if (!equalOnModel(m, t0.F[mu], t1.F[mu], 1e-9)) {
          detail = std::string(name) + ": F not gauge invariant";
          return false;
        }
        for (int nu = 0; nu < m.dim(); ++nu) {
          if (!equalOnModel(m, t0.M(mu, nu), t1.M(mu, nu), 1e-9) ||
              !equalOnModel(m, t0.Ncurl(mu, nu), t1.Ncurl(mu, nu), 1e-9) ||
              !equalOnModel(m, t0.X(mu, nu), t1.X(mu, nu), 1e-9)) {
            detail = std::string(name) + ": tensor not gauge invariant";
            return false;
          }
        }
      }
    }
  }
  return true;
}

bool conservation(std::string& detail) {
  AffineModel m = loadCatalog("geodesic")
                      .withParameter("a", 1.0)
                      .withParameter("b", 0.0)
                      .withParameter("c", 0.0);  // w = diag(1 + x^2, 1)
  DerivedTensors t = derive(m);
  PhaseState s0 = projectInitial(m, t, Eigen::Vector2d(0.1, 0.0),
                                 Eigen::Vector2d(0.9, 0.4));
  IntegrateOptions opts;
  opts.relTol = 1e-8;
  Trajectory traj = integrate(m, t, s0, 0.0, 10.0, opts);
  double e2ref = traj.diagnostics.front().E2;
  for (const auto& d : traj.diagnostics) {
    if (std::abs(d.E2 - e2ref) > 1e-6) {
      detail = "E2 drift above 1e-6";
      return false;
    }
  }
  Eigen::MatrixXd res = eulerLagrangeResidual(m, t, toCurveSamples(traj, false));
  if (res.cwiseAbs().maxCoeff() > 1e-6) {
    detail = "Euler-Lagrange residual above 1e-6";
    return false;
  }
  NoetherSpec spec;
  spec.W.resize(2);
  spec.W[0] = Expr();
  spec.W[1] = Expr();
  spec.eta = Expr::integer(1);
  spec.phi = Expr();
  NoetherSeries series = monitorNoether(traj, spec, m, t);
  for (std::size_t k = 0; k < series.G.size(); ++k) {
    if (std::abs(series.G[k] + traj.diagnostics[k].E2) > 1e-10) {
      detail = "Noether G does not track -E2";
      return false;
    }
  }
  if (series.drift > 1e-6) {
    detail = "Noether drift above 1e-6";
    return false;
  }
  return true;
}

bool helmholtz(std::string& detail) {
  for (const char* name : {"geodesic", "bubble"}) {
    AffineModel m = loadCatalog(name);
    DerivedTensors t = derive(m);
    auto reports = helmholtzSuite(m, t, 8, 1e-8, 0);
    for (const auto& rep : reports) {
      if (!rep.pass) {
        detail = std::string(name) + ": " + rep.name + " failed";
        return false;
      }
    }
  }
  AffineModel m = loadCatalog("geodesic");
  DerivedTensors bad = corruptForNegativeControl(m, derive(m));
  auto reports = helmholtzSuite(m, bad, 8, 1e-8, 0);
  bool anyFail = false;
  for (const auto& rep : reports) anyFail = anyFail || !rep.pass;
  if (!anyFail) {
    detail = "negative control did not fail";
    return false;
  }
  return true;
}

bool fdOracle(std::string& detail) {
  for (const auto& name : catalogNames()) {
    AffineModel m = loadCatalog(name);
    DerivedTensors t = derive(m);
    auto reports = fdCrosscheck(m, t, 8, 1e-5, 0);
    for (const auto& rep : reports) {
      if (!rep.pass) {
        detail = name + ": " + rep.name + " disagrees with finite differences";
        return false;
      }
    }
  }
  return true;
}

std::string cliPath;

int runCli(const std::string& args, const std::string& outFile) {
  std::string cmd = "\"" + cliPath + "\" " + args + " > " + outFile + " 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool determinism(std::string& detail) {
  if (cliPath.empty()) {
    detail = "CLI path not supplied in argv[1]";
    return false;
  }
  int rc1 = runCli("analyze catalog:bubble --seed 0", "/tmp/ostro_a1.txt");
  int rc2 = runCli("analyze catalog:bubble --seed 0", "/tmp/ostro_a2.txt");
  if (rc1 != 0 || rc2 != 0) {
    detail = "analyze exited nonzero";
    return false;
  }
  if (slurp("/tmp/ostro_a1.txt") != slurp("/tmp/ostro_a2.txt")) {
    detail = "analyze outputs differ";
    return false;
  }
  // identical invocations end to end: same output path, snapshot in between
  std::string integrateArgs =
      "integrate catalog:bubble --ic \"0,1;1,0.1\" --gauge \"u_t = 0\" "
      "--span 3 --seed 0 --out /tmp/ostro_traj.csv";
  rc1 = runCli(integrateArgs, "/tmp/ostro_i1.txt");
  std::string csv1 = slurp("/tmp/ostro_traj.csv");
  rc2 = runCli(integrateArgs, "/tmp/ostro_i2.txt");
  std::string csv2 = slurp("/tmp/ostro_traj.csv");
  if (rc1 != 0 || rc2 != 0) {
    detail = "integrate exited nonzero";
    return false;
  }
  if (csv1 != csv2) {
    detail = "trajectory CSVs differ";
    return false;
  }
  if (slurp("/tmp/ostro_i1.txt") != slurp("/tmp/ostro_i2.txt")) {
    detail = "integrate summaries differ";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) cliPath = argv[1];

  criterion(1, "chiral oscillator: symmetry violated, {C,C} = lambda eps, dof 3",
            chiralOscillator, 1.0);
  criterion(2, "geodesic model: M = -2g, secondaries, Omega blocks, dof = N",
            geodesicModel, 2.0);
  criterion(3, "charged bubble: momenta, rank-1 M, projections, Virasoro pair",
            chargedBubble, 5.0);
  criterion(4, "regular dof law on three random symmetric models",
            regularDofLaw, 10.0);
  criterion(5, "gauge invariance of M, F, N, X under three shifts",
            gaugeInvariance, 0.0);
  criterion(6, "conservation: E2 drift, EoM residual, Noether monitor",
            conservation, 0.0);
  criterion(7, "Helmholtz suite on symmetric catalog models + negative control",
            helmholtz, 0.0);
  criterion(8, "finite-difference oracle over every derived tensor",
            fdOracle, 0.0);
  criterion(9, "byte-identical CLI outputs for identical invocations",
            determinism, 0.0);

  if (failures == 0) {
    std::cout << "all acceptance criteria passed\n";
    return 0;
  }
  std::cout << failures << " acceptance criteria failed\n";
  return 1;
}
