#include <doctest.h>

#include <cmath>

#include "ostro/affine_model.hpp"
#include "ostro/calculus.hpp"
#include "ostro/catalog.hpp"
#include "ostro/error.hpp"
#include "ostro/model_file.hpp"
#include "ostro/parse.hpp"
#include "ostro/simplify.hpp"
#include "ostro/surface.hpp"

using namespace ostro;

namespace {

bool equalOnModel(const AffineModel& m, const Expr& a, const Expr& b,
                  double tol = 1e-9, std::uint64_t seed = 0) {
  return equalProbabilistic(a, b, m.chart(), m.domain(), 8, tol, seed);
}

bool zeroOnModel(const AffineModel& m, const Expr& a, double tol = 1e-9) {
  return simplify(a).isZero() || equalOnModel(m, simplify(a), Expr(), tol);
}

}  // namespace

TEST_CASE("load: chiral oscillator validates") {
  AffineModel m = loadCatalog("chiral");
  CHECK(m.dim() == 2);
  CHECK(m.K().size() == 2);
  CHECK(m.guards().empty());
}

TEST_CASE("load: acceleration-dependent V is rejected") {
  auto chart = Chart::make({"x"}, {});
  SymVector K(1);
  K[0] = Expr();
  Expr badV = parse("xddot^2", *chart);
  CHECK_THROWS_AS(AffineModel::make("bad", chart, K, badV, {}, {}, {}),
                  ValidationError);
}

TEST_CASE("load: bubble with guards validates") {
  AffineModel m = loadCatalog("bubble");
  CHECK(m.dim() == 2);
  CHECK(m.guards().size() == 3);
  CHECK(m.signature()[0] == -1.0);
  CHECK(m.signature()[1] == 1.0);
}

TEST_CASE("check_affine_symmetry: chiral fails with residual lambda*eps") {
  AffineModel m = loadCatalog("chiral");
  auto rep = checkAffineSymmetry(m);
  CHECK_FALSE(rep.symmetric);
  // residual_{01} = dK_x/dydot - dK_y/dxdot = lambda
  Expr lambda = Expr::sym(m.chart()->find("lambda"));
  CHECK(rep.residual(0, 1).same(simplify(lambda)));
  CHECK(rep.residual(1, 0).same(simplify(-lambda)));
}

TEST_CASE("check_affine_symmetry: geodesic passes trivially") {
  CHECK(checkAffineSymmetry(loadCatalog("geodesic")).symmetric);
}

TEST_CASE("check_affine_symmetry: bubble residual simplifies to zero") {
  AffineModel m = loadCatalog("bubble");
  auto rep = checkAffineSymmetry(m);
  CHECK(rep.symmetric);
  CHECK(rep.residual(0, 1).isZero());  // symbolic zero, not only numeric
}

TEST_CASE("derive: geodesic mass matrix is -2g") {
  AffineModel m = loadCatalog("geodesic");
  DerivedTensors t = derive(m);
  const Chart& c = *m.chart();
  // g = w_munu - (d_nu w_mu + d_mu w_nu)/2 with w_munu = d2V/dxdot2 / 2
  for (int mu = 0; mu < 2; ++mu) {
    for (int nu = 0; nu < 2; ++nu) {
      Expr w = simplify(diff(diff(m.V(), c.velocity(mu)), c.velocity(nu)) *
                        Expr::rational(1, 2));
      Expr g = simplify(w - Expr::rational(1, 2) *
                                (diff(m.K()[mu], c.coordinate(nu)) +
                                 diff(m.K()[nu], c.coordinate(mu))));
      Expr expected = simplify(Expr::integer(-2) * g);
      INFO("entry ", mu, nu, ": ", t.M(mu, nu).str(), " vs ", expected.str());
      CHECK(t.M(mu, nu).same(expected));
    }
  }
}

TEST_CASE("derive: bubble momenta match the closed forms") {
  AffineModel m = loadCatalog("bubble");
  DerivedTensors t = derive(m);
  const Chart& c = *m.chart();
  Expr pt = parse("-2*alpha*r*tdot^2/(tdot^2-rdot^2) - beta*q^2/r", c);
  Expr pr = parse("2*alpha*r*rdot*tdot/(tdot^2-rdot^2)", c);
  CHECK(equalOnModel(m, t.p[0], pt, 1e-10));
  CHECK(equalOnModel(m, t.p[1], pr, 1e-10));
  CHECK(t.P[0].same(simplify(parse("alpha*r^2*rdot/(tdot^2-rdot^2)", c))));
}

TEST_CASE("derive: chiral mass matrix is -m * identity") {
  AffineModel m = loadCatalog("chiral");
  DerivedTensors t = derive(m);
  Expr mm = Expr::sym(m.chart()->find("m"));
  CHECK(t.M(0, 0).same(simplify(-mm)));
  CHECK(t.M(1, 1).same(simplify(-mm)));
  CHECK(t.M(0, 1).isZero());
  CHECK(t.M(1, 0).isZero());
}

TEST_CASE("derive: curl matrices are exactly antisymmetric") {
  for (const auto& name : catalogNames()) {
    AffineModel m = loadCatalog(name);
    DerivedTensors t = derive(m);
    for (int mu = 0; mu < m.dim(); ++mu) {
      CHECK(t.Ncurl(mu, mu).isZero());
      CHECK(t.X(mu, mu).isZero());
      CHECK(t.Theta(mu, mu).isZero());
      for (int nu = 0; nu < m.dim(); ++nu) {
        CHECK(t.X(mu, nu).same(simplify(-t.X(nu, mu))));
        CHECK(t.Ncurl(mu, nu).same(simplify(-t.Ncurl(nu, mu))));
        CHECK(t.Theta(mu, nu).same(simplify(-t.Theta(nu, mu))));
      }
    }
  }
}

TEST_CASE("derive: H0 coincides with E2 and the energy identity holds") {
  for (const auto& name : catalogNames()) {
    AffineModel m = loadCatalog(name);
    DerivedTensors t = derive(m);
    CHECK(zeroOnModel(m, t.H0 - t.E2));
    // E2 = (dV/dxdot) xdot - V + (dE1/dx) xdot
    const Chart& c = *m.chart();
    Expr rhs;
    for (int mu = 0; mu < m.dim(); ++mu) {
      rhs = rhs + diff(m.V(), c.velocity(mu)) * Expr::sym(c.velocity(mu)) +
            diff(t.E1, c.coordinate(mu)) * Expr::sym(c.velocity(mu));
    }
    rhs = rhs - m.V();
    CHECK(zeroOnModel(m, t.E2 - rhs));
  }
}

TEST_CASE("derive: M is symmetric when the affine-symmetry condition holds") {
  for (const auto& name : {"geodesic", "bubble"}) {
    AffineModel m = loadCatalog(name);
    DerivedTensors t = derive(m);
    for (int mu = 0; mu < m.dim(); ++mu) {
      for (int nu = 0; nu < m.dim(); ++nu) {
        CHECK(zeroOnModel(m, t.M(mu, nu) - t.M(nu, mu)));
      }
    }
  }
}

TEST_CASE("derive: Bianchi identity for X") {
  for (const auto& name : catalogNames()) {
    AffineModel m = loadCatalog(name);
    DerivedTensors t = derive(m);
    const Chart& c = *m.chart();
    const int n = m.dim();
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = 0; nu < n; ++nu) {
        for (int rho = 0; rho < n; ++rho) {
          Expr b = diff(t.X(mu, nu), c.coordinate(rho)) +
                   diff(t.X(rho, mu), c.coordinate(nu)) +
                   diff(t.X(nu, rho), c.coordinate(mu));
          CHECK(zeroOnModel(m, b));
        }
      }
    }
  }
}

TEST_CASE("gauge_shift: Y = 0 returns an identical model") {
  AffineModel m = loadCatalog("geodesic");
  AffineModel shifted = gaugeShift(m, Expr());
  for (int mu = 0; mu < m.dim(); ++mu) {
    CHECK(shifted.K()[mu].same(m.K()[mu]));
  }
  CHECK(shifted.V().same(m.V()));
}

TEST_CASE("gauge_shift: bubble surface term is removed by its own Lambda") {
  AffineModel m = loadCatalog("bubble");
  Expr Y = parse("alpha*r^2*atanh(rdot/tdot)", *m.chart());
  AffineModel shifted = gaugeShift(m, Y);
  CHECK(shifted.K()[0].isZero());
  CHECK(shifted.K()[1].isZero());
}

TEST_CASE("gauge_shift: constant shift leaves M untouched") {
  AffineModel m = loadCatalog("geodesic");
  Expr Y = parse("c*xdot", *m.chart());  // dY/dxdot = c, constant
  AffineModel shifted = gaugeShift(m, Y);
  Expr cParam = Expr::sym(m.chart()->find("c"));
  CHECK(shifted.K()[0].same(simplify(m.K()[0] + cParam)));
  DerivedTensors t0 = derive(m);
  DerivedTensors t1 = derive(shifted);
  for (int mu = 0; mu < 2; ++mu)
    for (int nu = 0; nu < 2; ++nu)
      CHECK(equalOnModel(m, t0.M(mu, nu), t1.M(mu, nu)));
}

TEST_CASE("gauge invariance of M, F, Ncurl, X across three shifts") {
  for (const auto& name : catalogNames()) {
    AffineModel m = loadCatalog(name);
    const Chart& c = *m.chart();
    std::vector<Expr> shifts = {
        parse(std::string("sin(") + c.coordinateNames()[0] + ")*" +
                  Chart::derivName(c.coordinateNames()[0], 1),
              c),
        parse(c.coordinateNames()[0] + "^2*" +
                  Chart::derivName(c.coordinateNames()[1], 1),
              c),
        parse(Chart::derivName(c.coordinateNames()[0], 1) + "*" +
                  Chart::derivName(c.coordinateNames()[1], 1) + " + " +
                  c.coordinateNames()[1],
              c),
    };
    DerivedTensors t0 = derive(m);
    for (const auto& Y : shifts) {
      DerivedTensors t1 = derive(gaugeShift(m, Y));
      for (int mu = 0; mu < m.dim(); ++mu) {
        CHECK(equalOnModel(m, t0.F[mu], t1.F[mu]));
        for (int nu = 0; nu < m.dim(); ++nu) {
          CHECK(equalOnModel(m, t0.M(mu, nu), t1.M(mu, nu)));
          CHECK(equalOnModel(m, t0.Ncurl(mu, nu), t1.Ncurl(mu, nu)));
          CHECK(equalOnModel(m, t0.X(mu, nu), t1.X(mu, nu)));
        }
      }
    }
  }
}

TEST_CASE("surface_decompose: bubble boundary function") {
  AffineModel m = loadCatalog("bubble");
  DerivedTensors t = derive(m);
  SurfaceSplit split = surfaceDecompose(m, t);
  Expr expected = parse("-alpha*r^2*atanh(rdot/tdot)", *m.chart());
  CHECK(equalOnModel(m, split.Lambda, expected));
  CHECK(split.Lambda.same(simplify(expected)));
  REQUIRE(split.separable);
  CHECK(split.g.same(simplify(parse("alpha*r^2", *m.chart()))));
  CHECK(split.h.same(simplify(parse("-atanh(rdot/tdot)", *m.chart()))));
}

TEST_CASE("surface_decompose: L_d + L_s == L and momenta split adds up") {
  for (const auto& name : {"geodesic", "bubble"}) {
    AffineModel m = loadCatalog(name);
    DerivedTensors t = derive(m);
    SurfaceSplit split = surfaceDecompose(m, t);
    CHECK(zeroOnModel(m, split.Ld + split.Ls - m.lagrangian()));
    CHECK_FALSE(split.Ld.dependsOn(m.chart()->acceleration(0)));
    CHECK_FALSE(split.Ld.dependsOn(m.chart()->acceleration(1)));
    for (int mu = 0; mu < m.dim(); ++mu) {
      CHECK(zeroOnModel(m, split.pBold[mu] + split.pFrak[mu] - t.p[mu]));
    }
    // Theta_mn = d pFrak_n / dxdot^m - d pFrak_m / dxdot^n
    const Chart& c = *m.chart();
    for (int mu = 0; mu < m.dim(); ++mu) {
      for (int nu = 0; nu < m.dim(); ++nu) {
        Expr rhs = diff(split.pFrak[nu], c.velocity(mu)) -
                   diff(split.pFrak[mu], c.velocity(nu));
        CHECK(zeroOnModel(m, t.Theta(mu, nu) - rhs));
      }
    }
  }
}

TEST_CASE("surface_decompose: geodesic Lambda = w_mu(x) xdot^mu") {
  AffineModel m = loadCatalog("geodesic");
  SurfaceSplit split = surfaceDecompose(m, derive(m));
  Expr expected = parse("c*x*y*xdot", *m.chart());
  CHECK(equalOnModel(m, split.Lambda, expected));
  CHECK(split.separable);  // single product: g = c x y, h = xdot
  CHECK(split.g.same(simplify(parse("c*x*y", *m.chart()))));
  CHECK(split.h.same(Expr::sym(m.chart()->velocity(0))));
}

TEST_CASE("surface_decompose: two-potential K gives a non-separable Lambda") {
  auto chart = Chart::make({"x", "y"}, {"c"});
  SymVector K(2);
  K[0] = parse("c*x*y", *chart);
  K[1] = parse("x^2", *chart);
  Expr V = parse("xdot^2 + ydot^2", *chart);
  AffineModel m = AffineModel::make("twopot", chart, K, V, {}, {}, {1.0});
  SurfaceSplit split = surfaceDecompose(m, derive(m));
  CHECK(equalOnModel(m, split.Lambda, parse("c*x*y*xdot + x^2*ydot", *chart)));
  CHECK_FALSE(split.separable);
  CHECK(zeroOnModel(m, split.Ld + split.Ls - m.lagrangian()));
}

TEST_CASE("surface_decompose: chiral reports symmetry violation") {
  AffineModel m = loadCatalog("chiral");
  DerivedTensors t = derive(m);
  try {
    surfaceDecompose(m, t);
    FAIL("expected symmetry-violated error");
  } catch (const OstroError& e) {
    CHECK(e.code() == Err::SymmetryViolated);
  }
}

TEST_CASE("zermelo: bubble is covariant and its energies vanish") {
  AffineModel m = loadCatalog("bubble");
  auto rep = zermeloCheck(m);
  CHECK(rep.covariant);
  DerivedTensors t = derive(m);
  CHECK(t.E1.isZero());
  CHECK(t.E2.isZero());
}

TEST_CASE("zermelo: chiral is not covariant (I2 != L)") {
  AffineModel m = loadCatalog("chiral");
  auto rep = zermeloCheck(m);
  CHECK_FALSE(rep.covariant);
  CHECK(rep.maxI1Residual <= 1e-12);  // I1 = lambda(ydot xdot - xdot ydot) = 0
  CHECK(rep.maxI2Residual > 1e-3);
}

TEST_CASE("zermelo: homogeneous degree-one V with K = 0 is covariant") {
  auto chart = Chart::make({"x", "y"}, {"cc"});
  SymVector K(2);
  K[0] = Expr();
  K[1] = Expr();
  Expr V = parse("cc*sqrt(xdot^2 + ydot^2)", *chart);
  AffineModel m = AffineModel::make(
      "homog", chart, K, V, {}, {parse("xdot^2 + ydot^2", *chart)}, {1.0});
  CHECK(zermeloCheck(m).covariant);
}

TEST_CASE("covariant factorization: M xdot = 0 for the bubble") {
  AffineModel m = loadCatalog("bubble");
  DerivedTensors t = derive(m);
  const Chart& c = *m.chart();
  for (int mu = 0; mu < 2; ++mu) {
    Expr contracted;
    for (int nu = 0; nu < 2; ++nu) {
      contracted = contracted + t.M(mu, nu) * Expr::sym(c.velocity(nu));
    }
    CHECK(zeroOnModel(m, contracted));
  }
}

TEST_CASE("euler_lagrange_residual: constant curve gives -F(x0, 0)") {
  AffineModel m = loadCatalog("geodesic");
  DerivedTensors t = derive(m);
  CurveSamples curve;
  curve.times = {0.0};
  curve.x = {Eigen::Vector2d(0.4, -0.3)};
  curve.xdot = {Eigen::Vector2d(0.0, 0.0)};
  curve.xddot = {Eigen::Vector2d(0.0, 0.0)};
  Eigen::MatrixXd res = eulerLagrangeResidual(m, t, curve);
  Binding b = m.parameterBinding();
  b.set(m.chart()->coordinate(0), 0.4);
  b.set(m.chart()->coordinate(1), -0.3);
  b.set(m.chart()->velocity(0), 0.0);
  b.set(m.chart()->velocity(1), 0.0);
  for (int mu = 0; mu < 2; ++mu) {
    CHECK(res(0, mu) == doctest::Approx(-evaluate(t.F[mu], b)).epsilon(1e-12));
  }
}

TEST_CASE("euler_lagrange_residual: chiral circular orbit solves E0(L)") {
  AffineModel m = loadCatalog("chiral");
  DerivedTensors t = derive(m);
  // xdot = (cos wt, sin wt) with w = m/lambda = 1 at catalog defaults
  const double w = 1.0;
  CurveSamples curve;
  for (double tau : {0.0, 0.5, 1.0, 2.5}) {
    curve.times.push_back(tau);
    curve.x.push_back(
        Eigen::Vector2d(std::sin(w * tau) / w, -std::cos(w * tau) / w));
    curve.xdot.push_back(Eigen::Vector2d(std::cos(w * tau), std::sin(w * tau)));
    curve.xddot.push_back(
        Eigen::Vector2d(-w * std::sin(w * tau), w * std::cos(w * tau)));
    curve.xdddot.push_back(Eigen::Vector2d(-w * w * std::cos(w * tau),
                                           -w * w * std::sin(w * tau)));
  }
  Eigen::MatrixXd res = eulerLagrangeResidual(m, t, curve);
  CHECK(res.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("euler_lagrange_residual: third-order model needs xdddot") {
  AffineModel m = loadCatalog("chiral");
  DerivedTensors t = derive(m);
  CurveSamples curve;
  curve.times = {0.0};
  curve.x = {Eigen::Vector2d(0, 0)};
  curve.xdot = {Eigen::Vector2d(1, 0)};
  curve.xddot = {Eigen::Vector2d(0, 1)};
  try {
    eulerLagrangeResidual(m, t, curve);
    FAIL("expected missing-derivative-order error");
  } catch (const OstroError& e) {
    CHECK(e.code() == Err::MissingDerivativeOrder);
  }
}

TEST_CASE("model file: unknown section and malformed input are rejected") {
  CHECK_THROWS_AS(loadModel("[nonsense]\nx = 1\n"), ValidationError);
  CHECK_THROWS_AS(loadModel("[model]\nname = a\ndimension = 2\n"
                            "coordinates = x\n"),
                  ValidationError);
}
