#include "ostro/constraints.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ostro/calculus.hpp"
#include "ostro/error.hpp"
#include "ostro/simplify.hpp"

namespace ostro {

namespace {

Eigen::MatrixXd nullBasis(const Eigen::MatrixXd& A, double tol,
                          Eigen::VectorXd* singularValuesOut) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (singularValuesOut) *singularValuesOut = sv;
  double smax = sv.size() ? sv[0] : 0.0;
  int rank = 0;
  if (smax > 1e-300) {
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] >= tol * smax) ++rank;
    }
  }
  Eigen::MatrixXd basis =
      svd.matrixV().rightCols(A.cols() - rank).eval();
  // deterministic sign: largest-magnitude component positive
  for (int j = 0; j < basis.cols(); ++j) {
    int imax = 0;
    for (int i = 1; i < basis.rows(); ++i) {
      if (std::abs(basis(i, j)) > std::abs(basis(imax, j))) imax = i;
    }
    if (basis(imax, j) < 0) basis.col(j) = -basis.col(j);
  }
  return basis;
}

}  // namespace

ConstraintSystem buildConstraints(const AffineModel& m,
                                  const DerivedTensors& t) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  ConstraintSystem cs;
  cs.C.resize(n);
  cs.S.resize(n);
  for (int mu = 0; mu < n; ++mu) {
    cs.C[mu] = simplify(Expr::sym(c.momentumP(mu)) - m.K()[mu]);
    cs.S[mu] = simplify(Expr::sym(c.momentumQ(mu)) - t.p[mu]);
  }
  Expr h0;
  for (int mu = 0; mu < n; ++mu) {
    h0 = h0 + Expr::sym(c.momentumQ(mu)) * Expr::sym(c.velocity(mu));
  }
  cs.H0 = simplify(h0 - m.V());

  // persistence self-check: {C_mu, H0} must reproduce -S_mu
  for (int mu = 0; mu < n; ++mu) {
    Expr resid = simplify(poisson(cs.C[mu], cs.H0, c) + cs.S[mu]);
    if (!resid.isZero() &&
        !equalProbabilistic(resid, Expr(), m.chart(), m.domain())) {
      throw OstroError(Err::InconsistentClassification,
                       "persistence of C[" + std::to_string(mu) +
                           "] does not reproduce the secondary constraint");
    }
  }

  cs.omega.resize(2 * n, 2 * n);
  auto chi = [&](int i) -> const Expr& { return i < n ? cs.C[i] : cs.S[i - n]; };
  for (int i = 0; i < 2 * n; ++i) {
    cs.omega(i, i) = Expr();
    for (int j = i + 1; j < 2 * n; ++j) {
      Expr e = poisson(chi(i), chi(j), c);
      cs.omega(i, j) = e;
      cs.omega(j, i) = simplify(-e);
    }
  }
  return cs;
}

Eigen::MatrixXd omegaAt(const ConstraintSystem& cs, const AffineModel& m,
                        const PhaseState& s) {
  if (!m.admissible(s.x, s.xdot)) {
    throw OstroError(Err::GuardViolation,
                     "state violates the model guards");
  }
  return evalMatrix(cs.omega, bindState(m, s));
}

ZeroModes zeroModesAt(const DerivedTensors& t, const AffineModel& m,
                      const PhaseState& s, double tol) {
  ZeroModes zm;
  Eigen::MatrixXd M = evalMatrix(t.M, bindState(m, s));
  zm.basis = nullBasis(M, tol, &zm.singularValues);
  return zm;
}

namespace {

Expr contractNumeric(const Eigen::VectorXd& coeff, const SymVector& v) {
  Expr acc;
  for (int mu = 0; mu < v.size(); ++mu) {
    acc = acc + Expr::real(coeff[mu]) * v[mu];
  }
  return simplify(acc);
}

/// First-class verification in the weak (Dirac) sense: the bracket of a
/// candidate with every constraint must vanish after subtracting its
/// second-class components, i.e. the Dirac-corrected bracket
///   {f, g} - {f, chi_i} Winv_ij {chi_j, g}
/// is zero at the reference state. Candidates such as f2 = xi.S have raw
/// brackets proportional to second-class constraints; only the corrected
/// value decides the class. Off-surface states get slack proportional to
/// the constraint violation, since weak equalities only bind on the surface.
class FirstClassVerifier {
 public:
  FirstClassVerifier(const std::vector<Expr>& chis, const ConstraintSystem& cs,
                     const AffineModel& m, const Binding& b, double tol)
      : chis_(chis), cs_(cs), m_(m), b_(b), tol_(tol) {
    const int k = static_cast<int>(chis.size());
    W_.resize(k, k);
    const Chart& c = *m.chart();
    for (int i = 0; i < k; ++i) {
      W_(i, i) = 0.0;
      for (int j = i + 1; j < k; ++j) {
        double v = evaluate(poisson(chis[i], chis[j], c), b);
        W_(i, j) = v;
        W_(j, i) = -v;
      }
    }
    if (k > 0) lu_.compute(W_);
    double viol = 0.0;
    for (int mu = 0; mu < m.dim(); ++mu) {
      viol = std::max(viol, std::abs(evaluate(cs.C[mu], b)));
      viol = std::max(viol, std::abs(evaluate(cs.S[mu], b)));
    }
    slack_ = tol + 10.0 * viol;
  }

  void check(const Expr& f, const std::string& name) const {
    const Chart& c = *m_.chart();
    const int k = static_cast<int>(chis_.size());
    Eigen::VectorXd fChi(k);
    for (int i = 0; i < k; ++i) {
      fChi[i] = evaluate(poisson(f, chis_[i], c), b_);
    }
    for (int nu = 0; nu < m_.dim(); ++nu) {
      for (const Expr* g : {&cs_.C[nu], &cs_.S[nu]}) {
        double val = evaluate(poisson(f, *g, c), b_);
        if (k > 0) {
          Eigen::VectorXd chiG(k);
          for (int j = 0; j < k; ++j) {
            chiG[j] = evaluate(poisson(chis_[j], *g, c), b_);
          }
          val -= fChi.dot(lu_.solve(chiG));
        }
        if (std::abs(val) > slack_) {
          throw OstroError(
              Err::InconsistentClassification,
              "candidate " + name +
                  " fails its first-class bracket test (corrected bracket " +
                  std::to_string(val) + ")");
        }
      }
    }
  }

 private:
  const std::vector<Expr>& chis_;
  const ConstraintSystem& cs_;
  const AffineModel& m_;
  const Binding& b_;
  double tol_;
  double slack_ = 0.0;
  Eigen::MatrixXd W_;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace

Classification classify(const ConstraintSystem& cs, const DerivedTensors& t,
                        const AffineModel& m, const PhaseState& s,
                        double tol) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  Classification out;
  out.at = s;
  out.tol = tol;
  out.symmetricModel = checkAffineSymmetry(m).symmetric;
  out.thirdOrder = !out.symmetricModel;
  Binding b = bindState(m, s);

  if (out.thirdOrder) {
    // No secondary constraints: persistence only restricts the multipliers.
    // The primaries are classified through their own bracket matrix
    // {C_mu, C_nu} = Ncurl.
    Eigen::MatrixXd Nmat = evalMatrix(t.Ncurl, b);
    Eigen::VectorXd sv;
    Eigen::MatrixXd xi = nullBasis(Nmat, 1e-9, &sv);
    out.xiBasis = xi;
    if (xi.cols() == 0) {
      for (int mu = 0; mu < n; ++mu) {
        out.secondClass.push_back(cs.C[mu]);
        out.secondClassNames.push_back("C_" + c.coordinateNames()[mu]);
      }
    } else {
      // independent second-class subset: range directions of {C, C}
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          Nmat, Eigen::ComputeFullU | Eigen::ComputeFullV);
      int rank = n - static_cast<int>(xi.cols());
      for (int j = 0; j < rank; ++j) {
        out.secondClass.push_back(
            contractNumeric(svd.matrixV().col(j), cs.C));
        out.secondClassNames.push_back("chi_(" + std::to_string(j) + ")");
      }
    }
    for (int j = 0; j < xi.cols(); ++j) {
      Expr f = contractNumeric(xi.col(j), cs.C);
      // against the primaries only: there are no secondary constraints here
      for (int nu = 0; nu < n; ++nu) {
        double v = std::abs(evaluate(poisson(f, cs.C[nu], c), b));
        if (v > tol) {
          throw OstroError(Err::InconsistentClassification,
                           "null direction of {C,C} fails its bracket test");
        }
      }
      out.firstClass.push_back(f);
      out.firstClassNames.push_back("f1_(" + std::to_string(j) + ")");
    }
    int nF = static_cast<int>(out.firstClass.size());
    int nS = static_cast<int>(out.secondClass.size());
    out.dof = (4 * n - 2 * nF - nS) / 2;
    return out;
  }

  ZeroModes zm = zeroModesAt(t, m, s, 1e-9);
  const int k = static_cast<int>(zm.basis.cols());
  out.xiBasis = zm.basis;

  if (k == 0) {
    for (int mu = 0; mu < n; ++mu) {
      out.secondClass.push_back(cs.C[mu]);
      out.secondClassNames.push_back("C_" + c.coordinateNames()[mu]);
    }
    for (int mu = 0; mu < n; ++mu) {
      out.secondClass.push_back(cs.S[mu]);
      out.secondClassNames.push_back("S_" + c.coordinateNames()[mu]);
    }
    out.dof = n;  // (4N - 2N)/2
    return out;
  }

  // Is the velocity field itself a zero mode? Then the projections can be
  // written symbolically, as for reparametrization-invariant models.
  bool velocityMode = true;
  for (int mu = 0; mu < n && velocityMode; ++mu) {
    Expr contracted;
    for (int nu = 0; nu < n; ++nu) {
      contracted = contracted + t.M(mu, nu) * Expr::sym(c.velocity(nu));
    }
    contracted = simplify(contracted);
    velocityMode =
        contracted.isZero() ||
        equalProbabilistic(contracted, Expr(), m.chart(), m.domain());
  }

  if (velocityMode && n == 2 && k == 1) {
    Expr f1, f2;
    for (int mu = 0; mu < n; ++mu) {
      f1 = f1 + Expr::sym(c.velocity(mu)) * cs.C[mu];
      f2 = f2 + Expr::sym(c.velocity(mu)) * cs.S[mu];
    }
    f1 = simplify(f1);
    f2 = simplify(f2);
    // metric-orthogonal direction to xdot (times the norm N, scale-free)
    SymVector nraw(2);
    nraw[0] = simplify(Expr::real(m.signature()[1]) *
                       Expr::sym(c.velocity(1)));
    nraw[1] = simplify(Expr::real(-m.signature()[0]) *
                       Expr::sym(c.velocity(0)));
    Expr chi1, chi2;
    for (int mu = 0; mu < n; ++mu) {
      chi1 = chi1 + nraw[mu] * cs.C[mu];
      chi2 = chi2 + nraw[mu] * cs.S[mu];
    }
    chi1 = simplify(chi1);
    chi2 = simplify(chi2);
    std::vector<Expr> chis = {chi1, chi2};
    FirstClassVerifier verifier(chis, cs, m, b, tol);
    verifier.check(f1, "f1");
    verifier.check(f2, "f2");
    out.firstClass = {f1, f2};
    out.firstClassNames = {"f1", "f2"};
    out.secondClass = {chi1, chi2};
    out.secondClassNames = {"s1", "s2"};
    out.dof = n - k;  // (4N - 2*2k - (2N - 2k))/2
    return out;
  }

  // numeric projections: xi columns give the first-class combinations,
  // the metric-orthogonal completion gives the second-class ones
  for (int j = 0; j < k; ++j) {
    out.firstClass.push_back(contractNumeric(zm.basis.col(j), cs.C));
    out.firstClassNames.push_back("f1_(" + std::to_string(j) + ")");
    out.firstClass.push_back(contractNumeric(zm.basis.col(j), cs.S));
    out.firstClassNames.push_back("f2_(" + std::to_string(j) + ")");
  }
  // Gram-Schmidt under the declared metric against the zero modes
  Eigen::VectorXd g = m.signature();
  std::vector<Eigen::VectorXd> normals;
  auto gdot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& v) {
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += g[i] * a[i] * v[i];
    return acc;
  };
  for (int cand = 0; cand < n && static_cast<int>(normals.size()) < n - k;
       ++cand) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, cand);
    for (int j = 0; j < k; ++j) {
      const Eigen::VectorXd xi = zm.basis.col(j);
      double denom = gdot(xi, xi);
      if (std::abs(denom) < 1e-12) continue;
      v -= (gdot(v, xi) / denom) * xi;
    }
    for (const auto& w : normals) {
      double denom = gdot(w, w);
      v -= (gdot(v, w) / denom) * w;
    }
    double norm2 = gdot(v, v);
    if (std::abs(norm2) < 1e-10) continue;
    normals.push_back(v / std::sqrt(std::abs(norm2)));
  }
  if (static_cast<int>(normals.size()) != n - k) {
    throw OstroError(Err::InconsistentClassification,
                     "could not complete the zero modes to a basis under the "
                     "declared metric");
  }
  int idx = 0;
  for (const auto& nv : normals) {
    out.secondClass.push_back(contractNumeric(nv, cs.C));
    out.secondClassNames.push_back("chi1_(" + std::to_string(idx) + ")");
    out.secondClass.push_back(contractNumeric(nv, cs.S));
    out.secondClassNames.push_back("chi2_(" + std::to_string(idx) + ")");
    ++idx;
  }
  FirstClassVerifier verifier(out.secondClass, cs, m, b, tol);
  for (std::size_t j = 0; j < out.firstClass.size(); ++j) {
    verifier.check(out.firstClass[j], out.firstClassNames[j]);
  }
  out.dof = n - k;
  return out;
}

double diracBracket(const Expr& F, const Expr& G, const ConstraintSystem& cs,
                    const DerivedTensors& t, const AffineModel& m,
                    const PhaseState& s, double tol) {
  requirePhaseFunction(F);
  requirePhaseFunction(G);
  const Chart& c = *m.chart();
  Binding b = bindState(m, s);
  Classification cls = classify(cs, t, m, s);
  const auto& chi = cls.secondClass;
  const int k = static_cast<int>(chi.size());
  double plain = evaluate(poisson(F, G, c), b);
  if (k == 0) return plain;

  Eigen::MatrixXd W(k, k);
  for (int i = 0; i < k; ++i) {
    W(i, i) = 0.0;
    for (int j = i + 1; j < k; ++j) {
      double v = evaluate(poisson(chi[i], chi[j], c), b);
      W(i, j) = v;
      W(j, i) = -v;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      W, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv[0], smin = sv[k - 1];
  double cond = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (smin <= tol * smax) {
    throw SingularOmegaError(
        "second-class bracket matrix is singular at this state", cond);
  }
  Eigen::VectorXd fChi(k), chiG(k);
  for (int i = 0; i < k; ++i) {
    fChi[i] = evaluate(poisson(F, chi[i], c), b);
    chiG[i] = evaluate(poisson(chi[i], G, c), b);
  }
  Eigen::VectorXd winvChiG = svd.solve(chiG);
  return plain - fChi.dot(winvChiG);
}

Eigen::VectorXd lagrangianConstraintsAt(const DerivedTensors& t,
                                        const AffineModel& m,
                                        const PhaseState& s, double tol) {
  ZeroModes zm = zeroModesAt(t, m, s, tol);
  Binding b = bindState(m, s);
  Eigen::VectorXd Fv = evalVector(t.F, b);
  Eigen::VectorXd out(zm.basis.cols());
  for (int j = 0; j < zm.basis.cols(); ++j) {
    out[j] = zm.basis.col(j).dot(Fv);
  }
  return out;
}

MultiplierSolution multiplierSolve(const DerivedTensors& t,
                                   const AffineModel& m, const PhaseState& s,
                                   double rankTol, double residualTol) {
  Binding b = bindState(m, s);
  Eigen::MatrixXd M = evalMatrix(t.M, b);
  Eigen::VectorXd F = evalVector(t.F, b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(rankTol);
  MultiplierSolution sol;
  sol.u = svd.solve(F);  // truncated-SVD minimum-norm least squares
  sol.family = nullBasis(M, rankTol, nullptr);
  sol.unique = sol.family.cols() == 0;
  sol.residual = (M * sol.u - F).norm();
  if (sol.residual > residualTol * (1.0 + F.norm())) {
    throw OstroError(Err::NoSolution,
                     "multiplier equation M u = F has no solution at this "
                     "state (residual " + std::to_string(sol.residual) + ")");
  }
  return sol;
}

}  // namespace ostro
