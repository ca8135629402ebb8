#include "ostro/report.hpp"

#include <cstdio>
#include <sstream>

#include "ostro/error.hpp"
#include "ostro/phase.hpp"
#include "ostro/simplify.hpp"

namespace ostro {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string vec(const Eigen::VectorXd& v) {
  std::string out = "(";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += num(v[i]);
  }
  return out + ")";
}

void tensorBlock(std::ostream& os, const std::string& label,
                 const SymMatrix& mat, const Chart& c) {
  for (int mu = 0; mu < mat.rows(); ++mu) {
    for (int nu = 0; nu < mat.cols(); ++nu) {
      os << "  " << label << "[" << c.coordinateNames()[mu] << "]["
         << c.coordinateNames()[nu] << "] = " << mat(mu, nu).str() << "\n";
    }
  }
}

void vectorBlock(std::ostream& os, const std::string& label,
                 const SymVector& v, const Chart& c) {
  for (int mu = 0; mu < v.size(); ++mu) {
    os << "  " << label << "[" << c.coordinateNames()[mu]
       << "] = " << v[mu].str() << "\n";
  }
}

}  // namespace

RunReport analyzeModel(const AffineModel& m, const ReportOptions& opts) {
  const Chart& c = *m.chart();
  const int n = m.dim();
  RunReport rep;
  rep.modelName = m.name();
  std::ostringstream os;

  os << "model: " << m.name() << " (dimension " << n << ", coordinates";
  for (int mu = 0; mu < n; ++mu) {
    os << (mu ? ", " : " ") << c.coordinateNames()[mu];
  }
  os << ")\n";
  os << "parameters:";
  const auto& params = c.parameters();
  if (params.empty()) os << " none";
  for (std::size_t i = 0; i < params.size(); ++i) {
    os << (i ? ", " : " ") << params[i].name() << " = "
       << num(m.paramDefaults()[i]);
  }
  os << "\n";
  os << "metric signature: (";
  for (int mu = 0; mu < n; ++mu) {
    os << (mu ? ", " : "") << (m.signature()[mu] > 0 ? "+1" : "-1");
  }
  os << ")\n";
  if (!m.guards().empty()) {
    os << "guards:";
    for (std::size_t i = 0; i < m.guards().size(); ++i) {
      os << (i ? ", " : " ") << m.guards()[i].str() << " > 0";
    }
    os << "\n";
  }

  os << "\n[lagrangian]\n";
  vectorBlock(os, "K", m.K(), c);
  os << "  V = " << m.V().str() << "\n";

  DerivedTensors t = derive(m);
  SymmetryReport sym = checkAffineSymmetry(m, opts.points, opts.tol, opts.seed);
  rep.symmetric = sym.symmetric;
  os << "\n[affine symmetry]\n";
  os << "  symmetric = " << (sym.symmetric ? "true" : "false") << " (tol "
     << num(opts.tol) << ", seed " << opts.seed << ", " << opts.points
     << " points)\n";
  if (!sym.symmetric) {
    tensorBlock(os, "residual", sym.residual, c);
    os << "  note = equations of motion are third order; no surface term "
          "exists\n";
  }

  os << "\n[derived tensors]\n";
  vectorBlock(os, "P", t.P, c);
  vectorBlock(os, "p", t.p, c);
  tensorBlock(os, "M", t.M, c);
  vectorBlock(os, "F", t.F, c);
  tensorBlock(os, "N", t.Ncurl, c);
  tensorBlock(os, "X", t.X, c);
  tensorBlock(os, "Theta", t.Theta, c);
  os << "  E1 = " << t.E1.str() << "\n";
  os << "  E2 = " << t.E2.str() << "\n";
  os << "  H0 = " << t.H0.str() << "\n";

  ConstraintSystem cs = buildConstraints(m, t);
  os << "\n[constraints]\n";
  vectorBlock(os, "C", cs.C, c);
  if (rep.symmetric) {
    vectorBlock(os, "S", cs.S, c);
    os << "  persistence {C, H0} = -S verified symbolically\n";
  } else {
    os << "  {C, C} = N (see above); persistence of C only restricts the "
          "multipliers, no secondary constraints arise\n";
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = mu + 1; nu < n; ++nu) {
        os << "  {C[" << c.coordinateNames()[mu] << "], C["
           << c.coordinateNames()[nu] << "]} = "
           << poisson(cs.C[mu], cs.C[nu], c).str() << "\n";
      }
    }
  }

  DetRng rng(opts.seed);
  PhaseState ref = samplePhaseState(m, rng);
  ref = projectInitial(m, t, ref.x, ref.xdot);
  Classification cls = classify(cs, t, m, ref, 1e-8);
  rep.dof = cls.dof;
  os << "  classification at x = " << vec(ref.x)
     << ", xdot = " << vec(ref.xdot) << " (projected onto the constraint "
     << "surface, tol " << num(cls.tol) << ", seed " << opts.seed << "):\n";
  if (cls.firstClass.empty()) {
    os << "    first class: none\n";
  } else {
    for (std::size_t i = 0; i < cls.firstClass.size(); ++i) {
      os << "    first class " << cls.firstClassNames[i] << " = "
         << cls.firstClass[i].str() << "\n";
    }
  }
  for (std::size_t i = 0; i < cls.secondClass.size(); ++i) {
    os << "    second class " << cls.secondClassNames[i] << " = "
       << cls.secondClass[i].str() << "\n";
  }
  os << "    dof = " << cls.dof << "\n";

  os << "\n[surface split]\n";
  try {
    SurfaceSplit split = surfaceDecompose(m, t, opts.points, opts.tol,
                                          opts.seed);
    rep.surfaceSplitFound = true;
    os << "  Lambda = " << split.Lambda.str() << "\n";
    if (split.separable) {
      os << "  separable: g = " << split.g.str() << ", h = " << split.h.str()
         << "\n";
    } else {
      os << "  separable: no\n";
    }
    os << "  L_s = d/dtau[Lambda]\n";
    os << "  L_d = " << split.Ld.str() << "\n";
  } catch (const OstroError& e) {
    if (e.code() != Err::SymmetryViolated &&
        e.code() != Err::AntiderivativeNotFound) {
      throw;
    }
    os << "  not available: " << e.what() << "\n";
  }

  ZermeloReport z = zermeloCheck(m, opts.points, opts.tol, opts.seed);
  rep.covariant = z.covariant;
  os << "\n[zermelo]\n";
  os << "  covariant = " << (z.covariant ? "true" : "false")
     << " (max |I1| = " << num(z.maxI1Residual)
     << ", max |I2 - L| = " << num(z.maxI2Residual) << ", tol " << num(z.tol)
     << ", seed " << z.seed << ")\n";

  if (opts.withHelmholtz) {
    os << "\n[helmholtz]\n";
    if (!sym.symmetric) {
      os << "  skipped: affine symmetry violated\n";
    } else {
      auto reports = helmholtzSuite(m, t, opts.points,
                                    std::max(opts.tol, 1e-8), opts.seed);
      for (const auto& r : reports) {
        rep.helmholtzAllPass = rep.helmholtzAllPass && r.pass;
      }
      printReports(os, reports);
    }
  }

  rep.text = os.str();
  return rep;
}

std::string decomposeReport(const AffineModel& m, const ReportOptions& opts) {
  std::ostringstream os;
  DerivedTensors t = derive(m);
  os << "model: " << m.name() << "\n";
  try {
    SurfaceSplit split =
        surfaceDecompose(m, t, opts.points, opts.tol, opts.seed);
    os << "Lambda = " << split.Lambda.str() << "\n";
    if (split.separable) {
      os << "g = " << split.g.str() << "\n";
      os << "h = " << split.h.str() << "\n";
    } else {
      os << "separable: no (using the boundary function directly)\n";
    }
    os << "L_s = d/dtau[" << split.Lambda.str() << "]\n";
    os << "L_d = " << split.Ld.str() << "\n";
    const Chart& c = *m.chart();
    for (int mu = 0; mu < m.dim(); ++mu) {
      os << "p_bold[" << c.coordinateNames()[mu]
         << "] = " << split.pBold[mu].str() << "\n";
    }
    for (int mu = 0; mu < m.dim(); ++mu) {
      os << "p_frak[" << c.coordinateNames()[mu]
         << "] = " << split.pFrak[mu].str() << "\n";
    }
  } catch (const OstroError& e) {
    if (e.code() == Err::SymmetryViolated) {
      os << "no surface term: dK_mu/dxdot^nu is not symmetric (third-order "
            "equations of motion)\n";
    } else {
      throw;
    }
  }
  return os.str();
}

std::string trajectorySummary(const Trajectory& traj, const AffineModel& m) {
  (void)m;
  std::ostringstream os;
  if (traj.times.empty()) return "empty trajectory\n";
  os << "steps accepted = " << traj.times.size() - 1 << "\n";
  os << "span = [" << num(traj.times.front()) << ", "
     << num(traj.times.back()) << "]\n";
  double e1d = 0, e2d = 0;
  for (const auto& d : traj.diagnostics) {
    e1d = std::max(e1d, std::abs(d.E1 - traj.diagnostics.front().E1));
    e2d = std::max(e2d, std::abs(d.E2 - traj.diagnostics.front().E2));
  }
  os << "E1 drift = " << num(e1d) << "\n";
  os << "E2 drift = " << num(e2d) << "\n";
  os << "max |C| = " << num(traj.maxPrimaryDrift()) << "\n";
  os << "max |S| = " << num(traj.maxSecondaryDrift()) << "\n";
  return os.str();
}

}  // namespace ostro
