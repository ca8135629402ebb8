#ifndef OSTRO_CONSTRAINTS_HPP
#define OSTRO_CONSTRAINTS_HPP

#include <string>
#include <vector>

#include "ostro/phase.hpp"

namespace ostro {

/// Symbolic constraint package on the enlarged phase space.
struct ConstraintSystem {
  SymVector C;      // primary:   C_mu  = P_mu - K_mu(x, xdot)
  SymVector S;      // secondary: S_mu  = p_mu - dV/dxdot^mu + (dK_mu/dx^nu) xdot^nu
  Expr H0;          // canonical Hamiltonian p_mu xdot^mu - V, p as phase symbols
  SymMatrix omega;  // {chi_i, chi_j} over chi = (C_mu, S_mu), 2N x 2N
};

/// Build constraints and their bracket matrix, verifying symbolically that
/// persistence of the primaries under H reproduces the secondaries:
/// {C_mu, H0} = -S_mu (the multiplier term u {C,C} vanishes for symmetric
/// models; for the others the same identity still holds entrywise).
ConstraintSystem buildConstraints(const AffineModel& m,
                                  const DerivedTensors& t);

/// Numeric Omega at a state; throws Err::GuardViolation off the admissible
/// region.
Eigen::MatrixXd omegaAt(const ConstraintSystem& cs, const AffineModel& m,
                        const PhaseState& s);

struct ZeroModes {
  Eigen::MatrixXd basis;           // N x k, orthonormal columns of null(M)
  Eigen::VectorXd singularValues;  // all N singular values of M(s)
};

/// Null space of the mass matrix at a state via SVD; singular values below
/// tol * sigma_max count as zero. Column signs are fixed so the largest
/// magnitude component is positive.
ZeroModes zeroModesAt(const DerivedTensors& t, const AffineModel& m,
                      const PhaseState& s, double tol = 1e-9);

struct Classification {
  bool symmetricModel = true;
  bool thirdOrder = false;          // affine symmetry violated
  std::vector<Expr> firstClass;     // f1_(n), f2_(n)
  std::vector<Expr> secondClass;    // chi1_(s), chi2_(s)
  std::vector<std::string> firstClassNames;
  std::vector<std::string> secondClassNames;
  int dof = 0;
  Eigen::MatrixXd xiBasis;          // zero modes at the reference state
  double tol = 0.0;
  PhaseState at;                    // classification is pointwise
};

/// Split the constraints into first and second class at a reference state.
/// Regular models: all 2N constraints second class, dof = N. Singular
/// symmetric models: zero modes xi give first-class projections f1 = xi.C,
/// f2 = xi.S; metric-orthogonal directions give the second-class pairs.
/// Models violating affine symmetry carry only the N primaries, classified
/// through their own bracket matrix {C, C}. First-class candidates are
/// verified by their brackets against every constraint at the state;
/// failures raise Err::InconsistentClassification.
Classification classify(const ConstraintSystem& cs, const DerivedTensors& t,
                        const AffineModel& m, const PhaseState& s,
                        double tol = 1e-8);

/// Dirac bracket {F, G}* = {F, G} - {F, chi_i} Winv_ij {chi_j, G} at a state,
/// built on the second-class subset from classify(). Reports the condition
/// number through Err::SingularOmega when the second-class bracket matrix is
/// not invertible.
double diracBracket(const Expr& F, const Expr& G, const ConstraintSystem& cs,
                    const DerivedTensors& t, const AffineModel& m,
                    const PhaseState& s, double tol = 1e-9);

/// Lagrangian constraints phi_(n) = xi_(n) . F at a state; empty when M is
/// regular there.
Eigen::VectorXd lagrangianConstraintsAt(const DerivedTensors& t,
                                        const AffineModel& m,
                                        const PhaseState& s,
                                        double tol = 1e-9);

struct MultiplierSolution {
  Eigen::VectorXd u;        // minimum-norm solution of M u = F
  Eigen::MatrixXd family;   // null directions: full set is u + span(family)
  double residual = 0.0;    // ||M u - F||
  bool unique = true;
};

/// Solve M(s) u = F(s): dense solve in the regular case, truncated-SVD
/// least squares with the zero-mode family otherwise. A residual above
/// tol * (1 + |F|) means the Lagrangian constraints are violated at s and
/// raises Err::NoSolution.
MultiplierSolution multiplierSolve(const DerivedTensors& t,
                                   const AffineModel& m, const PhaseState& s,
                                   double rankTol = 1e-9,
                                   double residualTol = 1e-6);

}  // namespace ostro

#endif
