#ifndef OSTRO_AFFINE_MODEL_HPP
#define OSTRO_AFFINE_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ostro/expr.hpp"
#include "ostro/sampler.hpp"
#include "ostro/sym_matrix.hpp"
#include "ostro/symbol.hpp"

namespace ostro {

/// Linear condition a_mu(x, xdot) u^mu = b(x, xdot) fixing multiplier
/// freedom of singular models.
struct GaugeCondition {
  SymVector a;
  Expr b;
  std::string text;  // as written in the model file / CLI flag
};

struct SamplingSpec {
  double lo = -2.0;
  double hi = 2.0;
  std::uint64_t seed = 0;
};

/// A validated Lagrangian L = K_mu(x, xdot) xddot^mu + V(x, xdot):
/// the acceleration Hessian vanishes identically by construction since
/// neither K nor V may depend on acceleration symbols.
class AffineModel {
 public:
  static AffineModel make(std::string name, ChartPtr chart, SymVector K,
                          Expr V, Eigen::VectorXd signature,
                          std::vector<Expr> guards,
                          std::vector<double> paramDefaults,
                          SamplingSpec sampling = {},
                          std::vector<GaugeCondition> gauges = {});

  const std::string& name() const { return name_; }
  const ChartPtr& chart() const { return chart_; }
  int dim() const { return chart_->dim(); }
  const SymVector& K() const { return K_; }
  const Expr& V() const { return V_; }
  const Eigen::VectorXd& signature() const { return signature_; }
  const std::vector<Expr>& guards() const { return guards_; }
  const std::vector<double>& paramDefaults() const { return paramDefaults_; }
  const SamplingSpec& sampling() const { return sampling_; }
  const std::vector<GaugeCondition>& gauges() const { return gauges_; }

  /// L = K_mu xddot^mu + V as an expression.
  Expr lagrangian() const;

  /// Sampling domain carrying the model guards and box.
  SampleDomain domain(double margin = 0.0) const;

  /// Binding with every parameter at its default value.
  Binding parameterBinding() const;

  /// True when (x, xdot) satisfies every guard strictly.
  bool admissible(const Eigen::VectorXd& x, const Eigen::VectorXd& xdot) const;

  AffineModel withParameter(const std::string& name, double value) const;

 private:
  AffineModel() = default;

  std::string name_;
  ChartPtr chart_;
  SymVector K_;
  Expr V_;
  Eigen::VectorXd signature_;
  std::vector<Expr> guards_;
  std::vector<double> paramDefaults_;
  SamplingSpec sampling_;
  std::vector<GaugeCondition> gauges_;
};

/// Everything Section-2/3 style analysis derives from (K, V). All entries are
/// simplified expressions in the coordinates and velocities; the curl
/// matrices are antisymmetric entry by entry by construction.
struct DerivedTensors {
  SymVector P;      // P_mu = K_mu
  SymVector p;      // p_mu = dV/dxdot^mu - (dK_mu/dx^nu) xdot^nu
  SymMatrix M;      // M_mn = dP_n/dx^m - dp_m/dxdot^n
  SymVector F;      // F_m  = (dp_m/dx^n) xdot^n - dV/dx^m
  SymMatrix Ncurl;  // dP_n/dxdot^m - dP_m/dxdot^n
  SymMatrix X;      // dp_n/dx^m - dp_m/dx^n
  SymMatrix Theta;  // dP_m/dx^n - dP_n/dx^m
  Expr E1;          // -xdot^mu K_mu
  Expr E2;          // (dV/dxdot)xdot - V - (dK/dx xdot) xdot
  Expr H0;          // p_mu xdot^mu - V with the momentum functions inserted
};

DerivedTensors derive(const AffineModel& m);

struct SymmetryReport {
  bool symmetric = false;
  SymMatrix residual;  // dK_mu/dxdot^nu - dK_nu/dxdot^mu, entrywise
};

/// The no-third-order-derivatives condition dK_mu/dxdot^nu = dK_nu/dxdot^mu,
/// decided symbolically where the residual simplifies to zero and by seeded
/// probabilistic equality otherwise.
SymmetryReport checkAffineSymmetry(const AffineModel& m, int trials = 8,
                                   double tol = 1e-9, std::uint64_t seed = 0);

/// Total-derivative shift L -> L + dY/dtau realized on (K, V):
/// K_mu += dY/dxdot^mu, V += (dY/dx^mu) xdot^mu. M, F, Ncurl and X are
/// invariant under this transformation.
AffineModel gaugeShift(const AffineModel& m, const Expr& Y);

struct ZermeloReport {
  bool covariant = false;
  double maxI1Residual = 0.0;  // I1 = 2 xdot^mu K_mu, must vanish
  double maxI2Residual = 0.0;  // I2 - L, must vanish
  int samples = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
};

/// Reparametrization-invariance conditions on the main invariants:
/// I1(L) = 0 and I2(L) = L at sampled admissible points (accelerations
/// sampled too, since I2 carries them).
ZermeloReport zermeloCheck(const AffineModel& m, int points = 8,
                           double tol = 1e-9, std::uint64_t seed = 0);

/// Time-sampled curve data; xdddot may be empty when third derivatives are
/// unavailable (only symmetry-violating models need them).
struct CurveSamples {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> x, xdot, xddot, xdddot;
};

/// Equations-of-motion residual along a sampled curve. For models satisfying
/// the affine-symmetry condition this is M xddot - F per sample; otherwise
/// the full third-order Euler-Lagrange covector E0(L) is evaluated, which
/// requires xdddot samples.
Eigen::MatrixXd eulerLagrangeResidual(const AffineModel& m,
                                      const DerivedTensors& t,
                                      const CurveSamples& curve);

/// The three Craig-Synge style covectors specialized to the model, built
/// symbolically: E0 needs derivative symbols up to order 3.
SymVector eulerLagrangeOperator(const AffineModel& m);

}  // namespace ostro

#endif
