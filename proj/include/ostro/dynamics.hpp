#ifndef OSTRO_DYNAMICS_HPP
#define OSTRO_DYNAMICS_HPP

#include <iosfwd>
#include <vector>

#include "ostro/constraints.hpp"
#include "ostro/phase.hpp"

namespace ostro {

enum class MultiplierPolicy {
  RequireUnique,  // error out when gauge freedom is left unfixed
  MinimumNorm,    // pick the least-squares minimum-norm representative
};

struct IntegrateOptions {
  double relTol = 1e-8;
  double absTol = 1e-10;
  double initialStep = 1e-3;
  double minStep = 1e-13;
  long maxSteps = 4000000;
  MultiplierPolicy policy = MultiplierPolicy::RequireUnique;
  std::vector<GaugeCondition> extraGauges;  // appended to the model's
};

struct StepDiagnostics {
  double E1 = 0.0;
  double E2 = 0.0;
  double Cmax = 0.0;  // max |C_mu| primary-constraint drift
  double Smax = 0.0;  // max |S_mu| secondary-constraint drift
  double h = 0.0;     // step size that produced this sample
  Eigen::VectorXd u;  // multiplier = acceleration at the sample
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<StepDiagnostics> diagnostics;

  double maxPrimaryDrift() const;
  double maxSecondaryDrift() const;
  double maxDrift(double StepDiagnostics::*field) const;
};

/// Right-hand side of the Hamilton equations with the multiplier resolved
/// per state. Symbolic pieces are prepared once; evaluation is pure.
class HamiltonFlow {
 public:
  HamiltonFlow(const AffineModel& m, const DerivedTensors& t,
               const IntegrateOptions& opts = {});

  /// u at a state: M u = F (+ gauge rows) for second-order models; the
  /// primary-persistence solve Ncurl u = S for third-order ones.
  Eigen::VectorXd multiplier(const PhaseState& s) const;

  /// d/dtau of (x, xdot, p, P) stacked as one 4N vector.
  Eigen::VectorXd rhs(double tau, const PhaseState& s) const;

  bool thirdOrder() const { return thirdOrder_; }
  const AffineModel& model() const { return model_; }

  static Eigen::VectorXd pack(const PhaseState& s);
  static PhaseState unpack(const Eigen::VectorXd& y, int n);

 private:
  AffineModel model_;
  DerivedTensors tensors_;
  IntegrateOptions opts_;
  bool thirdOrder_ = false;
  SymMatrix dKdxd_;  // (nu, mu) -> dK_nu/dxdot^mu
  SymMatrix dKdx_;   // (nu, mu) -> dK_nu/dx^mu
  SymVector dVdxd_, dVdx_;
  SymVector secondary_;  // p_mu - dV/dxdot + (dK/dx) xdot as functions
  std::vector<GaugeCondition> gauges_;
};

/// Exact constraint-surface placement: P = K(x, xdot),
/// p = dV/dxdot - (dK/dx) xdot. Throws Err::GuardViolation off-domain.
PhaseState projectInitial(const AffineModel& m, const DerivedTensors& t,
                          const Eigen::VectorXd& x,
                          const Eigen::VectorXd& xdot);

/// Adaptive embedded Runge-Kutta 4(5) (Dormand-Prince pair) from tau0 to
/// tau1 (either direction). Steps that leave the guarded region are rejected
/// and halved; underflow raises Err::GuardViolation naming the last good
/// parameter value. Diagnostics are recorded at every accepted step.
Trajectory integrate(const AffineModel& m, const DerivedTensors& t,
                     const PhaseState& s0, double tau0, double tau1,
                     const IntegrateOptions& opts = {});

/// Infinitesimal symmetry data: x -> x + eps W(x, tau),
/// tau -> tau + eps eta(x, tau), with gauge term phi(x, xdot).
struct NoetherSpec {
  SymVector W;
  Expr eta;
  Expr phi;
};

struct NoetherSeries {
  std::vector<double> G;          // invariant-operator form (the definition)
  std::vector<double> Gmomentum;  // momentum form W p - Wdot P - eta E1 + etadot E2 - phi
  double drift = 0.0;
  double driftMomentum = 0.0;
};

/// Evaluate the conserved function G along a trajectory; the drift is
/// max |G - G(0)|. Both published forms are reported: the invariant-operator
/// definition and the momentum form (whose energies enter swapped).
NoetherSeries monitorNoether(const Trajectory& traj, const NoetherSpec& spec,
                             const AffineModel& m, const DerivedTensors& t);

/// Trajectory -> curve samples; third derivatives by central differences of
/// the recorded accelerations when requested.
CurveSamples toCurveSamples(const Trajectory& traj, bool withThirdDerivatives);

/// CSV export: header tau, x0.., xdot0.., p0.., P0.., E1, E2, Cmax, Smax,
/// u0.., one row per accepted step, 17 significant digits.
void writeTrajectoryCsv(const Trajectory& traj, int dim, std::ostream& out);

}  // namespace ostro

#endif
