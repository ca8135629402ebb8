#ifndef OSTRO_PHASE_HPP
#define OSTRO_PHASE_HPP

#include "ostro/affine_model.hpp"

namespace ostro {

/// Numeric point on the enlarged Ostrogradski phase space
/// {x^mu, p_mu; xdot^mu, P_mu}.
struct PhaseState {
  Eigen::VectorXd x;
  Eigen::VectorXd xdot;
  Eigen::VectorXd p;
  Eigen::VectorXd P;
};

/// Generalized Poisson bracket
///   {F, G} = dF/dx^mu dG/dp_mu + dF/dxdot^mu dG/dP_mu - (F <-> G),
/// computed symbolically over the chart's phase symbols.
Expr poisson(const Expr& F, const Expr& G, const Chart& chart);

/// Phase functions live on {x, xdot, p, P} and parameters only.
void requirePhaseFunction(const Expr& e);

/// Bind a phase state together with the model's parameter defaults.
Binding bindState(const AffineModel& m, const PhaseState& s);

/// Sample a random phase state: (x, xdot) admissible under the model guards,
/// momenta unconstrained in the same box.
PhaseState samplePhaseState(const AffineModel& m, DetRng& rng);

}  // namespace ostro

#endif
