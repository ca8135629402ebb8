#ifndef OSTRO_HELMHOLTZ_HPP
#define OSTRO_HELMHOLTZ_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ostro/affine_model.hpp"

namespace ostro {

struct IdentityReport {
  std::string name;
  int samples = 0;
  int skipped = 0;           // points lost to guard-margin violations
  double worstAbs = 0.0;
  double worstRel = 0.0;
  std::array<int, 3> worstIndices = {-1, -1, -1};
  bool pass = false;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::string note;
};

/// The integrability conditions tying M, X and F together, plus the
/// symmetry of M, the velocity-gradient symmetry of M and the Bianchi
/// identity for X: six reports over seeded admissible points.
///
/// The force-position condition is evaluated in both published sign
/// conventions (symmetric and antisymmetric right-hand side); the report
/// notes which one holds and passes when either does.
std::vector<IdentityReport> helmholtzSuite(const AffineModel& m,
                                           const DerivedTensors& t,
                                           int points = 8, double tol = 1e-8,
                                           std::uint64_t seed = 0);

/// Re-derive every tensor entry (P, p, M, F, Ncurl, X, Theta, E1, E2) from
/// K- and V-level evaluations by central differences (step 1e-5*(1+|v|),
/// Richardson fallback) and compare against the symbolic derivation.
std::vector<IdentityReport> fdCrosscheck(const AffineModel& m,
                                         const DerivedTensors& t,
                                         int points = 8, double tol = 1e-5,
                                         std::uint64_t seed = 0, int jobs = 1);

/// Hybrid tensor package for the negative control: the V-dependent pieces
/// (p, F, X, E2, H0) are recomputed from a perturbed potential while M, P
/// and the K-side curls stay untouched, so at least one integrability
/// condition must fail.
DerivedTensors corruptForNegativeControl(const AffineModel& m,
                                         const DerivedTensors& t);

/// One block per identity: name, samples, worst residual, verdict.
void printReports(std::ostream& out, const std::vector<IdentityReport>& reports);

}  // namespace ostro

#endif
