#ifndef OSTRO_REPORT_HPP
#define OSTRO_REPORT_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "ostro/constraints.hpp"
#include "ostro/dynamics.hpp"
#include "ostro/helmholtz.hpp"
#include "ostro/surface.hpp"

namespace ostro {

struct ReportOptions {
  int points = 8;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  bool withHelmholtz = true;
  int jobs = 1;
};

/// Full static analysis of one model: symmetry verdict, derived tensors,
/// constraint classification with dof, surface split, Zermelo and Helmholtz
/// verdicts. Deterministic for fixed seed and options.
struct RunReport {
  std::string modelName;
  bool symmetric = false;
  bool covariant = false;
  int dof = 0;
  bool surfaceSplitFound = false;
  bool helmholtzAllPass = true;
  std::string text;  // pretty-printed report
};

RunReport analyzeModel(const AffineModel& m, const ReportOptions& opts = {});

/// Human-readable surface-split report (Lambda, L_d, L_s, g/h when
/// separable), or the symmetry-violated diagnosis.
std::string decomposeReport(const AffineModel& m,
                            const ReportOptions& opts = {});

/// Trajectory summary: spans, drifts, conservation diagnostics.
std::string trajectorySummary(const Trajectory& traj, const AffineModel& m);

}  // namespace ostro

#endif
