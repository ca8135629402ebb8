// ostro: constrained-Hamiltonian analysis of Lagrangians affine in
// acceleration. Subcommands: analyze, integrate, decompose, verify, catalog.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ostro/catalog.hpp"
#include "ostro/error.hpp"
#include "ostro/helmholtz.hpp"
#include "ostro/model_file.hpp"
#include "ostro/report.hpp"

namespace {

using namespace ostro;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitClassification = 3;
constexpr int kExitMultiplier = 4;

int mapError(const OstroError& e) {
  switch (e.code()) {
    case Err::Validation:
    case Err::Syntax:
    case Err::UnknownSymbol:
    case Err::Io:
      return kExitValidation;
    case Err::InconsistentClassification:
      return kExitClassification;
    case Err::Gauge:
    case Err::NoSolution:
      return kExitMultiplier;
    default:
      return kExitError;
  }
}

std::uint64_t defaultSeed() {
  if (const char* env = std::getenv("OSTRO_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

struct Common {
  std::string path;
  std::vector<std::string> sets;
  std::uint64_t seed = defaultSeed();
  double tol = 1e-9;
  int points = 8;
  int jobs = 1;
};

void addCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("path", c.path, "model file path or catalog:<name>")
      ->required();
  cmd->add_option("--set", c.sets, "override a parameter, name=value");
  cmd->add_option("--seed", c.seed, "sampling seed (default OSTRO_SEED or 0)");
  cmd->add_option("--tol", c.tol, "identity tolerance");
  cmd->add_option("--points", c.points, "sample points per identity");
  cmd->add_option("--jobs", c.jobs,
                  "threads for independent sample-point evaluations");
}

AffineModel loadWithSets(const Common& c) {
  AffineModel m = loadModelPath(c.path);
  for (const auto& s : c.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("set", "expected name=value, got '" + s + "'");
    }
    m = m.withParameter(s.substr(0, eq),
                        std::strtod(s.c_str() + eq + 1, nullptr));
  }
  return m;
}

std::vector<double> parseList(const std::string& text,
                              const std::string& what, int expected) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(std::strtod(item.c_str(), nullptr));
  }
  if (expected > 0 && static_cast<int>(out.size()) != expected) {
    throw ValidationError(what, "expected " + std::to_string(expected) +
                                    " comma-separated values");
  }
  return out;
}

int cmdAnalyze(const Common& c) {
  AffineModel m = loadWithSets(c);
  ReportOptions opts;
  opts.points = c.points;
  opts.tol = c.tol;
  opts.seed = c.seed;
  opts.jobs = c.jobs;
  RunReport rep = analyzeModel(m, opts);
  std::cout << rep.text;
  return kExitOk;
}

int cmdIntegrate(const Common& c, const std::string& ic,
                 const std::string& span, const std::string& gauge,
                 bool minNorm, const std::string& outPath, double relTol) {
  AffineModel m = loadWithSets(c);
  DerivedTensors t = derive(m);

  auto semi = ic.find(';');
  if (semi == std::string::npos) {
    throw ValidationError("ic", "expected 'x0,..;xdot0,..'");
  }
  std::vector<double> x = parseList(ic.substr(0, semi), "ic", m.dim());
  std::vector<double> xd = parseList(ic.substr(semi + 1), "ic", m.dim());
  Eigen::VectorXd x0(m.dim()), xd0(m.dim());
  for (int mu = 0; mu < m.dim(); ++mu) {
    x0[mu] = x[mu];
    xd0[mu] = xd[mu];
  }

  std::vector<double> spanVals = parseList(span, "span", -1);
  double tau0 = 0.0, tau1 = 0.0;
  if (spanVals.size() == 1) {
    tau1 = spanVals[0];
  } else if (spanVals.size() == 2) {
    tau0 = spanVals[0];
    tau1 = spanVals[1];
  } else {
    throw ValidationError("span", "expected 'tau1' or 'tau0,tau1'");
  }

  IntegrateOptions opts;
  opts.relTol = relTol;
  opts.policy = minNorm ? MultiplierPolicy::MinimumNorm
                        : MultiplierPolicy::RequireUnique;
  if (!gauge.empty()) {
    opts.extraGauges.push_back(parseGaugeCondition(gauge, m.chart()));
  }

  PhaseState s0 = projectInitial(m, t, x0, xd0);
  Trajectory traj = integrate(m, t, s0, tau0, tau1, opts);
  std::cout << trajectorySummary(traj, m);

  if (!outPath.empty()) {
    // write-to-temp then rename: no partial CSV on failure
    std::string tmp = outPath + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) {
        throw OstroError(Err::Io, "cannot open '" + tmp + "' for writing");
      }
      writeTrajectoryCsv(traj, m.dim(), out);
    }
    std::filesystem::rename(tmp, outPath);
    std::cout << "trajectory written to " << outPath << "\n";
  } else {
    writeTrajectoryCsv(traj, m.dim(), std::cout);
  }
  return kExitOk;
}

int cmdDecompose(const Common& c) {
  AffineModel m = loadWithSets(c);
  ReportOptions opts;
  opts.points = c.points;
  opts.tol = c.tol;
  opts.seed = c.seed;
  std::cout << decomposeReport(m, opts);
  return kExitOk;
}

int cmdVerify(const Common& c, bool negativeControl) {
  AffineModel m = loadWithSets(c);
  DerivedTensors t = derive(m);
  if (negativeControl) {
    t = corruptForNegativeControl(m, t);
    std::cout << "negative control: V perturbed after tensor derivation\n";
  }
  bool allPass = true;
  bool symmetric = checkAffineSymmetry(m, c.points, c.tol, c.seed).symmetric;
  std::cout << "[helmholtz suite]\n";
  if (!symmetric) {
    std::cout << "skipped: affine symmetry violated\n";
  } else {
    auto reports =
        helmholtzSuite(m, t, c.points, std::max(c.tol, 1e-8), c.seed);
    printReports(std::cout, reports);
    for (const auto& r : reports) allPass = allPass && r.pass;
  }
  std::cout << "[finite-difference crosscheck]\n";
  auto fd = fdCrosscheck(m, t, c.points, 1e-5, c.seed, c.jobs);
  printReports(std::cout, fd);
  for (const auto& r : fd) allPass = allPass && r.pass;
  return allPass ? kExitOk : kExitError;
}

int cmdCatalog(const std::string& action, const std::string& name) {
  if (action == "list") {
    for (const auto& n : catalogNames()) {
      std::cout << n << "\n";
    }
    return kExitOk;
  }
  std::cout << catalogText(name);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ostro: Ostrogradski-Hamiltonian analysis of Lagrangians affine in "
      "acceleration"};
  app.require_subcommand(1);

  Common cAnalyze, cIntegrate, cDecompose, cVerify;

  CLI::App* analyze =
      app.add_subcommand("analyze", "static analysis: symmetry, tensors, "
                                    "constraints, surface split, identities");
  addCommon(analyze, cAnalyze);

  CLI::App* integrate =
      app.add_subcommand("integrate", "integrate the Hamilton equations");
  addCommon(integrate, cIntegrate);
  std::string ic, span = "0,10", gauge, outPath;
  bool minNorm = false;
  double relTol = 1e-8;
  integrate->add_option("--ic", ic, "initial 'x0,..;xdot0,..'")->required();
  integrate->add_option("--span", span, "'tau1' or 'tau0,tau1'");
  integrate->add_option("--gauge", gauge,
                        "multiplier condition, e.g. \"u_t = 0\"");
  integrate->add_flag("--min-norm", minNorm,
                      "minimum-norm multiplier for singular models");
  integrate->add_option("--out", outPath, "CSV output path");
  integrate->add_option("--rel-tol", relTol, "integrator relative tolerance");

  CLI::App* decompose = app.add_subcommand(
      "decompose", "surface/dynamic split of the Lagrangian");
  addCommon(decompose, cDecompose);

  CLI::App* verify = app.add_subcommand(
      "verify", "integrability identities + finite-difference oracle");
  addCommon(verify, cVerify);
  bool negativeControl = false;
  verify->add_flag("--negative-control", negativeControl,
                   "corrupt V after derivation; the suite must then fail");

  CLI::App* catalog = app.add_subcommand("catalog", "built-in example models");
  std::string catAction, catName;
  catalog->add_option("action", catAction, "list | show")->required();
  catalog->add_option("name", catName, "model name for 'show'");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmdAnalyze(cAnalyze);
    if (*integrate) {
      return cmdIntegrate(cIntegrate, ic, span, gauge, minNorm, outPath,
                          relTol);
    }
    if (*decompose) return cmdDecompose(cDecompose);
    if (*verify) return cmdVerify(cVerify, negativeControl);
    if (*catalog) {
      if (catAction != "list" && catAction != "show") {
        std::cerr << "error: catalog action must be 'list' or 'show'\n";
        return kExitValidation;
      }
      if (catAction == "show" && catName.empty()) {
        std::cerr << "error: catalog show needs a model name\n";
        return kExitValidation;
      }
      return cmdCatalog(catAction, catName);
    }
  } catch (const OstroError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mapError(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
