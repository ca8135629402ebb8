#include "ostro/model_file.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ostro/calculus.hpp"
#include "ostro/catalog.hpp"
#include "ostro/error.hpp"
#include "ostro/parse.hpp"
#include "ostro/simplify.hpp"

namespace ostro {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

/// Split on commas at parenthesis depth zero.
std::vector<std::string> splitTopLevel(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

struct Section {
  std::vector<std::pair<std::string, std::string>> keyValues;
  std::vector<std::string> lines;  // raw lines for guards / gauge
};

std::map<std::string, Section> splitSections(const std::string& text) {
  static const char* known[] = {"model",  "parameters", "lagrangian",
                                "metric", "guards",     "gauge",
                                "sampling"};
  std::map<std::string, Section> sections;
  std::istringstream in(text);
  std::string line;
  std::string current;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ValidationError("sections", "malformed section header " + line);
      }
      current = trim(line.substr(1, line.size() - 2));
      bool ok = false;
      for (const char* k : known) ok = ok || current == k;
      if (!ok) {
        throw ValidationError("sections", "unknown section [" + current + "]");
      }
      sections[current];  // may legitimately be empty
      continue;
    }
    if (current.empty()) {
      throw ValidationError("sections", "content before any section: " + line);
    }
    Section& sec = sections[current];
    sec.lines.push_back(line);
    auto eq = line.find('=');
    if (eq != std::string::npos) {
      sec.keyValues.emplace_back(trim(line.substr(0, eq)),
                                 trim(line.substr(eq + 1)));
    }
  }
  return sections;
}

std::string getValue(const Section& sec, const std::string& sectionName,
                     const std::string& key, bool required) {
  std::string found;
  for (const auto& [k, v] : sec.keyValues) {
    if (k == key) {
      found = v;
    }
  }
  if (found.empty() && required) {
    throw ValidationError(sectionName, "missing key '" + key + "'");
  }
  return found;
}

Expr parseField(const std::string& text, const Chart& chart,
                const std::string& field) {
  try {
    return parse(text, chart);
  } catch (const OstroError& e) {
    throw ValidationError(field, e.what());
  }
}

double parseDouble(const std::string& text, const std::string& field) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || trim(end) != "") {
    throw ValidationError(field, "not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

GaugeCondition parseGaugeCondition(const std::string& line,
                                   const ChartPtr& chart) {
  auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw ValidationError("gauge", "expected 'lhs = rhs' in: " + line);
  }
  Expr lhs = parseField(line.substr(0, eq), *chart, "gauge");
  Expr rhs = parseField(line.substr(eq + 1), *chart, "gauge");
  Expr resid = simplify(lhs - rhs);

  const int n = chart->dim();
  GaugeCondition gc;
  gc.text = trim(line);
  gc.a.resize(n);
  std::vector<std::pair<Symbol, Expr>> uZero;
  for (int mu = 0; mu < n; ++mu) {
    uZero.emplace_back(chart->multiplier(mu), Expr());
  }
  for (int mu = 0; mu < n; ++mu) {
    Expr a = simplify(diff(resid, chart->multiplier(mu)));
    if (a.hasKind(SymbolKind::Multiplier)) {
      throw ValidationError("gauge",
                            "condition is not linear in u: " + line);
    }
    gc.a[mu] = a;
  }
  gc.b = simplify(-substitute(resid, uZero));
  bool allZero = gc.b.isZero();
  for (int mu = 0; mu < n; ++mu) allZero = allZero && gc.a[mu].isZero();
  if (allZero) {
    throw ValidationError("gauge", "condition is vacuous: " + line);
  }
  return gc;
}

AffineModel loadModel(const std::string& text) {
  auto sections = splitSections(text);
  if (!sections.count("model")) {
    throw ValidationError("model", "missing [model] section");
  }
  const Section& modelSec = sections["model"];
  std::string name = getValue(modelSec, "model", "name", true);
  int dim = static_cast<int>(
      parseDouble(getValue(modelSec, "model", "dimension", true),
                  "model.dimension"));
  std::vector<std::string> coords =
      splitTopLevel(getValue(modelSec, "model", "coordinates", true));
  if (static_cast<int>(coords.size()) != dim) {
    throw ValidationError("model",
                          "dimension does not match the coordinate list");
  }
  for (const auto& [k, v] : modelSec.keyValues) {
    (void)v;
    if (k != "name" && k != "dimension" && k != "coordinates") {
      throw ValidationError("model", "unknown key '" + k + "'");
    }
  }

  std::vector<std::string> paramNames;
  std::vector<double> paramDefaults;
  if (sections.count("parameters")) {
    for (const auto& [k, v] : sections["parameters"].keyValues) {
      paramNames.push_back(k);
      paramDefaults.push_back(parseDouble(v, "parameters." + k));
    }
  }

  ChartPtr chart = Chart::make(coords, paramNames);

  if (!sections.count("lagrangian")) {
    throw ValidationError("lagrangian", "missing [lagrangian] section");
  }
  const Section& lag = sections["lagrangian"];
  for (const auto& [k, v] : lag.keyValues) {
    (void)v;
    if (k != "K" && k != "V") {
      throw ValidationError("lagrangian", "unknown key '" + k + "'");
    }
  }
  std::vector<std::string> kTexts =
      splitTopLevel(getValue(lag, "lagrangian", "K", true));
  if (static_cast<int>(kTexts.size()) != dim) {
    throw ValidationError("lagrangian.K",
                          "expected " + std::to_string(dim) + " components");
  }
  SymVector K(dim);
  for (int mu = 0; mu < dim; ++mu) {
    K[mu] = parseField(kTexts[mu], *chart, "lagrangian.K[" + coords[mu] + "]");
  }
  Expr V = parseField(getValue(lag, "lagrangian", "V", true), *chart,
                      "lagrangian.V");

  Eigen::VectorXd signature;
  if (sections.count("metric")) {
    auto entries = splitTopLevel(
        getValue(sections["metric"], "metric", "signature", true));
    signature.resize(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
      signature[static_cast<Eigen::Index>(i)] =
          parseDouble(entries[i], "metric.signature");
    }
  }

  std::vector<Expr> guards;
  if (sections.count("guards")) {
    for (const auto& line : sections["guards"].lines) {
      auto gt = line.find('>');
      if (gt == std::string::npos) {
        throw ValidationError("guards", "expected 'expr > expr' in: " + line);
      }
      Expr lhs = parseField(line.substr(0, gt), *chart, "guards");
      Expr rhs = parseField(line.substr(gt + 1), *chart, "guards");
      guards.push_back(simplify(lhs - rhs));
    }
  }

  std::vector<GaugeCondition> gauges;
  if (sections.count("gauge")) {
    for (const auto& line : sections["gauge"].lines) {
      gauges.push_back(parseGaugeCondition(line, chart));
    }
  }

  SamplingSpec sampling;
  if (sections.count("sampling")) {
    const Section& sam = sections["sampling"];
    for (const auto& [k, v] : sam.keyValues) {
      if (k == "box") {
        auto bounds = splitTopLevel(v);
        if (bounds.size() != 2) {
          throw ValidationError("sampling", "box needs 'lo, hi'");
        }
        sampling.lo = parseDouble(bounds[0], "sampling.box");
        sampling.hi = parseDouble(bounds[1], "sampling.box");
      } else if (k == "seed") {
        sampling.seed =
            static_cast<std::uint64_t>(parseDouble(v, "sampling.seed"));
      } else {
        throw ValidationError("sampling", "unknown key '" + k + "'");
      }
    }
  }

  return AffineModel::make(name, chart, std::move(K), V, std::move(signature),
                           std::move(guards), std::move(paramDefaults),
                           sampling, std::move(gauges));
}

AffineModel loadModelPath(const std::string& path) {
  constexpr const char* kPrefix = "catalog:";
  if (path.rfind(kPrefix, 0) == 0) {
    return loadModel(catalogText(path.substr(std::string(kPrefix).size())));
  }
  std::ifstream in(path);
  if (!in) {
    throw OstroError(Err::Io, "cannot open model file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return loadModel(buf.str());
}

}  // namespace ostro
