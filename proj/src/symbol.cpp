#include "ostro/symbol.hpp"

#include "ostro/error.hpp"

namespace ostro {

namespace {

int kindRank(SymbolKind k) {
  switch (k) {
    case SymbolKind::Parameter: return 0;
    case SymbolKind::Time: return 1;
    case SymbolKind::Deriv: return 2;
    case SymbolKind::MomentumQ: return 3;
    case SymbolKind::MomentumP: return 4;
    case SymbolKind::Multiplier: return 5;
  }
  return 6;
}

}  // namespace

int Symbol::compare(const Symbol& a, const Symbol& b) {
  if (a.d_ == b.d_) return 0;
  int ra = kindRank(a.kind()), rb = kindRank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (a.order() != b.order()) return a.order() < b.order() ? -1 : 1;
  return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
}

std::string Chart::derivName(const std::string& coord, int order) {
  if (order == 0) return coord;
  return coord + std::string(static_cast<std::size_t>(order), 'd') + "ot";
}

std::shared_ptr<const Chart> Chart::make(std::vector<std::string> coordinates,
                                         std::vector<std::string> parameters) {
  auto chart = std::shared_ptr<Chart>(new Chart());
  chart->dim_ = static_cast<int>(coordinates.size());
  chart->names_ = coordinates;
  int slot = 0;

  auto add = [&](const std::string& name, SymbolKind kind, int index,
                 int order) {
    if (chart->byName_.count(name)) {
      throw ValidationError("symbols", "duplicate symbol name '" + name + "'");
    }
    auto data = std::make_shared<SymbolData>(
        SymbolData{name, kind, index, order, slot++});
    Symbol s(data);
    chart->byName_.emplace(name, s);
    return s;
  };

  chart->derivs_.resize(kMaxOrder + 1);
  for (int order = 0; order <= kMaxOrder; ++order) {
    chart->derivs_[order].reserve(coordinates.size());
    for (int mu = 0; mu < chart->dim_; ++mu) {
      chart->derivs_[order].push_back(add(derivName(coordinates[mu], order),
                                          SymbolKind::Deriv, mu, order));
    }
  }
  for (int mu = 0; mu < chart->dim_; ++mu) {
    chart->momQ_.push_back(
        add("p_" + coordinates[mu], SymbolKind::MomentumQ, mu, -1));
  }
  for (int mu = 0; mu < chart->dim_; ++mu) {
    chart->momP_.push_back(
        add("P_" + coordinates[mu], SymbolKind::MomentumP, mu, -1));
  }
  for (int mu = 0; mu < chart->dim_; ++mu) {
    chart->mult_.push_back(
        add("u_" + coordinates[mu], SymbolKind::Multiplier, mu, -1));
  }
  chart->time_ = add("tau", SymbolKind::Time, -1, -1);
  for (const auto& p : parameters) {
    chart->params_.push_back(add(p, SymbolKind::Parameter, -1, -1));
  }
  chart->slotCount_ = slot;
  return chart;
}

Symbol Chart::deriv(int mu, int order) const {
  if (order < 0 || order > kMaxOrder || mu < 0 || mu >= dim_) {
    throw OstroError(Err::CapExceeded,
                     "derivative order " + std::to_string(order) +
                         " outside the chart tower");
  }
  return derivs_[order][mu];
}

Symbol Chart::find(const std::string& name) const {
  auto it = byName_.find(name);
  return it == byName_.end() ? Symbol() : it->second;
}

}  // namespace ostro
