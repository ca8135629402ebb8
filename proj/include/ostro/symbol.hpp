#ifndef OSTRO_SYMBOL_HPP
#define OSTRO_SYMBOL_HPP

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace ostro {

/// What a symbol stands for on the extended configuration / phase space.
///
/// Deriv covers the whole derivative tower of a coordinate: order 0 is the
/// coordinate itself, order 1 the velocity, order 2 the acceleration, and
/// higher orders appear only through total derivatives. MomentumQ is the
/// momentum conjugate to the coordinate (p), MomentumP the one conjugate to
/// the velocity (P).
enum class SymbolKind : std::uint8_t {
  Deriv,
  MomentumQ,
  MomentumP,
  Multiplier,  // u_<coord>, the Lagrange multiplier / acceleration slot
  Parameter,
  Time,
};

class Chart;

struct SymbolData {
  std::string name;
  SymbolKind kind;
  int index;  // coordinate index mu; -1 for parameters and time
  int order;  // derivative order for Deriv; -1 otherwise
  int slot;   // dense id within the owning chart, for fast bindings
};

/// Lightweight immutable handle; identity is the underlying chart entry.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::shared_ptr<const SymbolData> d) : d_(std::move(d)) {}

  const std::string& name() const { return d_->name; }
  SymbolKind kind() const { return d_->kind; }
  int index() const { return d_->index; }
  int order() const { return d_->order; }
  int slot() const { return d_->slot; }
  bool valid() const { return d_ != nullptr; }

  bool isCoordinate() const {
    return kind() == SymbolKind::Deriv && order() == 0;
  }
  bool isVelocity() const {
    return kind() == SymbolKind::Deriv && order() == 1;
  }
  bool isAcceleration() const {
    return kind() == SymbolKind::Deriv && order() == 2;
  }

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.d_ == b.d_;
  }
  friend bool operator!=(const Symbol& a, const Symbol& b) {
    return a.d_ != b.d_;
  }

  /// Chart-independent deterministic ordering used by canonical forms.
  static int compare(const Symbol& a, const Symbol& b);

 private:
  std::shared_ptr<const SymbolData> d_;
};

/// Frozen symbol table for one model: the coordinate derivative towers, the
/// conjugate momenta, the evolution parameter and the named parameters.
/// Charts are immutable after construction and safe to share across threads.
class Chart {
 public:
  static constexpr int kMaxOrder = 8;

  static std::shared_ptr<const Chart> make(
      std::vector<std::string> coordinates,
      std::vector<std::string> parameters);

  int dim() const { return dim_; }
  int slotCount() const { return slotCount_; }
  const std::vector<std::string>& coordinateNames() const { return names_; }

  Symbol deriv(int mu, int order) const;
  Symbol coordinate(int mu) const { return deriv(mu, 0); }
  Symbol velocity(int mu) const { return deriv(mu, 1); }
  Symbol acceleration(int mu) const { return deriv(mu, 2); }
  Symbol momentumQ(int mu) const { return momQ_.at(mu); }  // p_mu
  Symbol momentumP(int mu) const { return momP_.at(mu); }  // P_mu
  Symbol multiplier(int mu) const { return mult_.at(mu); }  // u_mu
  Symbol time() const { return time_; }
  const std::vector<Symbol>& parameters() const { return params_; }

  /// Lookup by name; returns an invalid Symbol when absent.
  Symbol find(const std::string& name) const;

  /// Derivative-tower name, e.g. ("r", 2) -> "rddot".
  static std::string derivName(const std::string& coord, int order);

 private:
  Chart() = default;

  int dim_ = 0;
  int slotCount_ = 0;
  std::vector<std::string> names_;
  std::vector<std::vector<Symbol>> derivs_;  // [order][mu]
  std::vector<Symbol> momQ_, momP_, mult_, params_;
  Symbol time_;
  std::unordered_map<std::string, Symbol> byName_;
};

using ChartPtr = std::shared_ptr<const Chart>;

}  // namespace ostro

#endif
