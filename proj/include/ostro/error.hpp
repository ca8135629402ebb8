#ifndef OSTRO_ERROR_HPP
#define OSTRO_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ostro {

/// Stable error codes; the CLI maps these onto exit codes.
enum class Err {
  Syntax,
  UnknownSymbol,
  Domain,
  CapExceeded,
  Validation,
  SamplerExhausted,
  SymmetryViolated,
  AntiderivativeNotFound,
  MissingDerivativeOrder,
  GuardViolation,
  SingularOmega,
  NoSolution,
  InconsistentClassification,
  Gauge,
  Io,
};

class OstroError : public std::runtime_error {
 public:
  OstroError(Err code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

/// Parse failure; column is 1-based within the offending expression text.
class SyntaxError : public OstroError {
 public:
  SyntaxError(const std::string& what, std::size_t column)
      : OstroError(Err::Syntax,
                   what + " at column " + std::to_string(column)),
        column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class UnknownSymbolError : public OstroError {
 public:
  UnknownSymbolError(const std::string& name, std::size_t column)
      : OstroError(Err::UnknownSymbol,
                   "unknown symbol '" + name + "' at column " +
                       std::to_string(column)),
        name_(name),
        column_(column) {}
  const std::string& name() const { return name_; }
  std::size_t column() const { return column_; }

 private:
  std::string name_;
  std::size_t column_;
};

class DomainError : public OstroError {
 public:
  explicit DomainError(const std::string& what)
      : OstroError(Err::Domain, what) {}
};

class ValidationError : public OstroError {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : OstroError(Err::Validation, field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class SingularOmegaError : public OstroError {
 public:
  SingularOmegaError(const std::string& what, double conditionNumber)
      : OstroError(Err::SingularOmega,
                   what + " (condition number " +
                       std::to_string(conditionNumber) + ")"),
        cond_(conditionNumber) {}
  double conditionNumber() const { return cond_; }

 private:
  double cond_;
};

}  // namespace ostro

#endif
