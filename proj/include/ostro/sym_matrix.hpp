#ifndef OSTRO_SYM_MATRIX_HPP
#define OSTRO_SYM_MATRIX_HPP

#include <Eigen/Core>

#include "ostro/expr.hpp"
#include "ostro/numeric.hpp"

namespace Eigen {

template <>
struct NumTraits<ostro::Expr> {
  using Real = ostro::Expr;
  using NonInteger = ostro::Expr;
  using Literal = ostro::Expr;
  using Nested = ostro::Expr;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 8,
    MulCost = 8,
  };
  static inline ostro::Expr epsilon() { return ostro::Expr(); }
  static inline ostro::Expr dummy_precision() { return ostro::Expr(); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace ostro {

using SymVector = Eigen::Matrix<Expr, Eigen::Dynamic, 1>;
using SymMatrix = Eigen::Matrix<Expr, Eigen::Dynamic, Eigen::Dynamic>;

inline Eigen::VectorXd evalVector(const SymVector& v, const Binding& b) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = evaluate(v[i], b);
  return out;
}

inline Eigen::MatrixXd evalMatrix(const SymMatrix& m, const Binding& b) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(i, j) = evaluate(m(i, j), b);
  return out;
}

}  // namespace ostro

#endif
