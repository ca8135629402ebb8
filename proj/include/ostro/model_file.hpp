#ifndef OSTRO_MODEL_FILE_HPP
#define OSTRO_MODEL_FILE_HPP

#include <string>
#include <vector>

#include "ostro/affine_model.hpp"

namespace ostro {

/// Parse and validate a model description. Sections:
///
///   [model]       name, dimension, coordinates
///   [parameters]  name = default-value
///   [lagrangian]  K = expr, expr, ...   and   V = expr
///   [metric]      signature = +1, -1, ...        (optional, default +1)
///   [guards]      one inequality "expr > expr" per line (optional)
///   [gauge]       one linear multiplier condition "lhs = rhs" per line,
///                 written with u_<coordinate> symbols (optional)
///   [sampling]    box = lo, hi   and   seed = n   (optional)
///
/// '#' starts a comment. Unknown sections and keys are rejected.
AffineModel loadModel(const std::string& text);

/// Read a model from a filesystem path, or from the built-in catalog when
/// the path has the form "catalog:<name>".
AffineModel loadModelPath(const std::string& path);

/// Parse one gauge-condition line ("lhs = rhs" over x, xdot, u_<coord>)
/// against a model's chart.
GaugeCondition parseGaugeCondition(const std::string& line,
                                   const ChartPtr& chart);

}  // namespace ostro

#endif
