#ifndef OSTRO_CATALOG_HPP
#define OSTRO_CATALOG_HPP

#include <string>
#include <vector>

#include "ostro/affine_model.hpp"

namespace ostro {

/// Names of the built-in example models: chiral, geodesic, bubble.
std::vector<std::string> catalogNames();

/// Model-file text of a built-in model; throws Err::Validation for unknown
/// names.
std::string catalogText(const std::string& name);

/// Convenience: parse + validate a catalog model.
AffineModel loadCatalog(const std::string& name);

}  // namespace ostro

#endif
