#include "ostro/catalog.hpp"

#include "ostro/error.hpp"
#include "ostro/model_file.hpp"

namespace ostro {

namespace {

// Planar oscillator with a Chern-Simons-like acceleration coupling. The
// curl of K in the velocities does not vanish, so the equations of motion
// are third order and no surface term exists.
const char* kChiral = R"(
[model]
name = chiral
dimension = 2
coordinates = x, y

[parameters]
lambda = 1
m = 1

[lagrangian]
K = lambda/2*ydot, -lambda/2*xdot
V = m/2*(xdot^2 + ydot^2)

[metric]
signature = +1, +1
)";

// Second-order general energy Lagrangian w_mu(x) xddot^mu +
// w_munu(x) xdot^mu xdot^nu. Its reduced dynamics is geodesic motion for
// the effective metric g = w_munu - (d_nu w_mu + d_mu w_nu)/2, which is
// positive definite here for the default parameters. a=b=c=0 gives the
// flat Euclidean instance.
const char* kGeodesic = R"(
[model]
name = geodesic
dimension = 2
coordinates = x, y

[parameters]
a = 1
b = 1
c = 1

[lagrangian]
K = c*x*y, 0
V = (1 + a*x^2 + b*y^2)*xdot^2 + ydot^2

[metric]
signature = +1, +1
)";

// Electrically charged relativistic bubble. K has the surface term
// d/dtau[-alpha r^2 atanh(rdot/tdot)], the velocity is a zero mode of the
// mass matrix, and the system is reparametrization invariant.
const char* kBubble = R"(
[model]
name = bubble
dimension = 2
coordinates = t, r

[parameters]
alpha = 1
beta = 1
q = 1

[lagrangian]
K = alpha*r^2*rdot/(tdot^2 - rdot^2), -alpha*r^2*tdot/(tdot^2 - rdot^2)
V = -2*alpha*r*tdot - beta*q^2*tdot/r

[metric]
signature = -1, +1

[guards]
tdot^2 - rdot^2 > 0
r > 0
tdot > 0
)";

}  // namespace

std::vector<std::string> catalogNames() {
  return {"chiral", "geodesic", "bubble"};
}

std::string catalogText(const std::string& name) {
  if (name == "chiral") return kChiral;
  if (name == "geodesic") return kGeodesic;
  if (name == "bubble") return kBubble;
  throw ValidationError("catalog", "unknown catalog model '" + name + "'");
}

AffineModel loadCatalog(const std::string& name) {
  return loadModel(catalogText(name));
}

}  // namespace ostro
