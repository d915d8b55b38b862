#include "homsum/bump.hpp"

#include <cmath>

#include "homsum/error.hpp"
#include "homsum/quadrature.hpp"

namespace homsum {

double psi_r(double r, double s) {
  require(r > 0.0, "psi_r: radius must be positive");
  if (s <= r) return 1.0;
  if (s >= 2.0 * r) return 0.0;
  const double t = s / r - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

namespace {

// 2 * integral over [sqrt r, sqrt 2r] of z^power psi_r(z^2); the plateau is added by the callers.
double shoulder_integral(double r, int power) {
  const QuadratureOptions opts{1e-12, 1e-12, 20};
  return 2.0 * integrate([r, power](double z) { return std::pow(z, power) * psi_r(r, z * z); }, std::sqrt(r),
                         std::sqrt(2.0 * r), opts);
}

}  // namespace

double mass_m(double r) {
  require(r > 0.0, "mass_m: radius must be positive");
  return 2.0 * std::sqrt(r) + shoulder_integral(r, 0);
}

double variance_v(double r) {
  require(r > 0.0, "variance_v: radius must be positive");
  const double plateau = 2.0 * std::pow(r, 1.5) / 3.0;
  return (plateau + shoulder_integral(r, 2)) / mass_m(r);
}

}  // namespace homsum
