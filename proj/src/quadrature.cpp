#include "homsum/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "homsum/error.hpp"

namespace homsum {

double integrate(const std::function<double(double)>& f, const std::vector<double>& points,
                 const QuadratureOptions& options) {
  require(points.size() >= 2, "integrate: need at least two points");
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    require(a <= b, "integrate: points must be sorted");
    if (a == b) continue;
    double error = 0.0;
    const double piece = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, options.max_depth, options.rel_tol, &error);
    total += piece;
    total_error += error;
  }
  if (!std::isfinite(total) || total_error > std::max(options.abs_tol, options.rel_tol * std::abs(total)) * 10.0) {
    std::ostringstream msg;
    msg << "quadrature did not converge: estimate " << total << ", error " << total_error;
    throw NumericError(msg.str());
  }
  return total;
}

}  // namespace homsum
