#pragma once

#include <functional>
#include <initializer_list>
#include <vector>

namespace homsum {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  unsigned max_depth = 20;
};

/// Adaptive Gauss-Kronrod (15-point) integration of f over the partition
/// defined by `points` (sorted; first and last are the integration limits).
/// Interior points are breakpoints where the integrand is not smooth.
/// Throws NumericError when the error estimate misses max(abs_tol, rel_tol*|I|).
double integrate(const std::function<double(double)>& f, const std::vector<double>& points,
                 const QuadratureOptions& options = {});

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& options = {}) {
  return integrate(f, std::vector<double>{a, b}, options);
}

}  // namespace homsum
