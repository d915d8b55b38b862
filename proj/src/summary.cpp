#include "homsum/summary.hpp"

#include <algorithm>
#include <vector>

namespace homsum {

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = sample_mean(xs);
  std::vector<double> sq(xs.size());
  std::transform(xs.begin(), xs.end(), sq.begin(), [mean](double x) { return (x - mean) * (x - mean); });
  return pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
}

double variance_standard_error(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 4) return 0.0;
  const double mean = sample_mean(xs);
  std::vector<double> q(xs.size());
  std::transform(xs.begin(), xs.end(), q.begin(), [mean](double x) {
    const double d = (x - mean) * (x - mean);
    return d * d;
  });
  const double m4 = pairwise_sum(q) / n;
  const double s2 = sample_variance(xs);
  const double var_of_var = (m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
  return std::sqrt(std::max(var_of_var, 0.0));
}

BinomialInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  BinomialInterval out;
  if (trials == 0) return out;
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  out.estimate = p;
  out.lower = std::max(0.0, centre - half);
  out.upper = std::min(1.0, centre + half);
  out.standard_error = std::sqrt(p * (1.0 - p) / n);
  return out;
}

}  // namespace homsum
