#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace homsum {

/// Pairwise (cascade) summation with a fixed split order, so the result is a
/// pure function of the input sequence.
inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kLeaf = 32;
  if (xs.size() <= kLeaf) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double sample_mean(std::span<const double> xs) {
  return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

/// Unbiased sample variance, two-pass.
double sample_variance(std::span<const double> xs);

/// Standard error of the unbiased sample variance, sqrt((m4 - s^4 (n-3)/(n-1)) / n).
double variance_standard_error(std::span<const double> xs);

struct BinomialInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double standard_error = 0.0;
};

/// Wilson score interval at the given normal quantile (1.959964 for 95%).
BinomialInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

}  // namespace homsum
