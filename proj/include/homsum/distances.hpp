#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace homsum {

struct DistanceReport {
  std::string kind;  // "kolmogorov", "kolmogorov_two_sample", "d_k", "tv_kde"
  double estimate = 0.0;
  std::optional<std::pair<double, double>> ci;
  std::map<std::string, double> params;
};

std::string distance_to_json(const DistanceReport& report);

double normal_cdf(double x);
/// CDF of sum_{k<m} G_k^2 - m, the chi-squared law with m degrees of freedom shifted to mean 0.
double centered_chi2_cdf(double x, int dof);

/// sup_x |F_n(x) - F(x)| evaluated exactly at the sample points (the one-sided
/// gaps on both sides of each jump).
double kolmogorov_vs_cdf(std::span<const double> sample, const std::function<double(double)>& cdf);

/// sup_x |F_a(x) - F_b(x)| over the merged sample, ties advanced together.
double kolmogorov_two_sample(std::span<const double> a, std::span<const double> b);

/// DKW-type critical values sqrt(-ln(alpha/2)/2) * sqrt(1/n) and * sqrt((n+m)/(nm)).
double ks_critical_one_sample(std::size_t n, double alpha);
double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha);

/// Asymptotic Kolmogorov p-value for a two-sample statistic.
double ks_pvalue_two_sample(double statistic, std::size_t n, std::size_t m);

enum class TestShape { sigmoid, bump };

/// f(x) = weight * g((x - shift) / scale), with the centered profiles
/// g = logistic - 1/2 or g = exp(-u^2/2) - 1/2 (both with sup norm 1/2).
struct TestFunction {
  TestShape shape = TestShape::sigmoid;
  double shift = 0.0;
  double scale = 1.0;
  double weight = 1.0;

  double operator()(double x) const;
  /// sum_{p <= k} ||f^{(p)}||_inf from closed-form profile derivative bounds (k <= 3).
  double norm(int k) const;
};

/// Sup norms of the p-th derivative of the centered profiles, p = 0..3.
double profile_derivative_sup(TestShape shape, int p);

/// Sigmoids and bumps at 8 shifts (pooled quantiles) x 8 scales (geometric in
/// the pooled standard deviation), each divided by its order-k norm.
std::vector<TestFunction> default_dictionary(std::span<const double> a, std::span<const double> b, int k);

/// Re-weights every member to unit order-k norm.
std::vector<TestFunction> normalize_dictionary(std::vector<TestFunction> dictionary, int k);

/// max over the dictionary of |mean_a f - mean_b f|: a lower estimate of d_k.
/// Members with order-k norm above 1 are rejected with ArgumentError.
DistanceReport dk_lower(std::span<const double> a, std::span<const double> b, int k,
                        const std::vector<TestFunction>& dictionary, unsigned workers = 1);

/// Regularization kernel gamma_delta(z) = psi_1(z^2/delta) / (m(1) sqrt(delta)).
double smoothing_kernel(double z, double delta);

inline constexpr std::size_t kKdeMinGridPoints = 4096;

/// Half the L1 distance between the two gamma_delta kernel density estimates
/// (a proxy for total variation), trapezoid rule on a uniform grid over
/// [min - 4 sqrt(delta), max + 4 sqrt(delta)].
DistanceReport tv_kde(std::span<const double> a, std::span<const double> b, double delta);

/// A kernel density estimate with kernel gamma_delta, evaluated pointwise.
double kde_value(std::span<const double> sorted_sample, double x, double delta);

/// Percentile bootstrap interval for a two-sample statistic.
std::pair<double, double> bootstrap_interval(
    std::span<const double> a, std::span<const double> b,
    const std::function<double(std::span<const double>, std::span<const double>)>& statistic,
    std::size_t replicates, std::uint64_t seed, double level = 0.95);

}  // namespace homsum
