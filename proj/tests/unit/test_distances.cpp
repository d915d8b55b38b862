#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "homsum/distances.hpp"
#include "homsum/error.hpp"

using namespace homsum;

namespace {

std::vector<double> normal_sample(std::size_t n, double mean, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(mean, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(gen);
  return out;
}

double ecdf(const std::vector<double>& xs, double t) {
  return static_cast<double>(std::count_if(xs.begin(), xs.end(), [t](double x) { return x <= t; })) / xs.size();
}

// Kernel and KDE written out independently of the library.
double kernel_ref(double z, double delta) {
  const double s = z * z / delta;
  double psi = 0.0;
  if (s <= 1.0) psi = 1.0;
  else if (s < 2.0) psi = std::exp(1.0 - 1.0 / (1.0 - (s - 1.0) * (s - 1.0)));
  return psi / (2.5274191025966016 * std::sqrt(delta));
}

double kde_ref(const std::vector<double>& xs, double x, double delta) {
  double s = 0.0;
  for (double v : xs) s += kernel_ref(x - v, delta);
  return s / xs.size();
}

}  // namespace

TEST_CASE("one-sample Kolmogorov") {
  const int n = 99;
  std::vector<double> q;
  for (int i = 1; i <= n; ++i) q.push_back(static_cast<double>(i) / (n + 1));
  auto unif = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(kolmogorov_vs_cdf(q, unif) == doctest::Approx(1.0 / (n + 1)));

  const auto z = normal_sample(100000, 0.0, 1);
  CHECK(kolmogorov_vs_cdf(z, normal_cdf) < 1.95 / std::sqrt(1e5));
  CHECK(kolmogorov_vs_cdf(std::vector<double>{0.0}, normal_cdf) == doctest::Approx(0.5));
  CHECK(ks_critical_one_sample(1, 0.001) == doctest::Approx(1.9495).epsilon(1e-4));

  // Ties: brute-force sup over both sides of every jump.
  const std::vector<double> tied{0.1, 0.1, 0.1, 0.5, 0.5, 0.9};
  double best = 0.0;
  for (double t : tied) {
    best = std::max(best, std::abs(ecdf(tied, t) - t));
    best = std::max(best, std::abs(ecdf(tied, t - 1e-12) - t));
  }
  CHECK(kolmogorov_vs_cdf(tied, unif) == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("two-sample Kolmogorov") {
  const auto a = normal_sample(1000, 0.0, 2);
  CHECK(kolmogorov_two_sample(a, a) == 0.0);
  CHECK(kolmogorov_two_sample(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5}) == 1.0);
  CHECK_THROWS_AS(kolmogorov_two_sample(std::vector<double>{}, a), ArgumentError);

  const auto x = normal_sample(100000, 0.0, 3);
  const auto y = normal_sample(100000, 0.0, 4);
  CHECK(kolmogorov_two_sample(x, y) < ks_critical_two_sample(x.size(), y.size(), 0.001));
  CHECK(kolmogorov_two_sample(x, y) == kolmogorov_two_sample(y, x));

  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> small(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(5 + trial % 7);
    std::vector<double> q(3 + trial % 5);
    for (auto& v : p) v = small(gen);
    for (auto& v : q) v = small(gen);
    double best = 0.0;
    for (int t = -1; t <= 7; ++t) best = std::max(best, std::abs(ecdf(p, t) - ecdf(q, t)));
    CHECK(kolmogorov_two_sample(p, q) == doctest::Approx(best).epsilon(1e-12));
  }
  CHECK(ks_pvalue_two_sample(0.0, 100, 100) == 1.0);
  CHECK(ks_pvalue_two_sample(0.5, 100, 100) < 1e-4);
}

TEST_CASE("profile derivative sup norms") {
  auto sig = [](double u, int p) {
    const double s = 1.0 / (1.0 + std::exp(-u));
    if (p == 0) return s - 0.5;
    if (p == 1) return s * (1 - s);
    if (p == 2) return s * (1 - s) * (1 - 2 * s);
    return s * (1 - s) * (1 - 6 * s + 6 * s * s);
  };
  auto bump = [](double u, int p) {
    const double e = std::exp(-0.5 * u * u);
    if (p == 0) return e - 0.5;
    if (p == 1) return -u * e;
    if (p == 2) return (u * u - 1) * e;
    return (3 * u - u * u * u) * e;
  };
  for (int p = 1; p <= 3; ++p) {
    double ms = 0.0;
    double mb = 0.0;
    for (int i = -400000; i <= 400000; ++i) {
      const double u = i * 2e-5;
      ms = std::max(ms, std::abs(sig(u, p)));
      mb = std::max(mb, std::abs(bump(u, p)));
    }
    CHECK(profile_derivative_sup(TestShape::sigmoid, p) == doctest::Approx(ms).epsilon(1e-8));
    CHECK(profile_derivative_sup(TestShape::bump, p) == doctest::Approx(mb).epsilon(1e-8));
  }
}

TEST_CASE("smooth-test-function distance") {
  const auto a = normal_sample(100000, 0.0, 6);
  const auto b = normal_sample(100000, 0.5, 7);
  const auto dict = default_dictionary(a, b, 1);
  CHECK(dict.size() == 128);
  CHECK(dk_lower(a, a, 1, dict).estimate == 0.0);

  const auto est = dk_lower(a, b, 1, dict);
  CHECK(est.estimate > 0.1);
  // Exact Gaussian expectations of every member.
  double exact = 0.0;
  for (const auto& f : dict) {
    auto gap = [&](double x) {
      return f(x) * (std::exp(-0.5 * x * x) - std::exp(-0.5 * (x - 0.5) * (x - 0.5))) / std::sqrt(2 * M_PI);
    };
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(gap, -30.0, 30.0, 15, 1e-12);
    exact = std::max(exact, std::abs(v));
  }
  CHECK(exact > 0.1);
  CHECK(std::abs(est.estimate - exact) < 0.01);

  std::vector<TestFunction> steep{{TestShape::sigmoid, 0.0, 1e-3, 2.0}};
  CHECK(dk_lower(a, b, 0, steep).estimate <= 2.0);
  CHECK_THROWS_AS(dk_lower(a, b, 1, steep), ArgumentError);

  const auto abig = std::vector<double>(a.begin(), a.begin() + 5000);
  const auto bbig = std::vector<double>(b.begin(), b.begin() + 5000);
  std::vector<TestFunction> half(dict.begin(), dict.begin() + 40);
  CHECK(dk_lower(abig, bbig, 1, half).estimate <= dk_lower(abig, bbig, 1, dict).estimate);
  const auto dict3 = normalize_dictionary(dict, 3);
  CHECK(dk_lower(abig, bbig, 3, dict3).estimate <= dk_lower(abig, bbig, 1, normalize_dictionary(dict, 1)).estimate);
  CHECK(dk_lower(abig, bbig, 1, dict).estimate == doctest::Approx(dk_lower(bbig, abig, 1, dict).estimate).epsilon(1e-12));
  CHECK(dk_lower(abig, bbig, 1, dict, 1).estimate == dk_lower(abig, bbig, 1, dict, 4).estimate);
}

TEST_CASE("smoothed total variation") {
  CHECK(boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [](double z) { return smoothing_kernel(z, 0.3); }, -1.0, 1.0, 15, 1e-12) == doctest::Approx(1.0));
  const auto a = normal_sample(100000, 0.0, 8);
  const auto b = normal_sample(100000, 0.0, 9);
  CHECK(tv_kde(a, a, 0.05).estimate == 0.0);
  CHECK(tv_kde(a, b, 0.05).estimate < 0.02);
  CHECK(tv_kde(a, b, 0.05).estimate == doctest::Approx(tv_kde(b, a, 0.05).estimate).epsilon(1e-12));

  std::vector<double> left(1000);
  std::vector<double> right(1000);
  for (int i = 0; i < 1000; ++i) {
    left[i] = i * 1e-3;
    right[i] = 10.0 + i * 1e-3;
  }
  CHECK(tv_kde(left, right, 0.01).estimate == doctest::Approx(1.0).epsilon(1e-6));

  std::mt19937_64 gen(10);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> p(20);
    std::vector<double> q(15);
    for (auto& v : p) v = nd(gen);
    for (auto& v : q) v = 0.7 * nd(gen) + 0.3;
    const double delta = 0.05 + 0.02 * trial;
    std::vector<double> breaks;
    for (const auto* s : {&p, &q})
      for (double v : *s)
        for (double off : {-1.0, -std::sqrt(2.0), 1.0, std::sqrt(2.0)}) breaks.push_back(v + off * std::sqrt(delta));
    std::sort(breaks.begin(), breaks.end());
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      if (breaks[i + 1] - breaks[i] < 1e-14) continue;
      l1 += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double x) { return std::abs(kde_ref(p, x, delta) - kde_ref(q, x, delta)); }, breaks[i], breaks[i + 1],
          10, 1e-10);
    }
    const double est = tv_kde(p, q, delta).estimate;
    CHECK(est <= 1.0 + 1e-9);
    CHECK(est == doctest::Approx(0.5 * l1).epsilon(2e-4));
  }
}

TEST_CASE("centered chi-squared cdf and bootstrap") {
  for (double x : {-1.5, -0.3, 0.0, 1.0, 4.0}) CHECK(centered_chi2_cdf(x, 2) == doctest::Approx(1 - std::exp(-(x + 2) / 2)));
  CHECK(centered_chi2_cdf(-2.5, 2) == 0.0);
  CHECK(centered_chi2_cdf(0.0, 1) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))));

  const auto a = normal_sample(500, 0.0, 11);
  const auto b = normal_sample(500, 0.3, 12);
  const auto ci = bootstrap_interval(a, b, [](auto x, auto y) { return kolmogorov_two_sample(x, y); }, 200, 3);
  CHECK(ci.first <= ci.second);
  CHECK(ci.first <= kolmogorov_two_sample(a, b) + 0.05);
  CHECK(distance_to_json(tv_kde(a, b, 0.1)).find("tv_kde") != std::string::npos);
}
