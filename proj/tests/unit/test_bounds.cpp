#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "homsum/bounds.hpp"
#include "homsum/coefficients.hpp"
#include "homsum/error.hpp"
#include "test_support.hpp"

using namespace homsum;
using homsum::testing::for_each_tuple;
using homsum::testing::random_family;

namespace {

CoefficientFamily flat_linear(int n) {
  std::vector<CoefficientEntry> entries;
  for (int j = 1; j <= n; ++j) entries.push_back({{j}, 1.0 / std::sqrt(static_cast<double>(n))});
  return CoefficientFamily(1, n, entries);
}

CoefficientFamily flat_quadratic(int n) {
  std::vector<CoefficientEntry> entries;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) entries.push_back({{i, j}, 1.0 / n});
  return CoefficientFamily(2, n, entries);
}

}  // namespace

TEST_CASE("c_small closed forms") {
  CHECK(c_small(1, 0.5, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  const double base = 0.2 * 0.5 / std::sqrt(2.0);
  CHECK(c_small(2, 0.25, 0.2) == doctest::Approx(std::pow(base, 4) / 2).epsilon(1e-14));
  CHECK(c_small(2, 0.25, 0.2) == doctest::Approx(1.25e-5).epsilon(1e-12));
  for (int n = 1; n < 8; ++n) CHECK(c_small(n + 1, 0.3, 0.4) < c_small(n, 0.3, 0.4));
  CHECK_THROWS_AS(c_small(0, 0.5, 0.5), ArgumentError);
  CHECK_THROWS_AS(c_small(1, 1.0, 0.5), ArgumentError);
  CHECK_THROWS_AS(c_small(1, 0.5, 0.0), ArgumentError);
}

TEST_CASE("c_big scaling") {
  UniversalConstants k;
  CHECK(c_big(1, 0.5, 0.5, k) == doctest::Approx(std::exp(1.0) * 4.0));
  k.q1 = 2;
  k.q4 = 3;
  k.scale = 0.5;
  CHECK(c_big(3, 0.5, 0.5, k, 2.0) == doctest::Approx(0.5 * 36.0 * std::exp(2.0) * 2.0 * 8.0));
}

TEST_CASE("K1 constant") {
  CHECK(k1_constant(1) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-15));
  CHECK(k1_constant(1) == doctest::Approx(1.77245385).epsilon(1e-8));
  CHECK(k1_constant(2) == doctest::Approx(std::sqrt(std::numbers::pi / 2)).epsilon(1e-15));
  CHECK(k1_constant(2) == doctest::Approx(1.25331414).epsilon(1e-8));
}

TEST_CASE("chi2 bound at zero family") {
  CoefficientFamily zero(2, 4, {});
  const auto rep = chi2_bound(zero, 2, 2);
  CHECK(rep.value == doctest::Approx(k1_constant(2) * 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(chi2_bound(CoefficientFamily(3, 4, {}), 3, 2), ArgumentError);
  const auto matched = chi2_bound(zero, 2, 2, KappaForm::variance_matched);
  CHECK(matched.value == doctest::Approx(k1_constant(2) * 4.0));
}

TEST_CASE("smooth invariance plug-in") {
  CoefficientFamily zero(2, 4, {});
  CHECK(smooth_invariance_bound(zero, 2, 1.0, 1.0).value == 0.0);
  CoefficientFamily single(1, 1, {{{1}, 1.0}});
  CHECK(smooth_invariance_bound(single, 1, 1.0, 1.0).value == doctest::Approx(4.0).epsilon(1e-15));
  const auto c = flat_quadratic(100);
  const double expected = 36.0 * std::pow(3.0, 8) * total_norm(c, 2) * total_influence(c, 2);
  CHECK(smooth_invariance_bound(c, 2, 3.0, 1.0).value == doctest::Approx(expected).epsilon(1e-13));
  CHECK_THROWS_AS(smooth_invariance_bound(c, 2, 0.5, 1.0), ArgumentError);

  std::mt19937_64 gen(401);
  for (int t = 0; t < 20; ++t) {
    auto fam = random_family(gen, 2, 8, 0.5);
    const double lo = smooth_invariance_bound(fam, 2, 1.5, 1.0).value;
    CHECK(smooth_invariance_bound(fam, 2, 2.0, 1.0).value >= lo);
    CHECK(smooth_invariance_bound(fam, 2, 1.5, 2.0).value >= lo);
    CHECK(lo >= 0.0);
  }
}

TEST_CASE("hoeffding threshold and tail") {
  const int n = 50;
  const auto c = flat_linear(n);
  CHECK(hoeffding_threshold(c, 1, 0.3) == doctest::Approx(0.005625).epsilon(1e-13));
  const auto rep = hoeffding_tail(c, 1, 0.005, 0.3);
  const double infl2 = 1.0 / n;
  const double expected = 2.0 * std::exp(3.0) / 9.0 * std::exp(-0.005 * 0.005 / infl2);
  CHECK(rep.value == doctest::Approx(expected).epsilon(1e-13));
  CHECK(rep.flags.at("valid"));
  CHECK_FALSE(hoeffding_tail(c, 1, 0.01, 0.3).flags.at("valid"));

  const auto zero_x = hoeffding_tail(c, 1, 0.0, 0.3);
  CHECK(zero_x.value == doctest::Approx(2.0 * std::exp(3.0) / 9.0));
  CHECK(zero_x.value >= 1.0);
  const auto quad = flat_quadratic(20);
  CHECK(hoeffding_tail(quad, 2, 0.0, 0.5).value == doctest::Approx(4.0 * std::exp(3.0) / 9.0));
  CHECK(hoeffding_tail(CoefficientFamily(2, 3, {}), 2, 0.0, 0.5).value ==
        doctest::Approx(4.0 * std::exp(3.0) / 9.0));

  double prev = HUGE_VAL;
  const double thr = hoeffding_threshold(quad, 2, 0.5);
  for (int i = 0; i <= 10; ++i) {
    const double v = hoeffding_tail(quad, 2, thr * i / 10.0, 0.5).value;
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_THROWS_AS(hoeffding_threshold(c, 1, 1.0), ArgumentError);
}

TEST_CASE("squared series against ordered sum") {
  std::mt19937_64 gen(77);
  std::bernoulli_distribution coin(0.6);
  for (int t = 0; t < 30; ++t) {
    const int degree = 1 + t % 3;
    auto c = random_family(gen, degree, 6, 0.6);
    std::vector<std::uint8_t> chi(6);
    for (auto& x : chi) x = coin(gen);
    double brute = 0.0;
    for (int m = 1; m <= degree; ++m)
      for_each_tuple(m, 6, [&](const std::vector<int>& tup) {
        double term = eval_coeff(c, tup);
        term *= term;
        for (int k : tup) term *= chi[k - 1];
        brute += term;
      });
    CHECK(squared_series(c, chi, degree) == doctest::Approx(brute).epsilon(1e-13));
  }
}

TEST_CASE("hoeffding soundness by simulation") {
  std::mt19937_64 gen(2024);
  const double probs[] = {0.3, 0.5, 0.8};
  for (int t = 0; t < 6; ++t) {
    const int degree = 1 + t % 2;
    const double p = probs[t % 3];
    auto c = random_family(gen, degree, 10, 0.7);
    const double x = hoeffding_threshold(c, degree, p);
    const auto rep = hoeffding_tail(c, degree, x, p);
    REQUIRE(rep.flags.at("valid"));
    const auto mc = mc_squared_series_tail(c, degree, x, p, 100000, 9000 + t);
    CHECK(mc.estimate <= rep.value + 3.0 * mc.standard_error);
  }
  const auto c = flat_linear(12);
  const auto a = mc_squared_series_tail(c, 1, 0.4, 0.5, 5000, 3, 1);
  const auto b = mc_squared_series_tail(c, 1, 0.4, 0.5, 5000, 3, 4);
  CHECK(a.estimate == b.estimate);
}

TEST_CASE("cw tail template") {
  UniversalConstants k;
  const auto c = flat_quadratic(256);
  const auto base = cw_tail_template(c, 2, 1e-3, k, 0.25, 0.2);
  CHECK(base.flags.at("constants_assumed"));
  CHECK(base.flags.at("template"));
  const auto doubled = cw_tail_template(c, 2, 2e-3, k, 0.25, 0.2);
  const double cb = c_big(2, 0.25, 0.2, k);
  const double top = level_norm(c, 2);
  const double delta = influence(c, 2);
  const double tail = std::exp(-c_small(2, 0.25, 0.2) * top * top / (delta * delta));
  CHECK((doubled.value / cb - tail) / (base.value / cb - tail) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  const auto tiny = cw_tail_template(c, 2, 1e-300, k, 0.25, 0.2);
  CHECK(tiny.value == doctest::Approx(cb * tail).epsilon(1e-9));
  CHECK_THROWS_AS(cw_tail_template(c, 2, 0.0, k, 0.25, 0.2), ArgumentError);
  auto user = k;
  user.assumed = false;
  CHECK_FALSE(cw_tail_template(c, 2, 1e-3, user, 0.25, 0.2).flags.at("constants_assumed"));
}

TEST_CASE("tv invariance template") {
  UniversalConstants k;
  const auto c = flat_quadratic(64);
  const auto rep = tv_invariance_template(c, 2, k, 0.25, 0.2);
  CHECK(rep.inputs.at("influence_exponent") == doctest::Approx(0.1));
  CHECK(rep.inputs.at("norm_exponent") == doctest::Approx(0.6));
  CHECK(rep.value >= 0.0);
  CHECK_THROWS_AS(tv_invariance_template(CoefficientFamily(2, 4, {}), 2, k, 0.25, 0.2), ArgumentError);

  // influence shrinking at fixed top norm drives both terms to zero
  double prev = HUGE_VAL;
  for (int n : {16, 64, 256, 1024}) {
    const auto fam = flat_quadratic(n);
    const double top = level_norm(fam, 2);
    std::vector<CoefficientEntry> scaled;
    for (const auto& e : fam.entries()) scaled.push_back({e.indices, e.value / top});
    const CoefficientFamily unit(2, n, scaled);
    const double v = tv_invariance_template(unit, 2, k, 0.5, 0.9).value;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("dk to d0 template") {
  UniversalConstants k;
  const auto c = flat_quadratic(16);
  const auto cbar = flat_linear(16);
  const auto zero = dk_to_d0_template(c, cbar, 2, 1, 3, 0.1, {}, k, 0.25, 0.2);
  CHECK(zero.value == 0.0);
  const auto rep = dk_to_d0_template(c, cbar, 2, 1, 3, 0.1, {0.01, 0.0, 0.0}, k, 0.25, 0.2);
  CHECK(rep.inputs.at("dk_exponent") == doctest::Approx(0.25));
  CHECK(rep.inputs.at("eta_exponent") == doctest::Approx(-0.75));
  const double scale = c_big(2, 0.25, 0.2, k) * (1.0 + total_norm(c, 2) + total_norm(cbar, 1));
  CHECK(rep.value == doctest::Approx(scale * std::pow(0.1, -0.75) * std::pow(0.01, 0.25)));
  const auto opt = dk_to_d0_optimized(c, cbar, 2, 1, 3, 0.01, k, 0.25, 0.2);
  CHECK(opt.inputs.at("dk_exponent") == doctest::Approx(1.0 / 10.0));
  CHECK(opt.value > 0.0);
}

TEST_CASE("limit distance template and constants io") {
  UniversalConstants k;
  const auto c = flat_quadratic(32);
  const auto rep = limit_distance_template(c, 2, 2, 0.05, 1.0, 1.0, k, 0.25, 0.2);
  CHECK(rep.value > 0.0);
  CHECK(rep.flags.at("constants_assumed"));
  const auto parsed = parse_constants_json(R"({"p_star": 2, "C": 3.5, "q1": 2, "q4": 4})");
  CHECK(parsed.p_star == 2.0);
  CHECK(parsed.scale == 3.5);
  CHECK(parsed.q4 == 4);
  CHECK_FALSE(parsed.assumed);
  const auto back = parse_constants_json(constants_to_json(parsed));
  CHECK(back.q1 == 2);
  CHECK_THROWS_AS(parse_constants_json(R"({"p_star": 0.5})"), ConfigError);
  CHECK_THROWS_AS(parse_constants_json(R"({"zeta": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_constants_json("[1"), ConfigError);
  const auto text = bound_reports_to_json({rep});
  CHECK(text.find("limit_distance") != std::string::npos);
}
