#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "homsum/coeff_io.hpp"
#include "homsum/coefficients.hpp"
#include "homsum/combinatorics.hpp"
#include "homsum/contraction.hpp"
#include "homsum/error.hpp"
#include "test_support.hpp"

using namespace homsum;
using homsum::testing::for_each_tuple;
using homsum::testing::join;
using homsum::testing::random_family;

namespace {

CoefficientFamily single(std::vector<int> key, double v, int degree = 2, int support = 2) {
  return CoefficientFamily(degree, support, {{std::move(key), v}});
}

double brute_level_sq(const CoefficientFamily& c, int m) {
  double s = 0.0;
  for_each_tuple(m, c.support(), [&](const std::vector<int>& t) {
    const double v = eval_coeff(c, t);
    s += v * v;
  });
  return s;
}

double brute_influence(const CoefficientFamily& c, int m) {
  double best = 0.0;
  for (int k = 1; k <= c.support(); ++k) {
    double s = 0.0;
    for_each_tuple(m - 1, c.support(), [&](const std::vector<int>& t) {
      const double v = eval_coeff(c, join(t, {k}));
      s += v * v;
    });
    best = std::max(best, m == 1 ? std::abs(eval_coeff(c, {k})) : std::sqrt(s));
  }
  return best;
}

double brute_contraction(const CoefficientFamily& c, const CoefficientFamily& d, int r, const std::vector<int>& a,
                         const std::vector<int>& b) {
  double s = 0.0;
  for_each_tuple(r, c.support(), [&](const std::vector<int>& g) {
    s += eval_coeff(c, join(a, g)) * eval_coeff(d, join(b, g));
  });
  return s;
}

double brute_symmetrized(const CoefficientFamily& c, int r, std::vector<int> u) {
  const int side = c.degree() - r;
  std::vector<int> pos(u.size());
  std::iota(pos.begin(), pos.end(), 0);
  double sum = 0.0;
  int count = 0;
  do {
    std::vector<int> a;
    std::vector<int> b;
    for (int p = 0; p < static_cast<int>(pos.size()); ++p)
      (p < side ? a : b).push_back(u[static_cast<std::size_t>(pos[static_cast<std::size_t>(p)])]);
    sum += brute_contraction(c, c, r, a, b);
    ++count;
  } while (std::next_permutation(pos.begin(), pos.end()));
  return sum / count;
}

// kappa straight from ordered sums over every tuple.
double brute_kappa(const CoefficientFamily& c, int dof, KappaForm form) {
  const int n = c.degree();
  const double fact = factorial(n);
  const double target = form == KappaForm::printed ? dof : 2.0 * dof;
  const double gap = target - fact * brute_level_sq(c, n);
  const double theta = form == KappaForm::printed ? 0.25 * factorial(n / 2) * binomial(n, n / 2)
                                                  : 0.25 * factorial(n / 2) * std::pow(binomial(n, n / 2), 2);
  double middle = 0.0;
  for_each_tuple(n, c.support(), [&](const std::vector<int>& u) {
    const double diff = theta * brute_symmetrized(c, n / 2, u) - eval_coeff(c, u);
    middle += diff * diff;
  });
  double others = 0.0;
  for (int r = 1; r < n; ++r) {
    if (r == n / 2) continue;
    double norm = 0.0;
    for_each_tuple(n - r, c.support(), [&](const std::vector<int>& a) {
      for_each_tuple(n - r, c.support(), [&](const std::vector<int>& b) {
        const double v = brute_contraction(c, c, r, a, b);
        norm += v * v;
      });
    });
    others += factorial(2 * n - 2 * r) * std::pow(factorial(r - 1), 2) * std::pow(binomial(n - 1, r - 1), 4) * norm;
  }
  return gap * gap + 4.0 * fact * middle + n * n * others;
}

}  // namespace

TEST_CASE("canonicalize sorts and flags repeats") {
  CHECK(*canonicalize({3, 1, 2}) == MultiIndex{1, 2, 3});
  CHECK_FALSE(canonicalize({1, 1}).has_value());
  CHECK(*canonicalize({7}) == MultiIndex{7});
  CHECK_THROWS_AS(canonicalize(std::span<const int>{}), ArgumentError);
  CHECK(permutation_count(std::vector<int>{1, 1, 2}) == 3.0);
}

TEST_CASE("eval_coeff is symmetric and null on diagonals") {
  const auto c = single({1, 2}, 5.0, 2, 3);
  CHECK(eval_coeff(c, {2, 1}) == 5.0);
  CHECK(eval_coeff(c, {1, 1}) == 0.0);
  CHECK(eval_coeff(c, {1, 3}) == 0.0);

  std::mt19937_64 gen(11);
  const auto r = random_family(gen, 3, 5, 0.6);
  for_each_tuple(3, 5, [&](const std::vector<int>& t) {
    auto s = t;
    std::sort(s.begin(), s.end());
    const bool repeat = std::adjacent_find(s.begin(), s.end()) != s.end();
    if (repeat) CHECK(eval_coeff(r, t) == 0.0);
    else CHECK(eval_coeff(r, t) == eval_coeff(r, s));
  });
}

TEST_CASE("construction rejects bad keys") {
  CHECK_THROWS_AS(CoefficientFamily(2, 3, {{{2, 1}, 1.0}}), ArgumentError);
  CHECK_THROWS_AS(CoefficientFamily(2, 3, {{{1, 4}, 1.0}}), ArgumentError);
  CHECK_THROWS_AS(CoefficientFamily(1, 3, {{{1, 2}, 1.0}}), ArgumentError);
  CHECK_THROWS_AS(CoefficientFamily(2, 3, {{{1, 2}, 1.0}, {{1, 2}, 2.0}}), ArgumentError);
}

TEST_CASE("level norms and influence on small families") {
  const auto c = single({1, 2}, 1.0);
  CHECK(level_norm(c, 2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(influence(c, 2) == doctest::Approx(1.0));
  CHECK(total_influence(c, 2) == doctest::Approx(1.0));
  CHECK(total_norm(c, 2) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(level_norm(c, 3), ArgumentError);
  CHECK_THROWS_AS(influence(c, 0), ArgumentError);

  const CoefficientFamily empty(3, 4);
  CHECK(level_norm(empty, 3) == 0.0);
  CHECK(total_influence(empty, 3) == 0.0);
  CHECK(total_norm(empty, 3) == 0.0);
}

TEST_CASE("level norms and influence match ordered-tuple enumeration") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const int degree = 1 + trial % 3;
    const int support = 3 + trial % 4;
    const auto c = random_family(gen, degree, support, 0.5);
    const auto stats = coeff_stats(c);
    double norm_sq = 0.0;
    double infl = 0.0;
    for (int m = 1; m <= degree; ++m) {
      CHECK(level_norm(c, m) * level_norm(c, m) == doctest::Approx(brute_level_sq(c, m)).epsilon(1e-12));
      CHECK(influence(c, m) == doctest::Approx(brute_influence(c, m)).epsilon(1e-12));
      CHECK(influence(c, m) <= level_norm(c, m) + 1e-12);
      norm_sq += brute_level_sq(c, m);
      infl += brute_influence(c, m);
    }
    CHECK(stats.total_norm == doctest::Approx(std::sqrt(norm_sq)).epsilon(1e-12));
    CHECK(stats.total_influence == doctest::Approx(infl).epsilon(1e-12));
    CHECK(total_norm(c, degree) == doctest::Approx(stats.total_norm));
  }
}

TEST_CASE("contractions agree with direct ordered sums") {
  SUBCASE("degree one inner product") {
    const CoefficientFamily c(1, 3, {{{1}, 1.0}, {{2}, -2.0}, {{3}, 0.5}});
    const auto t = contraction(c, c, 1);
    REQUIRE(t.is_scalar);
    CHECK(t.scalar == doctest::Approx(1.0 + 4.0 + 0.25));
  }
  SUBCASE("explicit 3x3 matrix") {
    const CoefficientFamily c(2, 3, {{{1, 2}, 1.0}, {{1, 3}, 2.0}, {{2, 3}, -3.0}});
    const auto t = contraction(c, c, 1);
    REQUIRE(t.is_dense);
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        double s = 0.0;
        for (int k = 1; k <= 3; ++k) s += eval_coeff(c, {i, k}) * eval_coeff(c, {k, j});
        CHECK(t.value(std::vector<int>{i}, std::vector<int>{j}) == doctest::Approx(s));
      }
    CHECK(t.value(std::vector<int>{1}, std::vector<int>{1}) == doctest::Approx(5.0));
  }
  SUBCASE("degree three, all orders") {
    std::mt19937_64 gen(7);
    const auto c = random_family(gen, 3, 5, 0.6, true);
    const auto d = random_family(gen, 3, 5, 0.6, true);
    for (int r = 0; r <= 3; ++r) {
      const auto t = contraction(c, d, r);
      double norm = 0.0;
      for_each_tuple(3 - r, 5, [&](const std::vector<int>& a) {
        for_each_tuple(3 - r, 5, [&](const std::vector<int>& b) {
          const double expected = brute_contraction(c, d, r, a, b);
          norm += expected * expected;
          CHECK(t.value(a, b) == doctest::Approx(expected).epsilon(1e-12));
        });
      });
      CHECK(t.ordered_norm_sq() == doctest::Approx(norm).epsilon(1e-12));
    }
    CHECK_THROWS_AS(contraction(c, d, 4), ArgumentError);
  }
  SUBCASE("bilinearity") {
    std::mt19937_64 gen(8);
    const auto c = random_family(gen, 3, 5, 0.5, true);
    const auto d = random_family(gen, 3, 5, 0.5, true);
    const auto e = random_family(gen, 3, 5, 0.5, true);
    const auto lhs = contraction(add(c, d), e, 1);
    const auto c1 = contraction(c, e, 1);
    const auto c2 = contraction(d, e, 1);
    for_each_tuple(2, 5, [&](const std::vector<int>& a) {
      for_each_tuple(2, 5, [&](const std::vector<int>& b) {
        CHECK(lhs.value(a, b) == doctest::Approx(c1.value(a, b) + c2.value(a, b)).epsilon(1e-12));
      });
    });
  }
  SUBCASE("large sparse supports are refused") {
    const CoefficientFamily big(3, 65, {{{1, 2, 65}, 1.0}});
    CHECK_THROWS_AS(contraction(big, big, 1), ArgumentError);
  }
}

TEST_CASE("symmetrized contractions") {
  std::mt19937_64 gen(9);
  SUBCASE("degree two averages the transpose") {
    const auto c = random_family(gen, 2, 4, 0.8, true);
    const auto d = random_family(gen, 2, 4, 0.8, true);
    const auto t = contraction(c, d, 1);
    const auto s = symmetrize_contraction(t);
    for (int i = 1; i <= 4; ++i)
      for (int j = 1; j <= 4; ++j) {
        const std::vector<int> a{i};
        const std::vector<int> b{j};
        CHECK(s.value(a, b) == doctest::Approx(0.5 * (t.value(a, b) + t.value(b, a))));
      }
    const auto again = symmetrize_contraction(symmetrize_contraction(contraction(c, c, 1)));
    CHECK((again.dense - contraction(c, c, 1).dense).norm() < 1e-12);
  }
  SUBCASE("degree four matches permutation averaging") {
    const auto c = random_family(gen, 4, 5, 0.5, true);
    const auto s = symmetrize_contraction(contraction(c, c, 2));
    double norm = 0.0;
    for_each_tuple(4, 5, [&](const std::vector<int>& u) {
      const double expected = brute_symmetrized(c, 2, u);
      norm += expected * expected;
      const std::vector<int> a(u.begin(), u.begin() + 2);
      const std::vector<int> b(u.begin() + 2, u.end());
      CHECK(s.value(a, b) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(s.value(b, a) == doctest::Approx(expected).epsilon(1e-12));
    });
    CHECK(s.ordered_norm_sq() == doctest::Approx(norm).epsilon(1e-12));
  }
}

TEST_CASE("kappa functional") {
  const CoefficientFamily zero(2, 3);
  CHECK(kappa_chi2(zero, 2, 2) == doctest::Approx(4.0));
  CHECK(kappa_chi2(zero, 3, 2) == doctest::Approx(9.0));
  CHECK(kappa_theta(2) == doctest::Approx(0.5));
  CHECK(kappa_theta(2, KappaForm::variance_matched) == doctest::Approx(1.0));
  CHECK(kappa_theta(4) == doctest::Approx(0.25 * 2 * 6));
  CHECK_THROWS_AS(kappa_chi2(CoefficientFamily(3, 3), 2, 3), ArgumentError);
  CHECK_THROWS_AS(kappa_chi2(CoefficientFamily(2, 3, {{{1}, 1.0}}), 2, 2), ArgumentError);

  std::mt19937_64 gen(10);
  for (auto form : {KappaForm::printed, KappaForm::variance_matched}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto c2 = random_family(gen, 2, 5, 0.7, true);
      const double k2 = kappa_chi2(c2, 2, 2, form);
      CHECK(k2 >= 0.0);
      CHECK(k2 == doctest::Approx(brute_kappa(c2, 2, form)).epsilon(1e-10));
    }
    const auto c4 = random_family(gen, 4, 5, 0.6, true);
    CHECK(kappa_chi2(c4, 1, 4, form) == doctest::Approx(brute_kappa(c4, 1, form)).epsilon(1e-10));
  }
}

TEST_CASE("nq weight") {
  std::mt19937_64 gen(12);
  const CoefficientFamily zero(3, 4);
  CHECK(nq_weight(zero, 1, 2.0, 3) == 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int degree = 1 + trial % 3;
    const auto c = random_family(gen, degree, 4, 0.6);
    const double top = level_norm(c, degree);
    CHECK(nq_weight(c, degree, 3.0, degree) == doctest::Approx(factorial(degree) * top).epsilon(1e-12));
    for (int q = 1; q <= degree; ++q)
      for (double moment : {1.0, 2.5, 6.0})
        CHECK(nq_weight(c, q, moment, degree) <=
              factorial(degree) * std::exp(moment / 2.0) * total_norm(c, degree) * (1 + 1e-12));
  }
  CHECK_THROWS_AS(nq_weight(zero, 0, 2.0, 3), ArgumentError);
  CHECK_THROWS_AS(nq_weight(zero, 1, 0.5, 3), ArgumentError);
}

TEST_CASE("lifted coefficients") {
  const auto l = lift_cj(single({1, 2}, 5.0), 2);
  CHECK(l.constant == 0.0);
  CHECK(l.family.degree() == 1);
  CHECK(eval_coeff(l.family, {1}) == doctest::Approx(10.0));

  const auto l1 = lift_cj(CoefficientFamily(1, 1, {{{1}, 3.0}}), 1);
  CHECK(l1.constant == 3.0);
  CHECK(l1.family.entry_count() == 0);

  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 10; ++trial) {
    const int degree = 2 + trial % 2;
    const int support = 5;
    const auto c = random_family(gen, degree, support, 0.6);
    double lhs = 0.0;
    for (int j = 1; j <= support; ++j) {
      const auto lj = lift_cj(c, j);
      for_each_tuple(degree - 1, support, [&](const std::vector<int>& a) {
        const double v = eval_coeff(lj.family, a);
        lhs += v * v / (degree * degree);
        CHECK(v == doctest::Approx((1.0 + a.size()) * eval_coeff(c, join(a, {j}))));
      });
      CHECK(lj.constant == eval_coeff(c, {j}));
    }
    double canon = 0.0;
    for (double v : c.values(degree)) canon += v * v;
    CHECK(lhs == doctest::Approx(degree * factorial(degree - 1) * canon).epsilon(1e-12));
  }
}

TEST_CASE("dense level two round trip") {
  std::mt19937_64 gen(14);
  const auto c = random_family(gen, 2, 6, 0.5, true);
  const Eigen::MatrixXd m = dense_level2(c);
  CHECK((m - m.transpose()).norm() == 0.0);
  CHECK(m.diagonal().norm() == 0.0);
  const auto back = CoefficientFamily::from_dense(m);
  CHECK(coefficients_hash(back) == coefficients_hash(c));
  Eigen::MatrixXd bad = m;
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(CoefficientFamily::from_dense(bad), ArgumentError);
  bad = m;
  bad(0, 1) += 1e-9;
  CHECK_THROWS_AS(CoefficientFamily::from_dense(bad), ArgumentError);
}

TEST_CASE("coefficient file formats") {
  std::mt19937_64 gen(15);
  const auto c = random_family(gen, 3, 5, 0.5);
  const auto back = parse_coefficients_json(coefficients_to_json(c));
  CHECK(coefficients_hash(back) == coefficients_hash(c));
  CHECK_THROWS_AS(parse_coefficients_json(R"({"degree":2,"support":3,"entries":[{"indices":[2,1],"value":1}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_coefficients_json(R"({"degree":2,"support":3,"entries":[{"indices":[1,1],"value":1}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_coefficients_json("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_coefficients_json(R"({"degree":2})"), ConfigError);

  const auto dense = parse_dense_csv("0,1.5,0\n1.5,0,-2\n0,-2,0\n");
  CHECK(eval_coeff(dense, {2, 1}) == 1.5);
  CHECK(eval_coeff(dense, {3, 2}) == -2.0);
  CHECK(dense.level_size(2) == 2);
  CHECK_THROWS_AS(parse_dense_csv("1,0\n0,0\n"), ConfigError);
  CHECK_THROWS_AS(parse_dense_csv("0,1\n2,0\n"), ConfigError);
  CHECK_THROWS_AS(parse_dense_csv("0,1\n1\n"), ConfigError);
}
