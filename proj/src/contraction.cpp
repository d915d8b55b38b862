#include "homsum/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "homsum/combinatorics.hpp"
#include "homsum/error.hpp"

namespace homsum {

namespace {

Eigen::MatrixXd padded_level2(const CoefficientFamily& c, int support) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(support, support);
  for (std::size_t e = 0; e < c.level_size(2); ++e) {
    const auto k = c.key(2, e);
    out(k[0] - 1, k[1] - 1) = c.value(2, e);
    out(k[1] - 1, k[0] - 1) = c.value(2, e);
  }
  return out;
}

// Every way to pull r positions out of each level-N key as the shared block.
std::map<std::vector<int>, std::vector<std::pair<std::vector<int>, double>>> split_by_shared(
    const CoefficientFamily& c, int degree, int order) {
  std::map<std::vector<int>, std::vector<std::pair<std::vector<int>, double>>> out;
  for (std::size_t e = 0; e < c.level_size(degree); ++e) {
    const auto k = c.key(degree, e);
    const double v = c.value(degree, e);
    for (unsigned mask = 0; mask < (1u << degree); ++mask) {
      if (__builtin_popcount(mask) != order) continue;
      std::vector<int> gamma;
      std::vector<int> rest;
      for (int p = 0; p < degree; ++p) ((mask >> p) & 1u ? gamma : rest).push_back(k[static_cast<std::size_t>(p)]);
      out[gamma].emplace_back(std::move(rest), v);
    }
  }
  return out;
}

std::vector<int> concat(std::span<const int> a, std::span<const int> b) {
  std::vector<int> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

double ContractionTable::value(std::span<const int> alpha, std::span<const int> beta) const {
  if (is_scalar) return scalar;
  require(static_cast<int>(alpha.size()) == arity() && static_cast<int>(beta.size()) == arity(),
          "contraction value: wrong tuple length");
  if (is_dense) {
    if (alpha[0] < 1 || beta[0] < 1 || alpha[0] > dense.rows() || beta[0] > dense.rows()) return 0.0;
    return dense(alpha[0] - 1, beta[0] - 1);
  }
  std::vector<int> key;
  if (symmetric) {
    key = concat(alpha, beta);
    std::sort(key.begin(), key.end());
  } else {
    const auto a = canonicalize(alpha);
    const auto b = canonicalize(beta);
    if (!a || !b) return 0.0;
    key = concat(*a, *b);
  }
  const auto it = entries.find(key);
  return it == entries.end() ? 0.0 : it->second;
}

double ContractionTable::ordered_norm_sq() const {
  if (is_scalar) return scalar * scalar;
  if (is_dense) return dense.squaredNorm();
  double sum = 0.0;
  const double side = factorial(arity());
  for (const auto& [key, v] : entries) {
    const double mult = symmetric ? permutation_count(key) : side * side;
    sum += mult * v * v;
  }
  return sum;
}

ContractionTable contraction(const CoefficientFamily& c, const CoefficientFamily& d, int order) {
  require(c.degree() == d.degree(), "contraction: families must share the degree");
  const int degree = c.degree();
  require(degree >= 1, "contraction: degree must be positive");
  require(order >= 0 && order <= degree, "contraction: order out of range");

  ContractionTable out;
  out.degree = degree;
  out.order = order;
  out.support = std::max(c.support(), d.support());

  if (order == degree) {
    out.is_scalar = true;
    double sum = 0.0;
    for (std::size_t e = 0; e < c.level_size(degree); ++e) sum += c.value(degree, e) * d.at(c.key(degree, e));
    out.scalar = factorial(degree) * sum;
    return out;
  }
  if (degree == 2 && order == 1) {
    out.is_dense = true;
    out.dense = padded_level2(c, out.support) * padded_level2(d, out.support);
    return out;
  }
  require(out.support <= kSparseContractionMaxSupport,
          "contraction: sparse path limited to support <= 64");
  if (order == 0) {
    for (std::size_t a = 0; a < c.level_size(degree); ++a)
      for (std::size_t b = 0; b < d.level_size(degree); ++b)
        out.entries[concat(c.key(degree, a), d.key(degree, b))] = c.value(degree, a) * d.value(degree, b);
    return out;
  }
  const auto left = split_by_shared(c, degree, order);
  const auto right = split_by_shared(d, degree, order);
  const double mult = factorial(order);
  for (const auto& [gamma, lhs] : left) {
    const auto it = right.find(gamma);
    if (it == right.end()) continue;
    for (const auto& [alpha, cv] : lhs)
      for (const auto& [beta, dv] : it->second) out.entries[concat(alpha, beta)] += mult * cv * dv;
  }
  return out;
}

ContractionTable symmetrize_contraction(const ContractionTable& table) {
  ContractionTable out = table;
  out.symmetric = true;
  if (table.is_scalar || table.symmetric) return out;
  if (table.is_dense) {
    out.dense = 0.5 * (table.dense + table.dense.transpose());
    return out;
  }
  std::set<std::vector<int>> multisets;
  for (const auto& [key, v] : table.entries) {
    auto u = key;
    std::sort(u.begin(), u.end());
    multisets.insert(std::move(u));
  }
  const int side = table.arity();
  const int width = 2 * side;
  const double splits = binomial(width, side);
  out.entries.clear();
  for (const auto& u : multisets) {
    double sum = 0.0;
    for (unsigned mask = 0; mask < (1u << width); ++mask) {
      if (__builtin_popcount(mask) != side) continue;
      std::vector<int> alpha;
      std::vector<int> beta;
      for (int p = 0; p < width; ++p) ((mask >> p) & 1u ? alpha : beta).push_back(u[static_cast<std::size_t>(p)]);
      sum += table.value(alpha, beta);
    }
    out.entries[u] = sum / splits;
  }
  return out;
}

double kappa_theta(int degree, KappaForm form) {
  require(degree >= 2 && degree % 2 == 0, "kappa: degree must be even");
  const double half = factorial(degree / 2);
  const double mid = binomial(degree, degree / 2);
  return form == KappaForm::printed ? 0.25 * half * mid : 0.25 * half * mid * mid;
}

double kappa_chi2(const CoefficientFamily& c, int dof, int degree, KappaForm form) {
  require(degree >= 2 && degree % 2 == 0, "kappa_chi2: degree must be even");
  require(c.degree() == degree, "kappa_chi2: family degree must equal the level");
  for (int m = 1; m < degree; ++m)
    for (double v : c.values(m)) require(v == 0.0, "kappa_chi2: family must live on the top level only");
  require(dof >= 1, "kappa_chi2: degrees of freedom must be positive");

  const double fact = factorial(degree);
  const double top = level_norm(c, degree);
  const double target = form == KappaForm::printed ? dof : 2.0 * dof;
  const double mean_gap = target - fact * top * top;
  const double theta = kappa_theta(degree, form);

  const int half = degree / 2;
  const auto sym = symmetrize_contraction(contraction(c, c, half));
  double middle = 0.0;
  if (sym.is_dense) {
    middle = (theta * sym.dense - padded_level2(c, sym.support)).squaredNorm();
  } else {
    for (const auto& [u, v] : sym.entries) {
      const auto canon = canonicalize(u);
      const double cu = canon ? c.at(*canon) : 0.0;
      const double diff = theta * v - cu;
      middle += permutation_count(u) * diff * diff;
    }
    for (std::size_t e = 0; e < c.level_size(degree); ++e) {
      const auto k = c.key(degree, e);
      if (sym.entries.count(std::vector<int>(k.begin(), k.end())) == 0)
        middle += fact * c.value(degree, e) * c.value(degree, e);
    }
  }

  double others = 0.0;
  for (int r = 1; r < degree; ++r) {
    if (r == half) continue;
    const double weight = factorial(2 * degree - 2 * r) * std::pow(factorial(r - 1), 2) *
                          std::pow(binomial(degree - 1, r - 1), 4);
    others += weight * contraction(c, c, r).ordered_norm_sq();
  }

  return mean_gap * mean_gap + 4.0 * fact * middle + static_cast<double>(degree * degree) * others;
}

}  // namespace homsum
