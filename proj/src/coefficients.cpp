#include "homsum/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "homsum/combinatorics.hpp"
#include "homsum/error.hpp"

namespace homsum {

namespace {

bool key_less(std::span<const int> a, std::span<const int> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

CoefficientFamily::CoefficientFamily(int degree, int support, std::vector<CoefficientEntry> entries)
    : degree_(degree), support_(support), levels_(static_cast<std::size_t>(std::max(degree, 0))) {
  require(degree >= 0 && degree <= kMaxFactorial, "coefficient family: degree out of range");
  require(support >= 0, "coefficient family: negative support");
  std::vector<std::vector<const CoefficientEntry*>> by_level(levels_.size());
  for (const auto& e : entries) {
    const int m = static_cast<int>(e.indices.size());
    require(m >= 1 && m <= degree, "coefficient family: key length outside 1..degree");
    require(is_canonical(e.indices), "coefficient family: key is not strictly increasing");
    require(e.indices.back() <= support, "coefficient family: index exceeds support");
    by_level[static_cast<std::size_t>(m - 1)].push_back(&e);
  }
  for (std::size_t l = 0; l < by_level.size(); ++l) {
    auto& list = by_level[l];
    std::sort(list.begin(), list.end(),
              [](const CoefficientEntry* a, const CoefficientEntry* b) { return key_less(a->indices, b->indices); });
    for (std::size_t i = 1; i < list.size(); ++i)
      require(list[i]->indices != list[i - 1]->indices, "coefficient family: duplicate key");
    Level& out = levels_[l];
    out.keys.reserve(list.size() * (l + 1));
    out.values.reserve(list.size());
    for (const auto* e : list) {
      out.keys.insert(out.keys.end(), e->indices.begin(), e->indices.end());
      out.values.push_back(e->value);
    }
  }
}

CoefficientFamily CoefficientFamily::from_dense(const Eigen::MatrixXd& matrix, double drop_below) {
  require(matrix.rows() == matrix.cols(), "dense coefficients: matrix must be square");
  const auto n = static_cast<int>(matrix.rows());
  CoefficientFamily out;
  out.degree_ = 2;
  out.support_ = n;
  out.levels_.resize(2);
  Level& level = out.levels_[1];
  for (int i = 0; i < n; ++i) {
    require(matrix(i, i) == 0.0, "dense coefficients: diagonal must be zero");
    for (int j = i + 1; j < n; ++j) {
      const double v = matrix(i, j);
      require(std::abs(v - matrix(j, i)) <= 1e-12, "dense coefficients: matrix is not symmetric");
      if (std::abs(v) <= drop_below) continue;
      level.keys.push_back(i + 1);
      level.keys.push_back(j + 1);
      level.values.push_back(v);
    }
  }
  return out;
}

const CoefficientFamily::Level& CoefficientFamily::level(int m) const {
  require(m >= 1 && m <= degree_, "level out of range");
  return levels_[static_cast<std::size_t>(m - 1)];
}

std::size_t CoefficientFamily::level_size(int m) const { return level(m).values.size(); }

std::span<const int> CoefficientFamily::key(int m, std::size_t e) const {
  const auto& keys = level(m).keys;
  return std::span<const int>(keys).subspan(e * static_cast<std::size_t>(m), static_cast<std::size_t>(m));
}

double CoefficientFamily::value(int m, std::size_t e) const { return level(m).values[e]; }

std::span<const double> CoefficientFamily::values(int m) const { return level(m).values; }

double CoefficientFamily::at(std::span<const int> canonical_key) const {
  const int m = static_cast<int>(canonical_key.size());
  if (m < 1 || m > degree_) return 0.0;
  const Level& lv = levels_[static_cast<std::size_t>(m - 1)];
  std::size_t lo = 0;
  std::size_t hi = lv.values.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (key_less(key(m, mid), canonical_key)) lo = mid + 1;
    else hi = mid;
  }
  if (lo < lv.values.size()) {
    const auto k = key(m, lo);
    if (std::equal(k.begin(), k.end(), canonical_key.begin(), canonical_key.end())) return lv.values[lo];
  }
  return 0.0;
}

std::size_t CoefficientFamily::entry_count() const {
  std::size_t total = 0;
  for (const auto& lv : levels_) total += lv.values.size();
  return total;
}

std::vector<CoefficientEntry> CoefficientFamily::entries() const {
  std::vector<CoefficientEntry> out;
  out.reserve(entry_count());
  for (int m = 1; m <= degree_; ++m)
    for (std::size_t e = 0; e < level_size(m); ++e) {
      const auto k = key(m, e);
      out.push_back({MultiIndex(k.begin(), k.end()), value(m, e)});
    }
  return out;
}

double eval_coeff(const CoefficientFamily& c, std::span<const int> raw) {
  const auto canon = canonicalize(raw);
  if (!canon) return 0.0;
  return c.at(*canon);
}

double level_norm(const CoefficientFamily& c, int m) {
  require(m >= 1 && m <= c.degree(), "level_norm: level out of range");
  double sum = 0.0;
  for (double v : c.values(m)) sum += v * v;
  return std::sqrt(factorial(m) * sum);
}

double influence(const CoefficientFamily& c, int m) {
  require(m >= 1 && m <= c.degree(), "influence: level out of range");
  if (m == 1) {
    double best = 0.0;
    for (double v : c.values(1)) best = std::max(best, std::abs(v));
    return best;
  }
  std::vector<double> partial(static_cast<std::size_t>(c.support()) + 1, 0.0);
  for (std::size_t e = 0; e < c.level_size(m); ++e) {
    const double sq = c.value(m, e) * c.value(m, e);
    for (int k : c.key(m, e)) partial[static_cast<std::size_t>(k)] += sq;
  }
  const double best = partial.empty() ? 0.0 : *std::max_element(partial.begin(), partial.end());
  return std::sqrt(factorial(m - 1) * best);
}

double total_influence(const CoefficientFamily& c, int degree) {
  require(degree >= 0 && degree <= c.degree(), "total_influence: degree out of range");
  double sum = 0.0;
  for (int m = 1; m <= degree; ++m) sum += influence(c, m);
  return sum;
}

double total_norm(const CoefficientFamily& c, int degree) {
  require(degree >= 0 && degree <= c.degree(), "total_norm: degree out of range");
  double sum = 0.0;
  for (int m = 1; m <= degree; ++m) {
    const double v = level_norm(c, m);
    sum += v * v;
  }
  return std::sqrt(sum);
}

CoeffStats coeff_stats(const CoefficientFamily& c) {
  CoeffStats s;
  for (int m = 1; m <= c.degree(); ++m) {
    s.influence.push_back(influence(c, m));
    s.level_norm.push_back(level_norm(c, m));
  }
  s.total_influence = std::accumulate(s.influence.begin(), s.influence.end(), 0.0);
  double sq = 0.0;
  for (double v : s.level_norm) sq += v * v;
  s.total_norm = std::sqrt(sq);
  return s;
}

double nq_weight(const CoefficientFamily& c, int q, double moment, int degree) {
  require(degree >= 1 && degree <= c.degree(), "nq_weight: degree out of range");
  require(q >= 1 && q <= degree, "nq_weight: order out of range");
  require(moment >= 1.0, "nq_weight: moment bound must be >= 1");
  double sum = 0.0;
  for (int m = q; m <= degree; ++m) {
    const double norm = level_norm(c, m);
    sum += std::pow(moment, m - q) * (factorial(m) / factorial(m - q)) * factorial(m) * norm * norm;
  }
  return std::sqrt(sum);
}

LiftedFamily lift_cj(const CoefficientFamily& c, int j) {
  require(j >= 1 && j <= c.support(), "lift_cj: variable index out of range");
  LiftedFamily out;
  std::vector<CoefficientEntry> lifted;
  for (int m = 1; m <= c.degree(); ++m) {
    for (std::size_t e = 0; e < c.level_size(m); ++e) {
      const auto k = c.key(m, e);
      if (!std::binary_search(k.begin(), k.end(), j)) continue;
      if (m == 1) {
        out.constant = c.value(m, e);
        continue;
      }
      CoefficientEntry entry;
      entry.indices.reserve(static_cast<std::size_t>(m - 1));
      for (int idx : k)
        if (idx != j) entry.indices.push_back(idx);
      entry.value = static_cast<double>(m) * c.value(m, e);
      lifted.push_back(std::move(entry));
    }
  }
  out.family = CoefficientFamily(c.degree() - 1, c.support(), std::move(lifted));
  return out;
}

Eigen::MatrixXd dense_level2(const CoefficientFamily& c) {
  const auto n = static_cast<Eigen::Index>(c.support());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  if (c.degree() < 2) return out;
  for (std::size_t e = 0; e < c.level_size(2); ++e) {
    const auto k = c.key(2, e);
    out(k[0] - 1, k[1] - 1) = c.value(2, e);
    out(k[1] - 1, k[0] - 1) = c.value(2, e);
  }
  return out;
}

Eigen::VectorXd dense_level1(const CoefficientFamily& c) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(c.support());
  if (c.degree() < 1) return out;
  for (std::size_t e = 0; e < c.level_size(1); ++e) out(c.key(1, e)[0] - 1) = c.value(1, e);
  return out;
}

CoefficientFamily add(const CoefficientFamily& a, const CoefficientFamily& b) {
  std::map<MultiIndex, double> merged;
  for (const auto& e : a.entries()) merged[e.indices] += e.value;
  for (const auto& e : b.entries()) merged[e.indices] += e.value;
  std::vector<CoefficientEntry> out;
  out.reserve(merged.size());
  for (auto& [k, v] : merged) out.push_back({k, v});
  return CoefficientFamily(std::max(a.degree(), b.degree()), std::max(a.support(), b.support()), std::move(out));
}

CoefficientFamily squared(const CoefficientFamily& c) {
  auto entries = c.entries();
  for (auto& e : entries) e.value *= e.value;
  return CoefficientFamily(c.degree(), c.support(), std::move(entries));
}

}  // namespace homsum
