#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "homsum/multi_index.hpp"

namespace homsum {

struct CoefficientEntry {
  MultiIndex indices;
  double value = 0.0;
};

/// Symmetric coefficients null on the diagonals, degree N, variables 1..J.
///
/// Only canonical (strictly increasing) keys are stored, grouped by level and
/// sorted lexicographically with flat key storage. Every sum that runs over
/// ordered tuples applies the factorial multiplicity explicitly.
class CoefficientFamily {
 public:
  CoefficientFamily() = default;
  CoefficientFamily(int degree, int support, std::vector<CoefficientEntry> entries = {});

  /// Level-2 family from a symmetric zero-diagonal matrix (row/column k is
  /// variable k+1). Entries with |value| <= drop_below are not stored.
  static CoefficientFamily from_dense(const Eigen::MatrixXd& matrix, double drop_below = 0.0);

  int degree() const { return degree_; }
  int support() const { return support_; }

  std::size_t level_size(int m) const;
  std::span<const int> key(int m, std::size_t e) const;
  double value(int m, std::size_t e) const;
  std::span<const double> values(int m) const;

  /// Stored value at a canonical key, 0 when absent.
  double at(std::span<const int> canonical_key) const;

  std::size_t entry_count() const;
  std::vector<CoefficientEntry> entries() const;

 private:
  struct Level {
    std::vector<int> keys;  // size() * order ints
    std::vector<double> values;
  };
  const Level& level(int m) const;

  int degree_ = 0;
  int support_ = 0;
  std::vector<Level> levels_;  // levels_[m - 1]
};

/// Value at any raw tuple: symmetric extension, 0 on repeated indices.
double eval_coeff(const CoefficientFamily& coeffs, std::span<const int> raw);
inline double eval_coeff(const CoefficientFamily& coeffs, std::initializer_list<int> raw) {
  return eval_coeff(coeffs, std::span<const int>(raw.begin(), raw.size()));
}

/// |c|_m: square root of the sum of c^2 over all ordered tuples of length m.
double level_norm(const CoefficientFamily& coeffs, int m);

/// delta_m: max over variables k of the ordered partial norm of level-m
/// entries containing k; delta_1 = max_k |c(k)|.
double influence(const CoefficientFamily& coeffs, int m);

double total_influence(const CoefficientFamily& coeffs, int degree);
double total_norm(const CoefficientFamily& coeffs, int degree);

struct CoeffStats {
  std::vector<double> influence;   // index m - 1
  std::vector<double> level_norm;  // index m - 1
  double total_influence = 0.0;
  double total_norm = 0.0;
};

CoeffStats coeff_stats(const CoefficientFamily& coeffs);

/// N_q(c, M) = (sum_{m=q}^{N} M^{m-q} m!/(m-q)! m! |c|_m^2)^{1/2}.
double nq_weight(const CoefficientFamily& coeffs, int q, double moment, int degree);

struct LiftedFamily {
  double constant = 0.0;       // c(j)
  CoefficientFamily family;    // degree N - 1
};

/// c_j(alpha) = (1 + |alpha|) c(alpha, j); the empty-alpha term is c(j).
LiftedFamily lift_cj(const CoefficientFamily& coeffs, int j);

/// Level-2 entries as a symmetric zero-diagonal J x J matrix.
Eigen::MatrixXd dense_level2(const CoefficientFamily& coeffs);

/// Level-1 entries as a length-J vector.
Eigen::VectorXd dense_level1(const CoefficientFamily& coeffs);

/// Elementwise sum of two families (degree and support are the maxima).
CoefficientFamily add(const CoefficientFamily& a, const CoefficientFamily& b);

/// Family with every value squared (same keys).
CoefficientFamily squared(const CoefficientFamily& coeffs);

}  // namespace homsum
