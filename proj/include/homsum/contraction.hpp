#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <vector>

#include "homsum/coefficients.hpp"

namespace homsum {

/// Largest support for which contractions outside the dense degree-2 path
/// are attempted; the pair tables grow combinatorially beyond this.
inline constexpr int kSparseContractionMaxSupport = 64;

/// T(alpha, beta) = sum over ordered gamma of length r of c(alpha, gamma) d(beta, gamma),
/// for alpha, beta of length N - r.
///
/// Three layouts: a scalar when r = N; a dense J x J matrix when N = 2 and
/// r = 1; otherwise a sparse map keyed by sorted alpha followed by sorted beta.
/// A symmetrized table is keyed by the sorted multiset of all 2(N - r) indices.
struct ContractionTable {
  int degree = 0;
  int order = 0;
  int support = 0;
  bool symmetric = false;

  bool is_scalar = false;
  double scalar = 0.0;

  bool is_dense = false;
  Eigen::MatrixXd dense;  // row/column k is variable k + 1

  std::map<std::vector<int>, double> entries;

  int arity() const { return degree - order; }

  /// Value at ordered tuples (alpha, beta), each of length N - r.
  double value(std::span<const int> alpha, std::span<const int> beta) const;

  /// Sum of T^2 over all ordered (alpha, beta).
  double ordered_norm_sq() const;
};

ContractionTable contraction(const CoefficientFamily& coeffs, const CoefficientFamily& other, int order);

/// Average of T over all permutations of its 2(N - r) arguments.
ContractionTable symmetrize_contraction(const ContractionTable& table);

enum class KappaForm {
  /// (m - N!|c|_N^2)^2 + ... with theta_N = (N/2)! binom(N, N/2) / 4.
  printed,
  /// (2m - N!|c|_N^2)^2 + ... with theta_N = (N/2)! binom(N, N/2)^2 / 4.
  /// For N = 2 this is the Gamma-calculus functional of the target
  /// F(m) = sum G_k^2 - m, whose variance is 2m.
  variance_matched,
};

double kappa_theta(int degree, KappaForm form = KappaForm::printed);

/// Fourth-cumulant functional kappa_{m,N}(c) for the centered chi-squared
/// target with m degrees of freedom. c must live on level N only, N even.
double kappa_chi2(const CoefficientFamily& coeffs, int dof, int degree, KappaForm form = KappaForm::printed);

}  // namespace homsum
