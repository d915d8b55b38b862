#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homsum/coefficients.hpp"
#include "homsum/laws.hpp"
#include "homsum/summary.hpp"

namespace homsum {

/// S_N(c, z) = sum_{m <= N} m! sum_{canonical alpha, |alpha| = m} c(alpha) z^alpha.
/// z[k - 1] is the value of variable k; z may be longer than the support.
double eval_series(const CoefficientFamily& coeffs, std::span<const double> point, int degree);

/// Phi_m(c, z): the level-m part of the series.
double eval_level(const CoefficientFamily& coeffs, std::span<const double> point, int m);

/// d/dz_j S_N(c, z) = c(j) + S_{N-1}(c_j, z).
double partial_derivative(const CoefficientFamily& coeffs, std::span<const double> point, int j, int degree);

/// All partial derivatives j = 1..support(c) in one pass over the entries.
std::vector<double> gradient(const CoefficientFamily& coeffs, std::span<const double> point, int degree);

/// lambda_N = sum_j chi_j (d/dz_j S_N)^2, j running over the support of c.
double covariance_lambda(const CoefficientFamily& coeffs, std::span<const double> point, std::span<const std::uint8_t> chi,
                         int degree);

/// Degree <= 2 kernel: S = b.z + z'Cz with b the level-1 vector and C the
/// symmetric zero-diagonal level-2 matrix, gradient b + 2Cz.
class DenseQuadratic {
 public:
  DenseQuadratic(const CoefficientFamily& coeffs, int degree);
  int support() const { return static_cast<int>(linear_.size()); }
  double eval(std::span<const double> point) const;
  /// Rows of `block` are draws; fills values and, if chi is given, lambda.
  void eval_block(const RowMatrix& block, const ChiMatrix* chi, double* values, double* lambda) const;

 private:
  Eigen::VectorXd linear_;
  Eigen::MatrixXd quadratic_;
};

struct SeriesMeta {
  std::uint64_t coefficient_hash = 0;
  std::uint64_t law_hash = 0;
  std::string law;
  std::uint64_t seed = 0;
  std::size_t draws = 0;
  int degree = 0;
  bool with_lambda = false;
};

struct SeriesSample {
  std::vector<double> values;
  std::optional<std::vector<double>> lambda;
  SeriesMeta meta;
};

/// Draws are processed in fixed chunks; draw i of variable k always uses the
/// stream (seed, k, i), so the output is identical for every worker count.
/// Split sampling (needed for lambda) is used only when with_lambda is set.
SeriesSample mc_series(const CoefficientFamily& coeffs, const LawFamily& family, int degree, std::size_t draws,
                       std::uint64_t seed, bool with_lambda = false, unsigned workers = 1);

struct SmallBallEstimate {
  double eta = 0.0;
  std::size_t hits = 0;
  std::size_t draws = 0;
  BinomialInterval interval;
};

/// Fraction of lambda values <= eta with a Wilson 95% interval.
SmallBallEstimate small_ball_from_lambda(std::span<const double> lambda, double eta);

SmallBallEstimate mc_small_ball(const CoefficientFamily& coeffs, const LawFamily& family, int degree, double eta,
                                std::size_t draws, std::uint64_t seed, unsigned workers = 1);

inline constexpr std::size_t kSeriesChunk = 256;

/// CSV with header "value" or "value,lambda" (%.17g, LF) plus a JSON sidecar at
/// csv_path + ".json" carrying schema_version, seed and the hashes.
void write_series_csv(const SeriesSample& sample, const std::string& csv_path);
std::string series_meta_json(const SeriesMeta& meta);

}  // namespace homsum
