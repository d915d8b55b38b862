#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "homsum/bounds.hpp"
#include "homsum/coefficients.hpp"
#include "homsum/laws.hpp"
#include "homsum/series.hpp"

namespace homsum {

// ---- the singular kernel phi and its discretizations ----

/// phi(x, y) = pi + 2 ln((sqrt(1-x) + sqrt(1-y)) / |sqrt x - sqrt y|), symmetric; x, y in [0, 1].
double phi_closed(double x, double y);

/// int_0^1 dz / sqrt(|x - z| |y - z|), split at both singularities with z = s +- u^2 on each piece.
double phi_quadrature(double x, double y, double tol = 1e-12);

struct RiemannPhi {
  double sum = 0.0;
  double error_bound = 0.0;
};

/// (1/n) sum_{k != i, j} theta(k/n) with theta(z) = 1/sqrt(|x-z||y-z|), x = i/n, y = j/n,
/// and the bound 16 sqrt2 / (sqrt n sqrt(y - x)) + 8 / (n (x + y)).
RiemannPhi riemann_phi(int n, int i, int j);

/// a(i, j) = |i - j|^{-1/2} off the diagonal, 0 on it.
Eigen::MatrixXd interaction_matrix(int n);

/// c_n(i, j) = a(i, j) / sqrt(2 n ln n).
CoefficientFamily quad_clt_coeffs(int n);

/// cbar_n = (1/n) a (x)_1 a, diagonal included.
Eigen::MatrixXd abar_matrix(int n);
/// cbar'_n: cbar_n with the diagonal removed, as a degree-2 family.
CoefficientFamily abar_offdiag_coeffs(int n);

struct RowLogsum {
  std::vector<double> row_sums;  // sum_j a^2(i, j), i = 1..n-1
  std::vector<bool> pass;        // ln i + ln(n-i) <= row sum <= 2 + ln i + ln(n-i)
  bool all_pass = true;
};
RowLogsum row_logsum_check(int n);

/// c* = (1/16) int int_{|x - y| >= 1/4} phi^2, by nested adaptive quadrature (cached).
double c_star();

struct AbarFacts {
  int n = 0;
  double c_star = 0.0;
  double influence_sq = 0.0;         // delta_2^2(cbar'_n)
  double offdiag_norm_sq = 0.0;      // |cbar'_n|_2^2
  double full_norm_sq = 0.0;         // sum over all (i, j), diagonal included
  double diagonal_sq = 0.0;          // sum_k cbar_n(k, k)^2
  double contraction_sq = 0.0;       // sum_{i,j} (c_n (x)_1 c_n)(i, j)^2
  double contraction_lower = 0.0;    // c* / (4 ln^2 n)
  bool contraction_lower_pass = false;
  bool norm_lower_pass = false;      // |cbar'_n|_2^2 >= c*
  bool statement_proviso = false;    // n >= (32 sqrt2 / pi)^2
  bool proof_proviso = false;        // sqrt n >= 256 sqrt2 / pi
  // ratios for the inequalities with unspecified constants
  double influence_ratio = 0.0;      // delta_2^2 n / ln^2 n
  double diagonal_ratio = 0.0;       // sum_k cbar^2(k,k) n / ln^2 n
  double contraction_ratio = 0.0;    // sum (c (x)_1 c)^2 ln^2 n
  double norm_ratio = 0.0;           // |cbar'_n|_2^2
};
AbarFacts abar_facts(int n);

// ---- experiment results ----

struct ExperimentResult {
  std::string id;
  std::map<std::string, std::string> parameters;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::uint64_t> seeds;

  double at(std::size_t row, const std::string& column) const;
};

/// Writes <dir>/<id>.csv and <dir>/<id>_manifest.json; returns the file list.
std::vector<std::string> write_experiment(const ExperimentResult& result, const std::string& dir);

inline constexpr double kDefaultKdeDelta = 0.01;

struct QuadCltConfig {
  std::vector<int> n_list{64, 256, 1024};
  SplitLaw law = SplitLaw::normal();
  std::size_t draws = 100000;
  std::uint64_t seed = 42;
  double kde_delta = kDefaultKdeDelta;
  bool keep_samples = false;
};

/// Per n: sample variance vs 2|c_n|_2^2, Kolmogorov distance of S_n and of
/// S_n / sqrt2 to N(0,1), dk_lower and tv_kde of S_n / sqrt2 against a normal
/// reference sample, and template bound values.
ExperimentResult run_quadratic_clt(const QuadCltConfig& config, unsigned workers = 1,
                                   std::vector<std::vector<double>>* samples = nullptr);

/// m blocks of L variables, c(i, j) = 1/L inside a block.
CoefficientFamily chi2_target_coeffs(int blocks, int block_size);

/// A sample of sum_{k <= m} G_k^2 - m.
std::vector<double> centered_chi2_sample(int dof, std::size_t draws, std::uint64_t seed, unsigned workers = 1);

struct Chi2Config {
  int m = 2;
  std::vector<int> l_list{8, 16, 32, 64};
  SplitLaw law = SplitLaw::normal();
  std::size_t draws = 100000;
  std::uint64_t seed = 42;
};
ExperimentResult run_chi2(const Chi2Config& config, unsigned workers = 1);

struct VarianceSample {
  SeriesSample sample;             // direct evaluation sum_i (X_i^2 - E X_i^2)
  std::vector<double> decomposed;  // V' + V''
  double max_relative_gap = 0.0;   // max |direct - decomposed| / max(1, |direct|)
};

VarianceSample variance_estimator_sample(int n, const SplitLaw& law, std::size_t draws, std::uint64_t seed,
                                         unsigned workers = 1);

/// sum_{i != j} phi(mid_i, mid_j) dW_i dW_j on a uniform grid, dW ~ N(0, 1/grid_n).
std::vector<double> i2_phi_reference(int grid_n, std::size_t draws, std::uint64_t seed, unsigned workers = 1);
/// The coefficient family behind i2_phi_reference (phi(mid_i, mid_j) / grid_n).
CoefficientFamily i2_phi_coeffs(int grid_n);

struct VarianceConfig {
  std::vector<int> n_list{64, 256, 1024};
  SplitLaw law = SplitLaw::normal();
  std::size_t draws = 100000;
  std::uint64_t seed = 42;
  int reference_grid = 512;
  double kde_delta = kDefaultKdeDelta;
};
ExperimentResult run_variance_experiment(const VarianceConfig& config, unsigned workers = 1,
                                         std::vector<double>* reference_out = nullptr);

// ---- JSON configs ----

struct ExperimentConfig {
  std::string experiment;  // quad_clt | chi2 | variance
  std::vector<int> n_list;
  std::vector<int> l_list;
  int m = 2;
  SplitLaw law = SplitLaw::normal();
  std::size_t draws = 100000;
  std::uint64_t seed = 42;
  std::string output_dir = ".";
  int reference_grid = 512;
  double kde_delta = kDefaultKdeDelta;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned workers = 1);

}  // namespace homsum
