#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "homsum/coefficients.hpp"
#include "homsum/contraction.hpp"
#include "homsum/summary.hpp"

namespace homsum {

/// Constants that the theory proves to exist but never pins down. Every
/// template bound takes them as inputs; defaults are all 1.
struct UniversalConstants {
  double p_star = 1.0;
  double scale = 1.0;  // the leading C
  int q1 = 1;
  int q2 = 1;
  int q3 = 1;
  int q4 = 1;
  int moment_order = 1;  // the p in M_p
  bool assumed = true;   // false once loaded from a user file
};

UniversalConstants parse_constants_json(const std::string& text);
std::string constants_to_json(const UniversalConstants& consts);

struct BoundReport {
  std::string name;
  std::map<std::string, double> inputs;
  double value = 0.0;
  std::map<std::string, bool> flags;
};

std::string bound_reports_to_json(const std::vector<BoundReport>& reports);

/// c_N(r, eps) = (eps sqrt(r) / sqrt 2)^{2N} / N.
double c_small(int degree, double r, double epsilon);

/// C_N(r, eps) = C (N!)^{q1} e^{q2 M_p} r^{-q3} eps^{-q4}.
double c_big(int degree, double r, double epsilon, const UniversalConstants& consts, double moment_bound = 1.0);

/// K_1(m) = max{sqrt(pi/m), 1/(2m) + 1/(2m^2)}.
double k1_constant(int dof);

/// ((N+1)!)^2 M3^{4N} ||f'''|| ||c||_N deltabar_N(c).
BoundReport smooth_invariance_bound(const CoefficientFamily& coeffs, int degree, double m3, double f3norm);

/// Largest admissible x: (p/4)^{2N} ||c||_N^2.
double hoeffding_threshold(const CoefficientFamily& coeffs, int degree, double p_chi);

/// (2e^3/9) N exp(-x^2 / (N deltabar_N(c)^2 ||c||_N^2)), an upper bound for
/// P(S_N(c^2, chi) <= x) when x is below the threshold. The flag
/// "threshold_satisfied" records whether it is.
BoundReport hoeffding_tail(const CoefficientFamily& coeffs, int degree, double x, double p_chi);

/// S_N(c^2, chi) = sum_m m! sum_{canonical alpha} c(alpha)^2 chi^alpha.
double squared_series(const CoefficientFamily& coeffs, std::span<const std::uint8_t> chi, int degree);

/// Monte Carlo estimate of P(S_N(c^2, chi) <= x) with chi_j i.i.d. Bernoulli(p_chi);
/// chi_j of draw i comes from the stream (seed, j, i).
BinomialInterval mc_squared_series_tail(const CoefficientFamily& coeffs, int degree, double x, double p_chi,
                                        std::size_t draws, std::uint64_t seed, unsigned workers = 1);

/// C_N (  (eta/|c|_N^2)^{1/N} + exp(-c_N |c|_N^2 / delta_N(c)^2) ).
BoundReport cw_tail_template(const CoefficientFamily& coeffs, int degree, double eta, const UniversalConstants& consts,
                             double r, double epsilon, double moment_bound = 1.0);

/// C_{N+1} (1 + ||c||_N) ( deltabar^{1/(4+3p*N)} / |c|_N^{6p*/(4+3p*N)} + exp(-c_N |c|_N^2 / deltabar^2) ).
BoundReport tv_invariance_template(const CoefficientFamily& coeffs, int degree, const UniversalConstants& consts, double r,
                                   double epsilon, double moment_bound = 1.0);

/// K_1(m) kappa_{m,N}(c)^{1/2}.
BoundReport chi2_bound(const CoefficientFamily& coeffs, int degree, int dof, KappaForm form = KappaForm::printed);

struct SmoothingInputs {
  double dk = 0.0;            // estimate of d_k between the two series
  double small_ball_c = 0.0;  // P(lambda_N < eta)
  double small_ball_cbar = 0.0;
};

/// C_{N v M} (1 + ||c||_N + ||cbar||_M) (eta^{-k p*/(k+1)} d_k^{1/(k+1)} + P(lambda_N < eta) + P(lambdabar_M < eta)).
BoundReport dk_to_d0_template(const CoefficientFamily& coeffs, const CoefficientFamily& other_coeffs, int degree, int degree_bar,
                              int k, double eta, const SmoothingInputs& inputs, const UniversalConstants& consts,
                              double r, double epsilon, double moment_bound = 1.0);

/// The eta-optimized form: small-ball terms replaced by their Carbery-Wright type tails.
BoundReport dk_to_d0_optimized(const CoefficientFamily& coeffs, const CoefficientFamily& other_coeffs, int degree, int degree_bar,
                               int k, double dk, const UniversalConstants& consts, double r, double epsilon,
                               double moment_bound = 1.0);

/// Distance to a limit X of S_M(c_n, .) given limsup ||c_n||_M and liminf |c_n|_M.
BoundReport limit_distance_template(const CoefficientFamily& coeffs, int degree, int limit_degree, double d1,
                                    double limsup_total_norm, double liminf_top_norm,
                                    const UniversalConstants& consts, double r, double epsilon,
                                    double moment_bound = 1.0);

}  // namespace homsum
