#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homsum/rng.hpp"

namespace homsum {

/// Proposals allowed per accepted draw in every rejection sampler.
inline constexpr std::size_t kRejectionBudget = 1'000'000;

enum class LawKind { normal, uniform, gauss_mixture, rademacher };

std::string to_string(LawKind kind);

/// Raw two-component mixture; the law re-centres and rescales it to unit variance.
struct MixtureParams {
  double weight = 0.5;  // weight of the first component
  double mean1 = -1.0;
  double mean2 = 1.0;
  double sd1 = 0.75;
  double sd2 = 0.75;
};

struct SplitDraw {
  bool chi = false;
  double value = 0.0;
};

/// A centered unit-variance law together with its splitting data: the bump
/// centre z_k, radius r and mass epsilon, so that
/// p_Z(z) >= epsilon * psi_r(|z - z_k|^2) and Z = chi U + (1 - chi) V.
class SplitLaw {
 public:
  static SplitLaw normal(double center = 0.0, double r = 0.25, double epsilon = 0.2);
  static SplitLaw uniform(double center = 0.0, double r = 0.25, double epsilon = 0.2);
  static SplitLaw gauss_mixture(const MixtureParams& params = {}, double center = 0.0, double r = 0.25,
                                double epsilon = 0.2);
  /// Discrete +-1 law; it has no density and never passes validation.
  static SplitLaw rademacher(double center = 0.0, double r = 0.25, double epsilon = 0.2);

  LawKind kind() const { return kind_; }
  double center() const { return center_; }
  double radius() const { return r_; }
  double epsilon() const { return epsilon_; }
  const MixtureParams& mixture() const { return mixture_; }

  bool has_density() const { return kind_ != LawKind::rademacher; }
  double density(double z) const;

  /// P(chi = 1) = epsilon * m(r).
  double bernoulli_p() const { return bernoulli_p_; }

  int moment_p_max() const { return moment_p_max_; }
  /// User-supplied bounds M_p for p = 1..moment_p_max (index p - 1); empty if none.
  const std::vector<double>& moment_bounds() const { return moment_bounds_; }
  SplitLaw with_moment_bounds(std::vector<double> bounds, int p_max = 8) const;

  /// The bound M_p used by bound formulas: the supplied value, else ||Z||_p.
  double moment_bound(int p) const;
  /// ||Z||_p = (E|Z|^p)^{1/p}.
  double moment_norm(int p) const;

  /// Lower/upper end of the support (infinite for Gaussian-based laws).
  double support_lo() const;
  double support_hi() const;

  double sample_direct(RngStream& rng) const;
  SplitDraw sample_split(RngStream& rng) const;

  /// Stable identity used in metadata hashes.
  std::string describe() const;

 private:
  SplitLaw(LawKind kind, double center, double r, double epsilon);

  double sample_u(RngStream& rng) const;
  double sample_v(RngStream& rng) const;

  LawKind kind_ = LawKind::normal;
  double center_ = 0.0;
  double r_ = 0.25;
  double epsilon_ = 0.2;
  double bernoulli_p_ = 0.0;
  MixtureParams mixture_{};
  double mix_shift_ = 0.0;  // raw mixture mean
  double mix_scale_ = 1.0;  // raw mixture standard deviation
  int moment_p_max_ = 8;
  std::vector<double> moment_bounds_;
};

struct MembershipReport {
  bool has_density = false;
  bool normalized = false;
  bool centered = false;
  bool unit_variance = false;
  bool moments_checked = false;
  bool moments_ok = true;
  bool lower_bound_ok = false;
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> moment_norms;  // ||Z||_p, p = 1..p_max
  double min_gap = 0.0;              // min over the grid of p_Z - epsilon psi_r
  double epsilon_threshold = 0.0;    // largest epsilon passing the grid check
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

inline constexpr std::size_t kValidationGridPoints = 10'000;
inline constexpr double kValidationQuadTol = 1e-8;

MembershipReport validate_membership(const SplitLaw& law);

/// Per-variable law assignment for variables 1..support.
class LawFamily {
 public:
  LawFamily(const SplitLaw& law, int support);
  explicit LawFamily(std::vector<SplitLaw> per_variable);

  int support() const { return static_cast<int>(laws_.size()); }
  const SplitLaw& law(int variable) const { return laws_.at(static_cast<std::size_t>(variable - 1)); }
  std::string describe() const;

 private:
  std::vector<SplitLaw> laws_;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ChiMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// draws x support matrix; entry (i, k - 1) comes from the stream (seed, k, first_draw + i).
struct SampleBatch {
  RowMatrix values;
  ChiMatrix chi;  // empty unless split sampling was requested
  bool split = false;
};

/// Draws rows first_draw .. first_draw + count - 1 (no threading).
void fill_rows(const LawFamily& family, std::uint64_t seed, std::uint64_t first_draw, std::size_t count, bool split,
               double* values, std::uint8_t* chi);

SampleBatch sample_batch(const LawFamily& family, std::size_t draws, std::uint64_t seed, bool split = false,
                         unsigned workers = 1);

/// JSON layout: {"kind": ..., "z_k", "r", "epsilon", "moment_p_max", "moment_bounds"?,
/// mixture fields "weight", "mean1", "mean2", "sd1", "sd2"}.
SplitLaw parse_law_config(const std::string& json_text);
std::string law_to_json(const SplitLaw& law);
std::string membership_to_json(const MembershipReport& report);

}  // namespace homsum
