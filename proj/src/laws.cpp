#include "homsum/laws.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <sstream>

#include "homsum/bump.hpp"
#include "homsum/error.hpp"
#include "homsum/parallel.hpp"
#include "homsum/quadrature.hpp"

namespace homsum {

namespace {

const double kUniformHalfWidth = std::sqrt(3.0);

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// Marsaglia polar method; the second variate of each accepted pair is discarded
// so that every draw is a function of its own stream only.
double polar_normal(RngStream& rng) {
  for (std::size_t attempt = 0; attempt < kRejectionBudget; ++attempt) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
  throw NumericError("normal sampler: rejection budget exhausted");
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string to_string(LawKind kind) {
  switch (kind) {
    case LawKind::normal: return "normal";
    case LawKind::uniform: return "uniform";
    case LawKind::gauss_mixture: return "gauss_mixture";
    case LawKind::rademacher: return "rademacher";
  }
  return "unknown";
}

SplitLaw::SplitLaw(LawKind kind, double center, double r, double epsilon)
    : kind_(kind), center_(center), r_(r), epsilon_(epsilon) {
  require(r > 0.0 && r < 1.0, "split law: r must lie in (0, 1)");
  require(epsilon > 0.0 && epsilon < 1.0, "split law: epsilon must lie in (0, 1)");
  require(std::isfinite(center), "split law: centre must be finite");
  bernoulli_p_ = epsilon * mass_m(r);
  require(bernoulli_p_ < 1.0, "split law: epsilon * m(r) must be below 1");
}

SplitLaw SplitLaw::normal(double center, double r, double epsilon) {
  return SplitLaw(LawKind::normal, center, r, epsilon);
}

SplitLaw SplitLaw::uniform(double center, double r, double epsilon) {
  return SplitLaw(LawKind::uniform, center, r, epsilon);
}

SplitLaw SplitLaw::gauss_mixture(const MixtureParams& params, double center, double r, double epsilon) {
  require(params.weight > 0.0 && params.weight < 1.0, "gauss_mixture: weight must lie in (0, 1)");
  require(params.sd1 > 0.0 && params.sd2 > 0.0, "gauss_mixture: standard deviations must be positive");
  SplitLaw law(LawKind::gauss_mixture, center, r, epsilon);
  law.mixture_ = params;
  const double w = params.weight;
  law.mix_shift_ = w * params.mean1 + (1.0 - w) * params.mean2;
  const double second = w * (params.sd1 * params.sd1 + params.mean1 * params.mean1) +
                        (1.0 - w) * (params.sd2 * params.sd2 + params.mean2 * params.mean2);
  law.mix_scale_ = std::sqrt(second - law.mix_shift_ * law.mix_shift_);
  return law;
}

SplitLaw SplitLaw::rademacher(double center, double r, double epsilon) {
  return SplitLaw(LawKind::rademacher, center, r, epsilon);
}

SplitLaw SplitLaw::with_moment_bounds(std::vector<double> bounds, int p_max) const {
  require(p_max >= 1, "moment bounds: p_max must be positive");
  require(bounds.empty() || static_cast<int>(bounds.size()) == p_max, "moment bounds: need one bound per p");
  SplitLaw out = *this;
  out.moment_p_max_ = p_max;
  out.moment_bounds_ = std::move(bounds);
  return out;
}

double SplitLaw::density(double z) const {
  switch (kind_) {
    case LawKind::normal: return normal_pdf(z);
    case LawKind::uniform: return std::abs(z) <= kUniformHalfWidth ? 0.5 / kUniformHalfWidth : 0.0;
    case LawKind::gauss_mixture: {
      const double x = mix_shift_ + mix_scale_ * z;
      const auto& p = mixture_;
      const double raw = p.weight * normal_pdf((x - p.mean1) / p.sd1) / p.sd1 +
                         (1.0 - p.weight) * normal_pdf((x - p.mean2) / p.sd2) / p.sd2;
      return mix_scale_ * raw;
    }
    case LawKind::rademacher: break;
  }
  throw ArgumentError("rademacher law has no density");
}

double SplitLaw::support_lo() const {
  if (kind_ == LawKind::uniform) return -kUniformHalfWidth;
  if (kind_ == LawKind::rademacher) return -1.0;
  return -std::numeric_limits<double>::infinity();
}

double SplitLaw::support_hi() const { return -support_lo(); }

double SplitLaw::moment_norm(int p) const {
  require(p >= 1, "moment_norm: order must be positive");
  if (kind_ == LawKind::rademacher) return 1.0;
  const double lo = std::max(support_lo(), -40.0);
  const double hi = std::min(support_hi(), 40.0);
  std::vector<double> points{lo};
  for (double b : {-10.0, -3.0, 0.0, 3.0, 10.0})
    if (b > lo && b < hi) points.push_back(b);
  points.push_back(hi);
  const double value =
      integrate([this, p](double z) { return std::pow(std::abs(z), p) * density(z); }, points, {1e-13, 1e-12, 20});
  return std::pow(value, 1.0 / p);
}

double SplitLaw::moment_bound(int p) const {
  require(p >= 1, "moment_bound: order must be positive");
  if (!moment_bounds_.empty() && p <= moment_p_max_) return moment_bounds_[static_cast<std::size_t>(p - 1)];
  return moment_norm(p);
}

double SplitLaw::sample_direct(RngStream& rng) const {
  switch (kind_) {
    case LawKind::normal: return polar_normal(rng);
    case LawKind::uniform: return kUniformHalfWidth * (2.0 * rng.uniform() - 1.0);
    case LawKind::gauss_mixture: {
      const auto& p = mixture_;
      const bool first = rng.uniform() < p.weight;
      const double x = first ? p.mean1 + p.sd1 * polar_normal(rng) : p.mean2 + p.sd2 * polar_normal(rng);
      return (x - mix_shift_) / mix_scale_;
    }
    case LawKind::rademacher: return rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  return 0.0;
}

double SplitLaw::sample_u(RngStream& rng) const {
  const double half = std::sqrt(2.0 * r_);
  for (std::size_t attempt = 0; attempt < kRejectionBudget; ++attempt) {
    const double offset = half * (2.0 * rng.uniform() - 1.0);
    if (rng.uniform() < psi_r(r_, offset * offset)) return center_ + offset;
  }
  throw NumericError("bump sampler: rejection budget exhausted");
}

double SplitLaw::sample_v(RngStream& rng) const {
  for (std::size_t attempt = 0; attempt < kRejectionBudget; ++attempt) {
    const double z = sample_direct(rng);
    const double d = z - center_;
    const double accept = 1.0 - epsilon_ * psi_r(r_, d * d) / density(z);
    if (rng.uniform() < accept) return z;
  }
  throw NumericError("remainder sampler: rejection budget exhausted");
}

SplitDraw SplitLaw::sample_split(RngStream& rng) const {
  require(has_density(), "split sampling needs a law with a density");
  SplitDraw out;
  out.chi = rng.bernoulli(bernoulli_p_);
  out.value = out.chi ? sample_u(rng) : sample_v(rng);
  return out;
}

std::string SplitLaw::describe() const {
  std::ostringstream out;
  out << to_string(kind_) << "(z_k=" << format_double(center_) << ",r=" << format_double(r_)
      << ",epsilon=" << format_double(epsilon_);
  if (kind_ == LawKind::gauss_mixture) {
    const auto& p = mixture_;
    out << ",weight=" << format_double(p.weight) << ",mean1=" << format_double(p.mean1)
        << ",mean2=" << format_double(p.mean2) << ",sd1=" << format_double(p.sd1) << ",sd2=" << format_double(p.sd2);
  }
  out << ")";
  return out.str();
}

MembershipReport validate_membership(const SplitLaw& law) {
  MembershipReport rep;
  rep.has_density = law.has_density();
  if (!rep.has_density) {
    rep.failures.push_back("law has no density");
    return rep;
  }
  const double lo = std::max(law.support_lo(), -40.0);
  const double hi = std::min(law.support_hi(), 40.0);
  const double half = std::sqrt(2.0 * law.radius());
  std::vector<double> points{lo};
  for (double b : {law.center() - half, law.center() - std::sqrt(law.radius()), law.center(),
                   law.center() + std::sqrt(law.radius()), law.center() + half})
    if (b > lo && b < hi) points.push_back(b);
  points.push_back(hi);
  const QuadratureOptions opts{1e-12, 1e-12, 20};
  auto moment = [&](int p) {
    return integrate([&law, p](double z) { return std::pow(z, p) * law.density(z); }, points, opts);
  };
  rep.mass = moment(0);
  rep.mean = moment(1);
  rep.variance = moment(2) - rep.mean * rep.mean;
  rep.normalized = std::abs(rep.mass - 1.0) <= kValidationQuadTol;
  rep.centered = std::abs(rep.mean) <= kValidationQuadTol;
  rep.unit_variance = std::abs(rep.variance - 1.0) <= kValidationQuadTol;
  if (!rep.normalized) rep.failures.push_back("density does not integrate to 1");
  if (!rep.centered) rep.failures.push_back("law is not centered");
  if (!rep.unit_variance) rep.failures.push_back("law does not have unit variance");

  for (int p = 1; p <= law.moment_p_max(); ++p) rep.moment_norms.push_back(law.moment_norm(p));
  rep.moments_checked = !law.moment_bounds().empty();
  if (rep.moments_checked) {
    for (std::size_t i = 0; i < rep.moment_norms.size(); ++i)
      if (rep.moment_norms[i] > law.moment_bounds()[i] * (1.0 + 1e-12)) rep.moments_ok = false;
    if (!rep.moments_ok) rep.failures.push_back("moment bound exceeded");
  }

  rep.min_gap = std::numeric_limits<double>::infinity();
  rep.epsilon_threshold = std::numeric_limits<double>::infinity();
  const std::size_t n = kValidationGridPoints;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = law.center() - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
    const double d = z - law.center();
    const double bump = psi_r(law.radius(), d * d);
    const double pz = law.density(z);
    rep.min_gap = std::min(rep.min_gap, pz - law.epsilon() * bump);
    if (bump > 0.0) rep.epsilon_threshold = std::min(rep.epsilon_threshold, pz / bump);
  }
  rep.lower_bound_ok = rep.min_gap >= -1e-12;
  if (!rep.lower_bound_ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "density below epsilon*psi_r on the grid (epsilon must be <= %.6g)",
                  rep.epsilon_threshold);
    rep.failures.push_back(buf);
  }
  return rep;
}

LawFamily::LawFamily(const SplitLaw& law, int support) {
  require(support >= 1, "law family: support must be positive");
  laws_.assign(static_cast<std::size_t>(support), law);
}

LawFamily::LawFamily(std::vector<SplitLaw> per_variable) : laws_(std::move(per_variable)) {
  require(!laws_.empty(), "law family: no laws");
}

std::string LawFamily::describe() const {
  const bool uniform_family = std::all_of(laws_.begin(), laws_.end(),
                                          [&](const SplitLaw& l) { return l.describe() == laws_.front().describe(); });
  if (uniform_family) return std::to_string(laws_.size()) + "x" + laws_.front().describe();
  std::string out;
  for (const auto& l : laws_) out += (out.empty() ? "" : ";") + l.describe();
  return out;
}

void fill_rows(const LawFamily& family, std::uint64_t seed, std::uint64_t first_draw, std::size_t count, bool split,
               double* values, std::uint8_t* chi) {
  const int support = family.support();
  for (std::size_t i = 0; i < count; ++i) {
    for (int k = 1; k <= support; ++k) {
      RngStream rng(seed, static_cast<std::uint64_t>(k), first_draw + i);
      const std::size_t at = i * static_cast<std::size_t>(support) + static_cast<std::size_t>(k - 1);
      if (split) {
        const auto draw = family.law(k).sample_split(rng);
        values[at] = draw.value;
        chi[at] = draw.chi ? 1 : 0;
      } else {
        values[at] = family.law(k).sample_direct(rng);
      }
    }
  }
}

SampleBatch sample_batch(const LawFamily& family, std::size_t draws, std::uint64_t seed, bool split,
                         unsigned workers) {
  require(draws >= 1, "sample_batch: need at least one draw");
  SampleBatch out;
  out.split = split;
  const auto rows = static_cast<Eigen::Index>(draws);
  out.values.resize(rows, family.support());
  if (split) out.chi.resize(rows, family.support());
  const auto width = static_cast<std::size_t>(family.support());
  parallel_chunks(draws, 256, workers, [&](std::size_t begin, std::size_t end) {
    fill_rows(family, seed, begin, end - begin, split, out.values.data() + begin * width,
              split ? out.chi.data() + begin * width : nullptr);
  });
  return out;
}

SplitLaw parse_law_config(const std::string& json_text) {
  using nlohmann::json;
  try {
    const json doc = json::parse(json_text);
    const std::string kind = doc.at("kind").get<std::string>();
    const double center = doc.value("z_k", 0.0);
    const double r = doc.value("r", 0.25);
    const double epsilon = doc.value("epsilon", 0.2);
    const int p_max = doc.value("moment_p_max", 8);
    std::vector<double> bounds;
    if (doc.contains("moment_bounds")) bounds = doc.at("moment_bounds").get<std::vector<double>>();
    SplitLaw law = SplitLaw::normal(center, r, epsilon);
    if (kind == "normal") {
    } else if (kind == "uniform") {
      law = SplitLaw::uniform(center, r, epsilon);
    } else if (kind == "gauss_mixture") {
      MixtureParams p;
      p.weight = doc.value("weight", p.weight);
      p.mean1 = doc.value("mean1", p.mean1);
      p.mean2 = doc.value("mean2", p.mean2);
      p.sd1 = doc.value("sd1", p.sd1);
      p.sd2 = doc.value("sd2", p.sd2);
      law = SplitLaw::gauss_mixture(p, center, r, epsilon);
    } else if (kind == "rademacher") {
      law = SplitLaw::rademacher(center, r, epsilon);
    } else {
      throw ConfigError("law config: unknown kind '" + kind + "'");
    }
    return law.with_moment_bounds(std::move(bounds), p_max);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("law config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("law config: ") + e.what());
  }
}

std::string law_to_json(const SplitLaw& law) {
  nlohmann::json doc;
  doc["kind"] = to_string(law.kind());
  doc["z_k"] = law.center();
  doc["r"] = law.radius();
  doc["epsilon"] = law.epsilon();
  doc["moment_p_max"] = law.moment_p_max();
  if (!law.moment_bounds().empty()) doc["moment_bounds"] = law.moment_bounds();
  if (law.kind() == LawKind::gauss_mixture) {
    const auto& p = law.mixture();
    doc["weight"] = p.weight;
    doc["mean1"] = p.mean1;
    doc["mean2"] = p.mean2;
    doc["sd1"] = p.sd1;
    doc["sd2"] = p.sd2;
  }
  return doc.dump(2);
}

std::string membership_to_json(const MembershipReport& rep) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["passed"] = rep.passed();
  doc["has_density"] = rep.has_density;
  doc["normalized"] = rep.normalized;
  doc["centered"] = rep.centered;
  doc["unit_variance"] = rep.unit_variance;
  doc["moments_checked"] = rep.moments_checked;
  doc["moments_ok"] = rep.moments_ok;
  doc["lower_bound_ok"] = rep.lower_bound_ok;
  doc["mass"] = rep.mass;
  doc["mean"] = rep.mean;
  doc["variance"] = rep.variance;
  doc["moment_norms"] = rep.moment_norms;
  if (rep.has_density) {
    doc["min_gap"] = rep.min_gap;
    doc["epsilon_threshold"] = rep.epsilon_threshold;
  }
  doc["failures"] = rep.failures;
  return doc.dump(2);
}

}  // namespace homsum
