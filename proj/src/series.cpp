#include "homsum/series.hpp"

#include <cstdio>
#include <json.hpp>

#include "homsum/coeff_io.hpp"
#include "homsum/combinatorics.hpp"
#include "homsum/error.hpp"
#include "homsum/parallel.hpp"

namespace homsum {

namespace {

void check_point(const CoefficientFamily& c, std::span<const double> z, int degree) {
  require(degree >= 0 && degree <= c.degree(), "series: degree exceeds the coefficient degree");
  require(z.size() >= static_cast<std::size_t>(c.support()), "series: point is shorter than the support");
}

double level_sum(const CoefficientFamily& c, std::span<const double> z, int m) {
  double sum = 0.0;
  for (std::size_t e = 0; e < c.level_size(m); ++e) {
    double term = c.value(m, e);
    for (int k : c.key(m, e)) term *= z[static_cast<std::size_t>(k - 1)];
    sum += term;
  }
  return factorial(m) * sum;
}

}  // namespace

double eval_level(const CoefficientFamily& c, std::span<const double> z, int m) {
  require(m >= 1 && m <= c.degree(), "eval_level: level out of range");
  check_point(c, z, m);
  return level_sum(c, z, m);
}

double eval_series(const CoefficientFamily& c, std::span<const double> z, int degree) {
  check_point(c, z, degree);
  double sum = 0.0;
  for (int m = 1; m <= degree; ++m) sum += level_sum(c, z, m);
  return sum;
}

double partial_derivative(const CoefficientFamily& c, std::span<const double> z, int j, int degree) {
  check_point(c, z, degree);
  require(degree >= 1, "partial_derivative: degree must be positive");
  const auto lifted = lift_cj(c, j);
  return lifted.constant + eval_series(lifted.family, z, degree - 1);
}

std::vector<double> gradient(const CoefficientFamily& c, std::span<const double> z, int degree) {
  check_point(c, z, degree);
  std::vector<double> grad(static_cast<std::size_t>(c.support()), 0.0);
  for (int m = 1; m <= degree; ++m) {
    const double mult = factorial(m);
    for (std::size_t e = 0; e < c.level_size(m); ++e) {
      const auto key = c.key(m, e);
      for (std::size_t skip = 0; skip < key.size(); ++skip) {
        double term = mult * c.value(m, e);
        for (std::size_t p = 0; p < key.size(); ++p)
          if (p != skip) term *= z[static_cast<std::size_t>(key[p] - 1)];
        grad[static_cast<std::size_t>(key[skip] - 1)] += term;
      }
    }
  }
  return grad;
}

double covariance_lambda(const CoefficientFamily& c, std::span<const double> z, std::span<const std::uint8_t> chi,
                         int degree) {
  require(chi.size() >= static_cast<std::size_t>(c.support()), "covariance_lambda: chi is shorter than the support");
  const auto grad = gradient(c, z, degree);
  double sum = 0.0;
  for (std::size_t j = 0; j < grad.size(); ++j) {
    require(chi[j] <= 1, "covariance_lambda: chi entries must be 0 or 1");
    if (chi[j]) sum += grad[j] * grad[j];
  }
  return sum;
}

DenseQuadratic::DenseQuadratic(const CoefficientFamily& c, int degree) {
  require(degree >= 0 && degree <= 2 && degree <= c.degree(), "dense kernel: degree must be at most 2");
  linear_ = degree >= 1 ? dense_level1(c) : Eigen::VectorXd::Zero(c.support());
  quadratic_ = degree >= 2 ? dense_level2(c) : Eigen::MatrixXd::Zero(c.support(), c.support());
}

double DenseQuadratic::eval(std::span<const double> z) const {
  require(z.size() >= static_cast<std::size_t>(support()), "dense kernel: point is shorter than the support");
  const Eigen::Map<const Eigen::VectorXd> v(z.data(), support());
  return linear_.dot(v) + v.dot(quadratic_ * v);
}

void DenseQuadratic::eval_block(const RowMatrix& block, const ChiMatrix* chi, double* values, double* lambda) const {
  require(block.cols() == support(), "dense kernel: block width does not match the support");
  const RowMatrix image = block * quadratic_;
  const Eigen::VectorXd lin = block * linear_;
  for (Eigen::Index i = 0; i < block.rows(); ++i) values[i] = image.row(i).dot(block.row(i)) + lin(i);
  if (chi && lambda) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < block.cols(); ++j) {
        if (!(*chi)(i, j)) continue;
        const double g = 2.0 * image(i, j) + linear_(j);
        sum += g * g;
      }
      lambda[i] = sum;
    }
  }
}

SeriesSample mc_series(const CoefficientFamily& c, const LawFamily& family, int degree, std::size_t draws,
                       std::uint64_t seed, bool with_lambda, unsigned workers) {
  require(degree >= 0 && degree <= c.degree(), "mc_series: degree exceeds the coefficient degree");
  require(family.support() >= c.support(), "mc_series: law family is smaller than the coefficient support");
  require(draws >= 1, "mc_series: need at least one draw");

  SeriesSample out;
  out.values.assign(draws, 0.0);
  if (with_lambda) out.lambda.emplace(draws, 0.0);
  out.meta.coefficient_hash = coefficients_hash(c);
  out.meta.law = family.describe();
  out.meta.law_hash = fnv1a(out.meta.law.data(), out.meta.law.size());
  out.meta.seed = seed;
  out.meta.draws = draws;
  out.meta.degree = degree;
  out.meta.with_lambda = with_lambda;

  const int width = c.support();
  if (width == 0) return out;
  std::vector<SplitLaw> laws;
  for (int k = 1; k <= width; ++k) laws.push_back(family.law(k));
  const LawFamily active(std::move(laws));
  std::optional<DenseQuadratic> dense;
  if (degree <= 2) dense.emplace(c, degree);

  parallel_chunks(draws, kSeriesChunk, workers, [&](std::size_t begin, std::size_t end) {
    const auto rows = static_cast<Eigen::Index>(end - begin);
    RowMatrix block(rows, width);
    ChiMatrix chi;
    if (with_lambda) chi.resize(rows, width);
    fill_rows(active, seed, begin, end - begin, with_lambda, block.data(), with_lambda ? chi.data() : nullptr);
    double* lambda = with_lambda ? out.lambda->data() + begin : nullptr;
    if (dense) {
      dense->eval_block(block, with_lambda ? &chi : nullptr, out.values.data() + begin, lambda);
      return;
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      const std::span<const double> z(block.row(i).data(), static_cast<std::size_t>(width));
      out.values[begin + static_cast<std::size_t>(i)] = eval_series(c, z, degree);
      if (lambda) {
        const std::span<const std::uint8_t> x(chi.row(i).data(), static_cast<std::size_t>(width));
        lambda[i] = covariance_lambda(c, z, x, degree);
      }
    }
  });
  return out;
}

SmallBallEstimate small_ball_from_lambda(std::span<const double> lambda, double eta) {
  require(eta >= 0.0, "small ball: eta must be nonnegative");
  SmallBallEstimate est;
  est.eta = eta;
  est.draws = lambda.size();
  for (double v : lambda) est.hits += v <= eta;
  est.interval = wilson_interval(est.hits, est.draws);
  return est;
}

SmallBallEstimate mc_small_ball(const CoefficientFamily& c, const LawFamily& family, int degree, double eta,
                                std::size_t draws, std::uint64_t seed, unsigned workers) {
  const auto sample = mc_series(c, family, degree, draws, seed, true, workers);
  return small_ball_from_lambda(*sample.lambda, eta);
}

std::string series_meta_json(const SeriesMeta& meta) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(meta.coefficient_hash));
  doc["coefficient_hash"] = hash;
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(meta.law_hash));
  doc["law_hash"] = hash;
  doc["law"] = meta.law;
  doc["seed"] = meta.seed;
  doc["draws"] = meta.draws;
  doc["degree"] = meta.degree;
  doc["with_lambda"] = meta.with_lambda;
  return doc.dump(2);
}

void write_series_csv(const SeriesSample& sample, const std::string& csv_path) {
  std::FILE* f = std::fopen(csv_path.c_str(), "wb");
  if (!f) throw ConfigError("cannot write " + csv_path);
  std::fputs(sample.lambda ? "value,lambda\n" : "value\n", f);
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    if (sample.lambda) std::fprintf(f, "%.17g,%.17g\n", sample.values[i], (*sample.lambda)[i]);
    else std::fprintf(f, "%.17g\n", sample.values[i]);
  }
  std::fclose(f);
  std::FILE* side = std::fopen((csv_path + ".json").c_str(), "wb");
  if (!side) throw ConfigError("cannot write " + csv_path + ".json");
  const std::string text = series_meta_json(sample.meta) + "\n";
  std::fputs(text.c_str(), side);
  std::fclose(side);
}

}  // namespace homsum
