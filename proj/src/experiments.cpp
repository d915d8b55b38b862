#include "homsum/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>

#include "homsum/coeff_io.hpp"
#include "homsum/contraction.hpp"
#include "homsum/distances.hpp"
#include "homsum/error.hpp"
#include "homsum/parallel.hpp"
#include "homsum/quadrature.hpp"
#include "homsum/rng.hpp"

namespace homsum {

using nlohmann::json;

namespace {

double harmonic(int k) {
  double s = 0.0;
  for (int d = k; d >= 1; --d) s += 1.0 / d;
  return s;
}

std::vector<double> column(std::span<const double> values, double factor) {
  std::vector<double> out(values.begin(), values.end());
  for (auto& v : out) v *= factor;
  return out;
}

std::vector<double> normal_reference(std::size_t draws, std::uint64_t seed, unsigned workers) {
  const auto batch = sample_batch(LawFamily(SplitLaw::normal(), 1), draws, seed, false, workers);
  return std::vector<double>(batch.values.data(), batch.values.data() + batch.values.size());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_ints(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

}  // namespace

double phi_closed(double x, double y) {
  require(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0, "phi: arguments must lie in [0, 1]");
  require(x != y, "phi: singular at x = y");
  const double num = std::sqrt(1.0 - x) + std::sqrt(1.0 - y);
  return std::numbers::pi + 2.0 * std::log(num / std::abs(std::sqrt(x) - std::sqrt(y)));
}

double phi_quadrature(double x, double y, double tol) {
  require(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0, "phi_quadrature: arguments must lie in (0, 1)");
  require(x != y, "phi_quadrature: singular at x = y");
  if (x > y) std::swap(x, y);
  const double mid = 0.5 * (x + y);
  QuadratureOptions opts{tol, tol, 30};
  // z = s -+ u^2 turns 1/sqrt|z - s| dz into 2 du.
  const double left = integrate([&](double u) { return 2.0 / std::sqrt(y - x + u * u); }, 0.0, std::sqrt(x), opts);
  const double inner_lo =
      integrate([&](double u) { return 2.0 / std::sqrt(y - x - u * u); }, 0.0, std::sqrt(mid - x), opts);
  const double inner_hi =
      integrate([&](double u) { return 2.0 / std::sqrt(y - x - u * u); }, 0.0, std::sqrt(y - mid), opts);
  const double right =
      integrate([&](double u) { return 2.0 / std::sqrt(y - x + u * u); }, 0.0, std::sqrt(1.0 - y), opts);
  return left + inner_lo + inner_hi + right;
}

RiemannPhi riemann_phi(int n, int i, int j) {
  require(n >= 2, "riemann_phi: n must be >= 2");
  require(i >= 1 && j <= n && i < j, "riemann_phi: need 1 <= i < j <= n");
  const double x = static_cast<double>(i) / n;
  const double y = static_cast<double>(j) / n;
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    if (k == i || k == j) continue;
    const double z = static_cast<double>(k) / n;
    sum += 1.0 / std::sqrt(std::abs(x - z) * std::abs(y - z));
  }
  RiemannPhi out;
  out.sum = sum / n;
  out.error_bound = 16.0 * std::numbers::sqrt2 / (std::sqrt(static_cast<double>(n)) * std::sqrt(y - x)) +
                    8.0 / (n * (x + y));
  return out;
}

Eigen::MatrixXd interaction_matrix(int n) {
  require(n >= 1, "interaction matrix: n must be >= 1");
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = i == j ? 0.0 : 1.0 / std::sqrt(static_cast<double>(std::abs(i - j)));
  return a;
}

CoefficientFamily quad_clt_coeffs(int n) {
  require(n >= 3, "quad_clt_coeffs: n must be >= 3");
  const double scale = 1.0 / std::sqrt(2.0 * n * std::log(static_cast<double>(n)));
  std::vector<CoefficientEntry> entries;
  entries.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) entries.push_back({{i, j}, scale / std::sqrt(static_cast<double>(j - i))});
  return CoefficientFamily(2, n, std::move(entries));
}

Eigen::MatrixXd abar_matrix(int n) {
  const Eigen::MatrixXd a = interaction_matrix(n);
  return (a * a) / static_cast<double>(n);
}

CoefficientFamily abar_offdiag_coeffs(int n) {
  Eigen::MatrixXd m = abar_matrix(n);
  m.diagonal().setZero();
  return CoefficientFamily::from_dense(m);
}

RowLogsum row_logsum_check(int n) {
  require(n >= 3, "row_logsum_check: n must be >= 3");
  RowLogsum out;
  for (int i = 1; i <= n - 1; ++i) {
    const double s = harmonic(i - 1) + harmonic(n - i);
    const double lo = std::log(static_cast<double>(i)) + std::log(static_cast<double>(n - i));
    const bool ok = lo <= s && s <= 2.0 + lo;
    out.row_sums.push_back(s);
    out.pass.push_back(ok);
    out.all_pass = out.all_pass && ok;
  }
  return out;
}

double c_star() {
  // x = s^2 and y = 1 - t^2 remove the square-root endpoint behaviour of phi.
  static const double value = [] {
    const QuadratureOptions inner{1e-12, 1e-10, 15};
    const QuadratureOptions outer{1e-11, 1e-9, 15};
    const auto row = [&](double s) {
      const double x = s * s;
      const double top = std::sqrt(std::max(0.75 - x, 0.0));
      if (top == 0.0) return 0.0;
      const double inner_value = integrate(
          [&](double t) {
            const double p = phi_closed(x, 1.0 - t * t);
            return 2.0 * t * p * p;
          },
          0.0, top, inner);
      return 2.0 * s * inner_value;
    };
    return 2.0 * integrate(row, 0.0, std::sqrt(0.75), outer) / 16.0;
  }();
  return value;
}

AbarFacts abar_facts(int n) {
  require(n >= 3, "abar_facts: n must be >= 3");
  AbarFacts f;
  f.n = n;
  f.c_star = c_star();
  const Eigen::MatrixXd bar = abar_matrix(n);
  Eigen::MatrixXd off = bar;
  off.diagonal().setZero();
  f.influence_sq = off.rowwise().squaredNorm().maxCoeff();
  f.offdiag_norm_sq = off.squaredNorm();
  f.full_norm_sq = bar.squaredNorm();
  f.diagonal_sq = bar.diagonal().squaredNorm();
  const auto cn = quad_clt_coeffs(n);
  f.contraction_sq = contraction(cn, cn, 1).ordered_norm_sq();
  const double ln = std::log(static_cast<double>(n));
  f.contraction_lower = f.c_star / (4.0 * ln * ln);
  f.contraction_lower_pass = f.contraction_sq >= f.contraction_lower;
  f.norm_lower_pass = f.offdiag_norm_sq >= f.c_star;
  const double stmt = 32.0 * std::numbers::sqrt2 / std::numbers::pi;
  f.statement_proviso = n >= stmt * stmt;
  f.proof_proviso = std::sqrt(static_cast<double>(n)) >= 256.0 * std::numbers::sqrt2 / std::numbers::pi;
  f.influence_ratio = f.influence_sq * n / (ln * ln);
  f.diagonal_ratio = f.diagonal_sq * n / (ln * ln);
  f.contraction_ratio = f.contraction_sq * ln * ln;
  f.norm_ratio = f.offdiag_norm_sq;
  return f;
}

double ExperimentResult::at(std::size_t row, const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  require(it != columns.end(), "experiment result: no column '" + name + "'");
  return rows.at(row).at(static_cast<std::size_t>(it - columns.begin()));
}

std::vector<std::string> write_experiment(const ExperimentResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir + ": " + ec.message());
  const std::string csv_name = result.id + ".csv";
  const std::string manifest_name = result.id + "_manifest.json";
  const auto csv_path = (std::filesystem::path(dir) / csv_name).string();
  std::FILE* f = std::fopen(csv_path.c_str(), "wb");
  if (!f) throw ConfigError("cannot write " + csv_path);
  for (std::size_t c = 0; c < result.columns.size(); ++c) std::fprintf(f, "%s%s", c ? "," : "", result.columns[c].c_str());
  std::fputc('\n', f);
  for (const auto& row : result.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) std::fprintf(f, "%s%.17g", c ? "," : "", row[c]);
    std::fputc('\n', f);
  }
  std::fclose(f);

  json doc;
  doc["schema_version"] = 1;
  doc["experiment"] = result.id;
  doc["parameters"] = result.parameters;
  doc["seeds"] = result.seeds;
  doc["columns"] = result.columns;
  doc["files"] = {csv_name, manifest_name};
  const auto manifest_path = (std::filesystem::path(dir) / manifest_name).string();
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + manifest_path);
  out << doc.dump(2) << '\n';
  return {csv_path, manifest_path};
}

ExperimentResult run_quadratic_clt(const QuadCltConfig& cfg, unsigned workers,
                                   std::vector<std::vector<double>>* samples) {
  require(!cfg.n_list.empty(), "quad_clt: empty n list");
  ExperimentResult res;
  res.id = "quad_clt";
  res.parameters = {{"n_list", join_ints(cfg.n_list)}, {"law", cfg.law.describe()},
                    {"draws", std::to_string(cfg.draws)}, {"kde_delta", fmt(cfg.kde_delta)}};
  res.columns = {"n",       "variance",  "variance_se", "variance_target", "ks_raw",     "ks_scaled",
                 "dk1_scaled", "tv_kde_scaled", "smooth_bound", "cw_tail_template", "tv_template"};
  res.seeds["seed"] = cfg.seed;
  const std::uint64_t ref_seed = derive_seed(cfg.seed, 0);
  res.seeds["reference"] = ref_seed;
  const auto reference = normal_reference(cfg.draws, ref_seed, workers);
  const UniversalConstants consts;
  const double m3 = std::max(1.0, cfg.law.moment_bound(3));
  for (int n : cfg.n_list) {
    const auto c = quad_clt_coeffs(n);
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
    res.seeds["n=" + std::to_string(n)] = s;
    const auto sample = mc_series(c, LawFamily(cfg.law, n), 2, cfg.draws, s, false, workers);
    const auto scaled = column(sample.values, 1.0 / std::numbers::sqrt2);
    const double norm = level_norm(c, 2);
    const auto dict = default_dictionary(scaled, reference, 1);
    res.rows.push_back({
        static_cast<double>(n),
        sample_variance(sample.values),
        variance_standard_error(sample.values),
        2.0 * norm * norm,
        kolmogorov_vs_cdf(sample.values, normal_cdf),
        kolmogorov_vs_cdf(scaled, normal_cdf),
        dk_lower(scaled, reference, 1, dict, workers).estimate,
        tv_kde(scaled, reference, cfg.kde_delta).estimate,
        smooth_invariance_bound(c, 2, m3, 1.0).value,
        cw_tail_template(c, 2, 1e-2, consts, cfg.law.radius(), cfg.law.epsilon()).value,
        tv_invariance_template(c, 2, consts, cfg.law.radius(), cfg.law.epsilon()).value,
    });
    if (samples) samples->push_back(sample.values);
  }
  return res;
}

CoefficientFamily chi2_target_coeffs(int blocks, int block_size) {
  require(blocks >= 1, "chi2 target: need m >= 1");
  require(block_size >= 2, "chi2 target: need L >= 2");
  std::vector<CoefficientEntry> entries;
  for (int b = 0; b < blocks; ++b)
    for (int i = 1; i <= block_size; ++i)
      for (int j = i + 1; j <= block_size; ++j)
        entries.push_back({{b * block_size + i, b * block_size + j}, 1.0 / block_size});
  return CoefficientFamily(2, blocks * block_size, std::move(entries));
}

std::vector<double> centered_chi2_sample(int dof, std::size_t draws, std::uint64_t seed, unsigned workers) {
  require(dof >= 1, "centered chi2 sample: dof must be >= 1");
  const auto batch = sample_batch(LawFamily(SplitLaw::normal(), dof), draws, seed, false, workers);
  std::vector<double> out(draws);
  for (std::size_t i = 0; i < draws; ++i) out[i] = batch.values.row(static_cast<Eigen::Index>(i)).squaredNorm() - dof;
  return out;
}

ExperimentResult run_chi2(const Chi2Config& cfg, unsigned workers) {
  require(!cfg.l_list.empty(), "chi2: empty L list");
  ExperimentResult res;
  res.id = "chi2";
  res.parameters = {{"m", std::to_string(cfg.m)}, {"L_list", join_ints(cfg.l_list)},
                    {"law", cfg.law.describe()}, {"draws", std::to_string(cfg.draws)}};
  res.columns = {"L",          "mean",        "mean_se",     "variance",       "variance_se",
                 "variance_target", "ks",     "dk1",         "kappa_printed",  "kappa_matched",
                 "bound_printed",   "bound_matched"};
  res.seeds["seed"] = cfg.seed;
  const std::uint64_t ref_seed = derive_seed(cfg.seed, 1);
  res.seeds["reference"] = ref_seed;
  const auto reference = centered_chi2_sample(cfg.m, cfg.draws, ref_seed, workers);
  const auto cdf = [dof = cfg.m](double x) { return centered_chi2_cdf(x, dof); };
  for (int L : cfg.l_list) {
    const auto c = chi2_target_coeffs(cfg.m, L);
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(L));
    res.seeds["L=" + std::to_string(L)] = s;
    const auto sample = mc_series(c, LawFamily(cfg.law, cfg.m * L), 2, cfg.draws, s, false, workers);
    const auto& v = sample.values;
    const double var = sample_variance(v);
    const auto dict = default_dictionary(v, reference, 1);
    res.rows.push_back({
        static_cast<double>(L),
        sample_mean(v),
        std::sqrt(var / static_cast<double>(v.size())),
        var,
        variance_standard_error(v),
        2.0 * cfg.m * (1.0 - 1.0 / L),
        kolmogorov_vs_cdf(v, cdf),
        dk_lower(v, reference, 1, dict, workers).estimate,
        kappa_chi2(c, cfg.m, 2, KappaForm::printed),
        kappa_chi2(c, cfg.m, 2, KappaForm::variance_matched),
        chi2_bound(c, 2, cfg.m, KappaForm::printed).value,
        chi2_bound(c, 2, cfg.m, KappaForm::variance_matched).value,
    });
  }
  return res;
}

VarianceSample variance_estimator_sample(int n, const SplitLaw& law, std::size_t draws, std::uint64_t seed,
                                         unsigned workers) {
  require(n >= 3, "variance estimator: n must be >= 3");
  require(draws >= 1, "variance estimator: need at least one draw");
  const Eigen::MatrixXd a = interaction_matrix(n);
  const Eigen::MatrixXd scaled = a / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd off = (a * a) / static_cast<double>(n);
  const Eigen::VectorXd diag = off.diagonal();
  off.diagonal().setZero();
  // E X_i^2 = (1/n) sum_{j != i} 1/|i - j|
  Eigen::VectorXd centering(n);
  for (int i = 1; i <= n; ++i) centering(i - 1) = (harmonic(i - 1) + harmonic(n - i)) / n;

  VarianceSample out;
  out.sample.values.assign(draws, 0.0);
  out.decomposed.assign(draws, 0.0);
  auto& meta = out.sample.meta;
  const std::string tag = "variance_estimator:n=" + std::to_string(n);
  meta.coefficient_hash = fnv1a(tag.data(), tag.size());
  const LawFamily family(law, n);
  meta.law = family.describe();
  meta.law_hash = fnv1a(meta.law.data(), meta.law.size());
  meta.seed = seed;
  meta.draws = draws;
  meta.degree = 2;

  std::vector<double> gaps(draws, 0.0);
  parallel_chunks(draws, kSeriesChunk, workers, [&](std::size_t begin, std::size_t end) {
    const auto rows = static_cast<Eigen::Index>(end - begin);
    RowMatrix block(rows, n);
    fill_rows(family, seed, begin, end - begin, false, block.data(), nullptr);
    const RowMatrix x = block * scaled;
    const RowMatrix cz = block * off;
    for (Eigen::Index r = 0; r < rows; ++r) {
      double direct = 0.0;
      double second = 0.0;
      for (int k = 0; k < n; ++k) {
        direct += x(r, k) * x(r, k) - centering(k);
        const double z = block(r, k);
        second += diag(k) * (z * z - 1.0);
      }
      const double first = cz.row(r).dot(block.row(r));
      const std::size_t i = begin + static_cast<std::size_t>(r);
      out.sample.values[i] = direct;
      out.decomposed[i] = first + second;
      gaps[i] = std::abs(direct - (first + second)) / std::max(1.0, std::abs(direct));
    }
  });
  out.max_relative_gap = *std::max_element(gaps.begin(), gaps.end());
  return out;
}

CoefficientFamily i2_phi_coeffs(int grid_n) {
  require(grid_n >= 16, "I2 reference: grid must be >= 16");
  std::vector<CoefficientEntry> entries;
  entries.reserve(static_cast<std::size_t>(grid_n) * (grid_n - 1) / 2);
  for (int i = 1; i <= grid_n; ++i)
    for (int j = i + 1; j <= grid_n; ++j)
      entries.push_back({{i, j}, phi_closed((i - 0.5) / grid_n, (j - 0.5) / grid_n) / grid_n});
  return CoefficientFamily(2, grid_n, std::move(entries));
}

std::vector<double> i2_phi_reference(int grid_n, std::size_t draws, std::uint64_t seed, unsigned workers) {
  const auto c = i2_phi_coeffs(grid_n);
  return mc_series(c, LawFamily(SplitLaw::normal(), grid_n), 2, draws, seed, false, workers).values;
}

ExperimentResult run_variance_experiment(const VarianceConfig& cfg, unsigned workers,
                                         std::vector<double>* reference_out) {
  require(!cfg.n_list.empty(), "variance: empty n list");
  ExperimentResult res;
  res.id = "variance";
  res.parameters = {{"n_list", join_ints(cfg.n_list)}, {"law", cfg.law.describe()},
                    {"draws", std::to_string(cfg.draws)}, {"reference_grid", std::to_string(cfg.reference_grid)},
                    {"kde_delta", fmt(cfg.kde_delta)}};
  res.columns = {"n",           "mean",           "variance",          "ks_two_sample",   "ks_critical_01",
                 "tv_kde",      "max_path_gap",   "norm_lower_pass",   "contraction_lower_pass",
                 "statement_proviso", "proof_proviso"};
  res.seeds["seed"] = cfg.seed;
  const std::uint64_t ref_seed = derive_seed(cfg.seed, 2);
  res.seeds["reference"] = ref_seed;
  const auto reference = i2_phi_reference(cfg.reference_grid, cfg.draws, ref_seed, workers);
  for (int n : cfg.n_list) {
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
    res.seeds["n=" + std::to_string(n)] = s;
    const auto vs = variance_estimator_sample(n, cfg.law, cfg.draws, s, workers);
    const auto& v = vs.sample.values;
    const auto facts = abar_facts(n);
    res.rows.push_back({
        static_cast<double>(n),
        sample_mean(v),
        sample_variance(v),
        kolmogorov_two_sample(v, reference),
        ks_critical_two_sample(v.size(), reference.size(), 0.01),
        tv_kde(v, reference, cfg.kde_delta).estimate,
        vs.max_relative_gap,
        facts.norm_lower_pass ? 1.0 : 0.0,
        facts.contraction_lower_pass ? 1.0 : 0.0,
        facts.statement_proviso ? 1.0 : 0.0,
        facts.proof_proviso ? 1.0 : 0.0,
    });
  }
  if (reference_out) *reference_out = reference;
  return res;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("experiment config: expected an object");
  ExperimentConfig cfg;
  try {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string& key = it.key();
      if (key == "experiment") cfg.experiment = it->get<std::string>();
      else if (key == "n_list") cfg.n_list = it->get<std::vector<int>>();
      else if (key == "L_list") cfg.l_list = it->get<std::vector<int>>();
      else if (key == "m") cfg.m = it->get<int>();
      else if (key == "law") cfg.law = parse_law_config(it->dump());
      else if (key == "draws") cfg.draws = it->get<std::size_t>();
      else if (key == "seed") cfg.seed = it->get<std::uint64_t>();
      else if (key == "output_dir") cfg.output_dir = it->get<std::string>();
      else if (key == "reference_grid") cfg.reference_grid = it->get<int>();
      else if (key == "kde_delta") cfg.kde_delta = it->get<double>();
      else throw ConfigError("experiment config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  if (cfg.experiment != "quad_clt" && cfg.experiment != "chi2" && cfg.experiment != "variance")
    throw ConfigError("experiment config: experiment must be quad_clt, chi2 or variance");
  if (cfg.draws < 2) throw ConfigError("experiment config: draws must be >= 2");
  if (cfg.kde_delta <= 0.0) throw ConfigError("experiment config: kde_delta must be > 0");
  if (cfg.experiment == "chi2" && cfg.l_list.empty()) cfg.l_list = {8, 16, 32, 64};
  if (cfg.experiment != "chi2" && cfg.n_list.empty()) cfg.n_list = {64, 256, 1024};
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers) {
  if (cfg.experiment == "quad_clt") {
    QuadCltConfig q;
    q.n_list = cfg.n_list;
    q.law = cfg.law;
    q.draws = cfg.draws;
    q.seed = cfg.seed;
    q.kde_delta = cfg.kde_delta;
    return run_quadratic_clt(q, workers);
  }
  if (cfg.experiment == "chi2") {
    Chi2Config c;
    c.m = cfg.m;
    c.l_list = cfg.l_list;
    c.law = cfg.law;
    c.draws = cfg.draws;
    c.seed = cfg.seed;
    return run_chi2(c, workers);
  }
  VarianceConfig v;
  v.n_list = cfg.n_list;
  v.law = cfg.law;
  v.draws = cfg.draws;
  v.seed = cfg.seed;
  v.reference_grid = cfg.reference_grid;
  v.kde_delta = cfg.kde_delta;
  return run_variance_experiment(v, workers);
}

}  // namespace homsum
