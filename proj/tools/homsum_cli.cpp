#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "homsum/acceptance.hpp"
#include "homsum/bounds.hpp"
#include "homsum/coeff_io.hpp"
#include "homsum/contraction.hpp"
#include "homsum/distances.hpp"
#include "homsum/error.hpp"
#include "homsum/experiments.hpp"
#include "homsum/parallel.hpp"
#include "homsum/series.hpp"

using namespace homsum;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitAcceptance = 4;

struct Globals {
  std::uint64_t seed = 42;
  unsigned workers = 0;
  std::string out;
  std::string constants;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text << '\n';
}

std::vector<double> read_sample_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<double> out;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string first = line.substr(0, line.find(','));
    if (header) {
      header = false;
      try {
        std::size_t used = 0;
        const double v = std::stod(first, &used);
        if (used == first.size()) out.push_back(v);
      } catch (const std::exception&) {
      }
      continue;
    }
    try {
      std::size_t used = 0;
      out.push_back(std::stod(first, &used));
      if (used != first.size()) throw ConfigError("bad number '" + first + "' in " + path);
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad number '" + first + "' in " + path);
    }
  }
  if (out.empty()) throw ConfigError(path + ": no samples");
  return out;
}

UniversalConstants load_constants(const std::string& path) {
  if (path.empty()) return {};
  return parse_constants_json(read_text_file(path));
}

json stats_json(const CoefficientFamily& c, int dof) {
  const auto st = coeff_stats(c);
  json doc;
  doc["schema_version"] = 1;
  doc["degree"] = c.degree();
  doc["support"] = c.support();
  doc["entries"] = c.entry_count();
  doc["influence"] = st.influence;
  doc["level_norm"] = st.level_norm;
  doc["total_influence"] = st.total_influence;
  doc["total_norm"] = st.total_norm;
  bool lower_zero = true;
  for (int m = 1; m < c.degree(); ++m) lower_zero = lower_zero && c.level_size(m) == 0;
  if (dof > 0 && c.degree() % 2 == 0 && c.degree() > 0 && lower_zero) {
    doc["kappa_printed"] = kappa_chi2(c, dof, c.degree(), KappaForm::printed);
    doc["kappa_variance_matched"] = kappa_chi2(c, dof, c.degree(), KappaForm::variance_matched);
    doc["m"] = dof;
  }
  return doc;
}

int cmd_coeffs(const Globals& g, const std::string& path, int quad_clt, int dof) {
  CoefficientFamily c = quad_clt > 0 ? quad_clt_coeffs(quad_clt) : load_coefficients(path);
  const auto st = coeff_stats(c);
  for (int m = 1; m <= c.degree(); ++m)
    std::printf("level %d: delta_m = %.12g  |c|_m = %.12g\n", m, st.influence[m - 1], st.level_norm[m - 1]);
  std::printf("deltabar_N = %.12g  ||c||_N = %.12g\n", st.total_influence, st.total_norm);
  if (quad_clt > 0) {
    const double n = quad_clt;
    const double d2 = std::pow(st.influence[1], 2);
    const double nrm = std::pow(st.level_norm[1], 2);
    const double ln = std::log(n);
    std::printf("delta_2^2(c_n) = %.6g <= 2/n = %.6g: %s\n", d2, 2.0 / n, d2 <= 2.0 / n ? "pass" : "FAIL");
    std::printf("1 - 1/ln n <= |c_n|_2^2 = %.6f <= 1 + 1/ln n: %s\n", nrm,
                (1.0 - 1.0 / ln <= nrm && nrm <= 1.0 + 1.0 / ln) ? "pass" : "FAIL");
  }
  const auto doc = stats_json(c, dof);
  if (doc.contains("kappa_printed"))
    std::printf("kappa (m=%d): printed %.12g  variance-matched %.12g\n", dof, doc["kappa_printed"].get<double>(),
                doc["kappa_variance_matched"].get<double>());
  emit(doc.dump(2), g.out);
  return 0;
}

// {"coefficients": path | "quad_clt": n | "chi2_target": {"m", "L"}, "law", "draws", "seed", "degree", "lambda"}
int cmd_simulate(const Globals& g, const std::string& config_path, bool seed_given) {
  json doc;
  try {
    doc = json::parse(read_text_file(config_path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("simulate config: ") + e.what());
  }
  std::optional<CoefficientFamily> c;
  SplitLaw law = SplitLaw::normal();
  std::size_t draws = 100000;
  std::uint64_t seed = g.seed;
  int degree = -1;
  bool lambda = false;
  try {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const auto& key = it.key();
      if (key == "coefficients") c = load_coefficients(it->get<std::string>());
      else if (key == "quad_clt") c = quad_clt_coeffs(it->get<int>());
      else if (key == "chi2_target") c = chi2_target_coeffs(it->at("m").get<int>(), it->at("L").get<int>());
      else if (key == "law") law = parse_law_config(it->dump());
      else if (key == "draws") draws = it->get<std::size_t>();
      else if (key == "seed") { if (!seed_given) seed = it->get<std::uint64_t>(); }
      else if (key == "degree") degree = it->get<int>();
      else if (key == "lambda") lambda = it->get<bool>();
      else throw ConfigError("simulate config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("simulate config: ") + e.what());
  }
  if (!c) throw ConfigError("simulate config: need coefficients, quad_clt or chi2_target");
  if (degree < 0) degree = c->degree();
  const auto sample = mc_series(*c, LawFamily(law, std::max(c->support(), 1)), degree, draws, seed, lambda, g.workers);
  const std::string out = g.out.empty() ? "series.csv" : g.out;
  write_series_csv(sample, out);
  std::cout << out << '\n' << out << ".json\n";
  return 0;
}

int cmd_distance(const Globals& g, const std::string& a_path, const std::string& b_path, const std::string& cdf,
                 const std::string& kind, int k, double delta) {
  const auto a = read_sample_csv(a_path);
  DistanceReport rep;
  if (b_path.empty()) {
    if (kind != "ks") throw ConfigError("distance: one-sample mode supports --kind ks only");
    std::function<double(double)> f;
    if (cdf == "normal") {
      f = normal_cdf;
    } else if (cdf.rfind("chi2:", 0) == 0) {
      const int dof = std::stoi(cdf.substr(5));
      f = [dof](double x) { return centered_chi2_cdf(x, dof); };
    } else {
      throw ConfigError("distance: --cdf must be normal or chi2:<m>");
    }
    rep.kind = "kolmogorov";
    rep.estimate = kolmogorov_vs_cdf(a, f);
    rep.params["n"] = static_cast<double>(a.size());
    rep.params["dkw_99"] = std::sqrt(std::log(2.0 / 0.01) / (2.0 * a.size()));
  } else {
    const auto b = read_sample_csv(b_path);
    if (kind == "ks") {
      rep.kind = "kolmogorov_two_sample";
      rep.estimate = kolmogorov_two_sample(a, b);
      rep.params["p_value"] = ks_pvalue_two_sample(rep.estimate, a.size(), b.size());
    } else if (kind == "dk") {
      rep = dk_lower(a, b, k, default_dictionary(a, b, k), g.workers);
    } else if (kind == "tv") {
      rep = tv_kde(a, b, delta);
    } else {
      throw ConfigError("distance: --kind must be ks, dk or tv");
    }
  }
  emit(distance_to_json(rep), g.out);
  return 0;
}

int cmd_bounds(const Globals& g, const std::string& path, int degree, double r, double eps, double eta, double m3,
               double f3, double p_chi, double x, int dof) {
  const auto c = load_coefficients(path);
  if (degree < 0) degree = c.degree();
  const auto consts = load_constants(g.constants);
  std::vector<BoundReport> reports;
  reports.push_back(smooth_invariance_bound(c, degree, m3, f3));
  const double threshold = hoeffding_threshold(c, degree, p_chi);
  reports.push_back(hoeffding_tail(c, degree, x >= 0.0 ? x : 0.5 * threshold, p_chi));
  reports.push_back(cw_tail_template(c, degree, eta, consts, r, eps));
  if (level_norm(c, degree) > 0.0) reports.push_back(tv_invariance_template(c, degree, consts, r, eps));
  bool lower_zero = true;
  for (int m = 1; m < c.degree(); ++m) lower_zero = lower_zero && c.level_size(m) == 0;
  if (degree % 2 == 0 && degree == c.degree() && lower_zero) {
    reports.push_back(chi2_bound(c, degree, dof, KappaForm::printed));
    reports.push_back(chi2_bound(c, degree, dof, KappaForm::variance_matched));
  }
  emit(bound_reports_to_json(reports), g.out);
  return 0;
}

int cmd_experiment(const Globals& g, const std::string& config_path, bool seed_given) {
  auto cfg = parse_experiment_config(read_text_file(config_path));
  if (seed_given) cfg.seed = g.seed;
  if (!g.out.empty()) cfg.output_dir = g.out;
  const auto res = run_experiment(cfg, g.workers);
  for (const auto& f : write_experiment(res, cfg.output_dir)) std::cout << f << '\n';
  return 0;
}

int cmd_accept(const Globals& g, const std::string& only) {
  AcceptanceOptions opts;
  opts.seed = g.seed;
  opts.workers = resolve_workers(g.workers);
  std::stringstream ss(only);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) opts.only.push_back(std::stoi(tok));
  const auto results = run_acceptance(opts, std::cout);
  for (const auto& res : results)
    if (!res.passed) return kExitAcceptance;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homsum: homogeneous sums, invariance bounds and their experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed (default 42)");
  app.add_option("--workers", g.workers, "worker threads (default: HOMSUM_WORKERS or 1)");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--constants", g.constants, "JSON file with the universal constants");

  auto* coeffs = app.add_subcommand("coeffs", "print influence, norms and kappa of a coefficient file");
  std::string coeff_path;
  int quad_clt = 0, dof = 0;
  coeffs->add_option("path", coeff_path, "coefficient file (.json or dense .csv)");
  coeffs->add_option("--quad-clt", quad_clt, "use the quadratic-CLT family of size n instead of a file");
  coeffs->add_option("--m", dof, "chi-squared degrees of freedom for kappa");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sample of a series");
  std::string sim_config;
  simulate->add_option("config", sim_config, "simulation JSON config")->required();

  auto* distance = app.add_subcommand("distance", "distance between samples or to a reference CDF");
  std::string a_path, b_path, cdf = "normal", kind = "ks";
  int dist_k = 1;
  double delta = kDefaultKdeDelta;
  distance->add_option("a", a_path, "sample CSV")->required();
  distance->add_option("b", b_path, "second sample CSV");
  distance->add_option("--cdf", cdf, "reference CDF for one-sample mode: normal or chi2:<m>");
  distance->add_option("--kind", kind, "ks, dk or tv");
  distance->add_option("--k", dist_k, "order of the d_k dictionary");
  distance->add_option("--delta", delta, "kernel parameter of tv_kde");

  auto* bounds = app.add_subcommand("bounds", "evaluate the explicit bounds for a coefficient file");
  std::string bound_path;
  int degree = -1, bound_dof = 1;
  double r = 0.25, eps = 0.2, eta = 1e-2, m3 = 1.0, f3 = 1.0, p_chi = 0.25, x = -1.0;
  bounds->add_option("path", bound_path, "coefficient file")->required();
  bounds->add_option("--degree", degree, "N (default: the family's degree)");
  bounds->add_option("--r", r, "bump radius r");
  bounds->add_option("--epsilon", eps, "density floor epsilon");
  bounds->add_option("--eta", eta, "small-ball level");
  bounds->add_option("--m3", m3, "third moment bound M3");
  bounds->add_option("--f3", f3, "sup norm of f'''");
  bounds->add_option("--p-chi", p_chi, "P(chi = 1) for the Hoeffding tail");
  bounds->add_option("--x", x, "Hoeffding level (default: half the threshold)");
  bounds->add_option("--m", bound_dof, "chi-squared degrees of freedom");

  auto* experiment = app.add_subcommand("experiment", "run quad_clt, chi2 or variance from a JSON config");
  std::string exp_config;
  experiment->add_option("config", exp_config, "experiment JSON config")->required();

  auto* accept = app.add_subcommand("accept", "run the acceptance suite");
  std::string only;
  accept->add_option("--only", only, "comma-separated criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const bool seed_given = app.count("--seed") > 0;
  try {
    if (*coeffs) {
      if (coeff_path.empty() && quad_clt <= 0) throw ConfigError("coeffs: need a path or --quad-clt");
      return cmd_coeffs(g, coeff_path, quad_clt, dof);
    }
    if (*simulate) return cmd_simulate(g, sim_config, seed_given);
    if (*distance) return cmd_distance(g, a_path, b_path, cdf, kind, dist_k, delta);
    if (*bounds) return cmd_bounds(g, bound_path, degree, r, eps, eta, m3, f3, p_chi, x, bound_dof);
    if (*experiment) return cmd_experiment(g, exp_config, seed_given);
    if (*accept) return cmd_accept(g, only);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}
