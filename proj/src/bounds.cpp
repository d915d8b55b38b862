#include "homsum/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "homsum/combinatorics.hpp"
#include "homsum/error.hpp"
#include "homsum/parallel.hpp"
#include "homsum/rng.hpp"

namespace homsum {

using nlohmann::json;

namespace {

void check_degree(const CoefficientFamily& c, int degree) {
  require(degree >= 1, "degree must be >= 1");
  require(degree >= c.degree(), "degree below the family's degree");
}

void check_r_eps(double r, double epsilon) {
  require(r > 0.0 && r < 1.0, "r must lie in (0, 1)");
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
}

void check_constants(const UniversalConstants& k) {
  require(k.p_star >= 1.0, "p_star must be >= 1");
  require(k.scale > 0.0, "C must be > 0");
  require(k.q1 >= 1 && k.q2 >= 1 && k.q3 >= 1 && k.q4 >= 1, "q1..q4 must be >= 1");
  require(k.moment_order >= 1, "moment order p must be >= 1");
}

BoundReport template_report(std::string name, const UniversalConstants& k) {
  BoundReport rep;
  rep.name = std::move(name);
  rep.flags["template"] = true;
  rep.flags["constants_assumed"] = k.assumed;
  rep.inputs["p_star"] = k.p_star;
  rep.inputs["C"] = k.scale;
  rep.inputs["q1"] = k.q1;
  rep.inputs["q2"] = k.q2;
  rep.inputs["q3"] = k.q3;
  rep.inputs["q4"] = k.q4;
  rep.inputs["p"] = k.moment_order;
  return rep;
}

// exp(-a/b) with the convention exp(-inf) = 0 when b = 0 and a > 0.
double exp_ratio(double num, double den) {
  if (den == 0.0) return num > 0.0 ? 0.0 : 1.0;
  return std::exp(-num / den);
}

}  // namespace

UniversalConstants parse_constants_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("constants: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("constants: expected an object");
  UniversalConstants k;
  k.assumed = false;
  try {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string& key = it.key();
      if (key == "p_star") k.p_star = it->get<double>();
      else if (key == "C") k.scale = it->get<double>();
      else if (key == "q1") k.q1 = it->get<int>();
      else if (key == "q2") k.q2 = it->get<int>();
      else if (key == "q3") k.q3 = it->get<int>();
      else if (key == "q4") k.q4 = it->get<int>();
      else if (key == "p") k.moment_order = it->get<int>();
      else if (key == "assumed") k.assumed = it->get<bool>();
      else throw ConfigError("constants: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("constants: ") + e.what());
  }
  try {
    check_constants(k);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("constants: ") + e.what());
  }
  return k;
}

std::string constants_to_json(const UniversalConstants& k) {
  json doc = {{"p_star", k.p_star}, {"C", k.scale}, {"q1", k.q1}, {"q2", k.q2}, {"q3", k.q3},
              {"q4", k.q4},         {"p", k.moment_order}, {"assumed", k.assumed}};
  return doc.dump(2);
}

std::string bound_reports_to_json(const std::vector<BoundReport>& reports) {
  json arr = json::array();
  for (const auto& rep : reports) {
    json inputs = json::object();
    for (const auto& [key, val] : rep.inputs) inputs[key] = val;
    json flags = json::object();
    for (const auto& [key, val] : rep.flags) flags[key] = val;
    arr.push_back({{"name", rep.name}, {"value", rep.value}, {"inputs", inputs}, {"flags", flags}});
  }
  return arr.dump(2);
}

double c_small(int degree, double r, double epsilon) {
  require(degree >= 1, "degree must be >= 1");
  check_r_eps(r, epsilon);
  const double base = epsilon * std::sqrt(r) / std::numbers::sqrt2;
  return std::pow(base, 2.0 * degree) / degree;
}

double c_big(int degree, double r, double epsilon, const UniversalConstants& k, double moment_bound) {
  require(degree >= 1, "degree must be >= 1");
  check_r_eps(r, epsilon);
  check_constants(k);
  require(moment_bound > 0.0, "moment bound must be > 0");
  return k.scale * std::pow(factorial(degree), k.q1) * std::exp(k.q2 * moment_bound) * std::pow(r, -k.q3) *
         std::pow(epsilon, -k.q4);
}

double k1_constant(int dof) {
  require(dof >= 1, "degrees of freedom must be >= 1");
  const double m = dof;
  return std::max(std::sqrt(std::numbers::pi / m), 1.0 / (2.0 * m) + 1.0 / (2.0 * m * m));
}

BoundReport smooth_invariance_bound(const CoefficientFamily& c, int degree, double m3, double f3norm) {
  check_degree(c, degree);
  require(m3 >= 1.0, "M3 must be >= 1");
  require(f3norm >= 0.0, "||f'''|| must be >= 0");
  BoundReport rep;
  rep.name = "smooth_invariance";
  const double norm = total_norm(c, degree);
  const double infl = total_influence(c, degree);
  const double fact = factorial(degree + 1);
  rep.value = fact * fact * std::pow(m3, 4.0 * degree) * f3norm * norm * infl;
  rep.inputs = {{"N", degree}, {"M3", m3}, {"f3norm", f3norm}, {"total_norm", norm}, {"total_influence", infl}};
  rep.flags["template"] = false;
  return rep;
}

double hoeffding_threshold(const CoefficientFamily& c, int degree, double p_chi) {
  check_degree(c, degree);
  require(p_chi > 0.0 && p_chi < 1.0, "p_chi must lie in (0, 1)");
  const double norm = total_norm(c, degree);
  return std::pow(p_chi / 4.0, 2.0 * degree) * norm * norm;
}

BoundReport hoeffding_tail(const CoefficientFamily& c, int degree, double x, double p_chi) {
  const double threshold = hoeffding_threshold(c, degree, p_chi);
  require(x >= 0.0, "x must be >= 0");
  const double norm = total_norm(c, degree);
  const double infl = total_influence(c, degree);
  const double prefactor = 2.0 * std::exp(3.0) / 9.0 * degree;
  const double scale = degree * infl * infl * norm * norm;
  BoundReport rep;
  rep.name = "hoeffding_tail";
  rep.value = prefactor * exp_ratio(x * x, scale);
  if (scale == 0.0) rep.value = prefactor;
  rep.inputs = {{"N", degree}, {"x", x}, {"p_chi", p_chi}, {"threshold", threshold},
                {"total_norm", norm}, {"total_influence", infl}};
  rep.flags["template"] = false;
  rep.flags["threshold_satisfied"] = x <= threshold;
  rep.flags["valid"] = x <= threshold;
  return rep;
}

double squared_series(const CoefficientFamily& c, std::span<const std::uint8_t> chi, int degree) {
  check_degree(c, degree);
  require(chi.size() >= static_cast<std::size_t>(c.support()), "chi shorter than the support");
  double total = 0.0;
  for (int m = 1; m <= c.degree(); ++m) {
    double level = 0.0;
    const auto vals = c.values(m);
    for (std::size_t e = 0; e < vals.size(); ++e) {
      const auto key = c.key(m, e);
      bool on = true;
      for (int j : key) on = on && chi[j - 1] != 0;
      if (on) level += vals[e] * vals[e];
    }
    total += factorial(m) * level;
  }
  return total;
}

BinomialInterval mc_squared_series_tail(const CoefficientFamily& c, int degree, double x, double p_chi,
                                        std::size_t draws, std::uint64_t seed, unsigned workers) {
  check_degree(c, degree);
  require(p_chi > 0.0 && p_chi < 1.0, "p_chi must lie in (0, 1)");
  require(draws >= 1, "draws must be >= 1");
  const int support = c.support();
  std::vector<std::uint8_t> hits(draws, 0);
  parallel_chunks(draws, 256, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint8_t> chi(support);
    for (std::size_t i = begin; i < end; ++i) {
      for (int j = 0; j < support; ++j) chi[j] = RngStream(seed, j + 1, i).bernoulli(p_chi) ? 1 : 0;
      hits[i] = squared_series(c, chi, degree) <= x ? 1 : 0;
    }
  });
  std::size_t count = 0;
  for (auto h : hits) count += h;
  return wilson_interval(count, draws);
}

BoundReport cw_tail_template(const CoefficientFamily& c, int degree, double eta, const UniversalConstants& k,
                             double r, double epsilon, double moment_bound) {
  check_degree(c, degree);
  require(eta > 0.0, "eta must be > 0");
  const double top = level_norm(c, degree);
  const double delta = influence(c, degree);
  const double cb = c_big(degree, r, epsilon, k, moment_bound);
  const double cs = c_small(degree, r, epsilon);
  const double ball = top > 0.0 ? std::pow(eta / (top * top), 1.0 / degree) : HUGE_VAL;
  BoundReport rep = template_report("cw_tail", k);
  rep.value = cb * (ball + exp_ratio(cs * top * top, delta * delta));
  rep.inputs.insert({{"N", degree}, {"eta", eta}, {"r", r}, {"epsilon", epsilon}, {"moment_bound", moment_bound},
                     {"level_norm", top}, {"influence", delta}, {"c_small", cs}, {"c_big", cb}});
  return rep;
}

BoundReport tv_invariance_template(const CoefficientFamily& c, int degree, const UniversalConstants& k, double r,
                                   double epsilon, double moment_bound) {
  check_degree(c, degree);
  const double top = level_norm(c, degree);
  require(top > 0.0, "|c|_N must be > 0");
  const double norm = total_norm(c, degree);
  const double infl = total_influence(c, degree);
  const double cb = c_big(degree + 1, r, epsilon, k, moment_bound);
  const double cs = c_small(degree, r, epsilon);
  const double den = 4.0 + 3.0 * k.p_star * degree;
  const double first = std::pow(infl, 1.0 / den) / std::pow(top, 6.0 * k.p_star / den);
  BoundReport rep = template_report("tv_invariance", k);
  rep.value = cb * (1.0 + norm) * (first + exp_ratio(cs * top * top, infl * infl));
  rep.inputs.insert({{"N", degree}, {"r", r}, {"epsilon", epsilon}, {"moment_bound", moment_bound},
                     {"level_norm", top}, {"total_norm", norm}, {"total_influence", infl},
                     {"influence_exponent", 1.0 / den}, {"norm_exponent", 6.0 * k.p_star / den}});
  return rep;
}

BoundReport chi2_bound(const CoefficientFamily& c, int degree, int dof, KappaForm form) {
  require(degree >= 1 && degree % 2 == 0, "chi2 bound needs an even degree");
  const double kappa = kappa_chi2(c, dof, degree, form);
  BoundReport rep;
  rep.name = "chi2_bound";
  rep.value = k1_constant(dof) * std::sqrt(std::max(kappa, 0.0));
  rep.inputs = {{"N", degree}, {"m", dof}, {"kappa", kappa}, {"K1", k1_constant(dof)}};
  rep.flags["template"] = false;
  rep.flags["variance_matched"] = form == KappaForm::variance_matched;
  return rep;
}

BoundReport dk_to_d0_template(const CoefficientFamily& c, const CoefficientFamily& cbar, int degree, int degree_bar,
                              int k, double eta, const SmoothingInputs& in, const UniversalConstants& consts,
                              double r, double epsilon, double moment_bound) {
  check_degree(c, degree);
  check_degree(cbar, degree_bar);
  require(k >= 1, "k must be >= 1");
  require(eta > 0.0, "eta must be > 0");
  require(in.dk >= 0.0 && in.small_ball_c >= 0.0 && in.small_ball_cbar >= 0.0, "inputs must be >= 0");
  const int joint = std::max(degree, degree_bar);
  const double cb = c_big(joint, r, epsilon, consts, moment_bound);
  const double norms = 1.0 + total_norm(c, degree) + total_norm(cbar, degree_bar);
  const double eta_power = -k * consts.p_star / (k + 1.0);
  const double dk_power = 1.0 / (k + 1.0);
  BoundReport rep = template_report("dk_to_d0", consts);
  rep.value = cb * norms * (std::pow(eta, eta_power) * std::pow(in.dk, dk_power) + in.small_ball_c + in.small_ball_cbar);
  rep.inputs.insert({{"N", degree}, {"M", degree_bar}, {"k", k}, {"eta", eta}, {"dk", in.dk},
                     {"small_ball_c", in.small_ball_c}, {"small_ball_cbar", in.small_ball_cbar},
                     {"eta_exponent", eta_power}, {"dk_exponent", dk_power}, {"c_big", cb}});
  return rep;
}

BoundReport dk_to_d0_optimized(const CoefficientFamily& c, const CoefficientFamily& cbar, int degree, int degree_bar,
                               int k, double dk, const UniversalConstants& consts, double r, double epsilon,
                               double moment_bound) {
  check_degree(c, degree);
  check_degree(cbar, degree_bar);
  require(k >= 1, "k must be >= 1");
  require(dk >= 0.0, "d_k must be >= 0");
  const int joint = std::max(degree, degree_bar);
  const double top = level_norm(c, degree);
  const double top_bar = level_norm(cbar, degree_bar);
  require(top > 0.0 && top_bar > 0.0, "top-level norms must be > 0");
  const double cb = c_big(joint, r, epsilon, consts, moment_bound);
  const double norms = 1.0 + total_norm(c, degree) + total_norm(cbar, degree_bar);
  const double kp = k * consts.p_star * joint;
  const double den = k + 1.0 + kp;
  const double size = std::min(std::pow(top, 2.0 / degree), std::pow(top_bar, 2.0 / degree_bar));
  const double delta = influence(c, degree);
  const double delta_bar = influence(cbar, degree_bar);
  const double tails = exp_ratio(c_small(degree, r, epsilon) * top * top, delta * delta) +
                       exp_ratio(c_small(degree_bar, r, epsilon) * top_bar * top_bar, delta_bar * delta_bar);
  BoundReport rep = template_report("dk_to_d0_optimized", consts);
  rep.value = cb * norms * (std::pow(dk, 1.0 / den) / std::pow(size, kp / den) + tails);
  rep.inputs.insert({{"N", degree}, {"M", degree_bar}, {"k", k}, {"dk", dk}, {"dk_exponent", 1.0 / den},
                     {"c_big", cb}});
  return rep;
}

BoundReport limit_distance_template(const CoefficientFamily& c, int degree, int limit_degree, double d1,
                                    double limsup_total_norm, double liminf_top_norm,
                                    const UniversalConstants& consts, double r, double epsilon,
                                    double moment_bound) {
  check_degree(c, degree);
  require(limit_degree >= 1, "limit degree must be >= 1");
  require(d1 >= 0.0 && limsup_total_norm >= 0.0, "inputs must be >= 0");
  require(liminf_top_norm > 0.0, "liminf of the top norm must be > 0");
  const double top = level_norm(c, degree);
  require(top > 0.0, "|c|_N must be > 0");
  const int joint = std::max(degree, limit_degree);
  const double cb = c_big(joint, r, epsilon, consts, moment_bound);
  const double norms = 1.0 + total_norm(c, degree) + limsup_total_norm;
  const double pj = consts.p_star * joint;
  const double den = 2.0 + pj;
  const double size = std::min(std::pow(top, 2.0 / degree), std::pow(liminf_top_norm, 2.0 / limit_degree));
  const double delta = influence(c, degree);
  BoundReport rep = template_report("limit_distance", consts);
  rep.value = cb * norms *
              (std::pow(d1, 1.0 / den) / std::pow(size, pj / den) +
               exp_ratio(c_small(degree, r, epsilon) * top * top, delta * delta));
  rep.inputs.insert({{"N", degree}, {"M", limit_degree}, {"d1", d1}, {"limsup_total_norm", limsup_total_norm},
                     {"liminf_top_norm", liminf_top_norm}, {"c_big", cb}});
  return rep;
}

}  // namespace homsum
