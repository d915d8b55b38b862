#include "homsum/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "homsum/bounds.hpp"
#include "homsum/combinatorics.hpp"
#include "homsum/distances.hpp"
#include "homsum/experiments.hpp"
#include "homsum/rng.hpp"
#include "homsum/series.hpp"

namespace homsum {

namespace {

std::string fmt(const char* pattern, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

template <class... Args>
std::string fmtv(const char* pattern, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) return false;
  return true;
}

std::string list(const std::vector<double>& xs, const char* pattern = "%.4g") {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(pattern, xs[i]);
  return s;
}

// canonical keys drawn without replacement, `count` per level at most
CoefficientFamily sparse_family(std::mt19937_64& gen, int degree, int support, int count) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<CoefficientEntry> entries;
  for (int m = 1; m <= degree; ++m) {
    std::set<std::vector<int>> keys;
    for (int tries = 0; tries < 20 * count && static_cast<int>(keys.size()) < count; ++tries) {
      std::vector<int> pool(static_cast<std::size_t>(support));
      for (int k = 0; k < support; ++k) pool[k] = k + 1;
      std::shuffle(pool.begin(), pool.end(), gen);
      std::vector<int> key(pool.begin(), pool.begin() + m);
      std::sort(key.begin(), key.end());
      keys.insert(key);
    }
    for (const auto& key : keys) entries.push_back({key, normal(gen)});
  }
  return CoefficientFamily(degree, support, std::move(entries));
}

CoefficientFamily dense_random_family(std::mt19937_64& gen, int degree, int support, double density) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<CoefficientEntry> entries;
  for (int m = 1; m <= degree; ++m) {
    std::vector<int> key(static_cast<std::size_t>(m));
    std::function<void(int, int)> rec = [&](int pos, int start) {
      if (pos == m) {
        if (coin(gen) < density) entries.push_back({key, normal(gen)});
        return;
      }
      for (int v = start; v <= support; ++v) {
        key[pos] = v;
        rec(pos + 1, v + 1);
      }
    };
    rec(0, 1);
  }
  return CoefficientFamily(degree, support, std::move(entries));
}

// sum over every ordered tuple, repeats included (they contribute 0)
double brute_series(const CoefficientFamily& c, const std::vector<double>& z, int degree) {
  double total = 0.0;
  for (int m = 1; m <= degree; ++m) {
    std::vector<int> t(static_cast<std::size_t>(m), 1);
    for (;;) {
      double term = eval_coeff(c, t);
      for (int k : t) term *= z[k - 1];
      total += term;
      int p = m - 1;
      while (p >= 0 && t[p] == c.support()) t[p--] = 1;
      if (p < 0) break;
      ++t[p];
    }
  }
  return total;
}

std::string bytes_of(const std::vector<double>& xs) {
  std::string s;
  char buf[40];
  for (double v : xs) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    s += buf;
  }
  return s;
}

std::string bytes_of(const ExperimentResult& r) {
  std::string s;
  for (const auto& row : r.rows) s += bytes_of(row);
  return s;
}

class Suite {
 public:
  Suite(const AcceptanceOptions& opts, std::ostream& out) : opts_(opts), out_(out) {}

  void run(int id, const std::string& title, const std::function<void(CriterionResult&)>& body) {
    if (!opts_.only.empty() && std::find(opts_.only.begin(), opts_.only.end(), id) == opts_.only.end()) return;
    CriterionResult r;
    r.id = id;
    r.title = title;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out_ << "criterion " << id << " [" << (r.passed ? "PASS" : "FAIL") << "] " << title << ": " << r.detail
         << fmt(" (%.1f s)", r.seconds) << '\n';
    for (const auto& line : r.info) out_ << "    info: " << line << '\n';
    out_.flush();
    results_.push_back(std::move(r));
  }

  std::vector<CriterionResult> results() const { return results_; }
  std::uint64_t seed() const { return opts_.seed; }
  unsigned workers() const { return opts_.workers; }

 private:
  const AcceptanceOptions& opts_;
  std::ostream& out_;
  std::vector<CriterionResult> results_;
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& out) {
  Suite suite(opts, out);
  const std::uint64_t seed = opts.seed;
  const unsigned workers = opts.workers;

  // Samples shared between criteria 7, 8 and 11.
  std::vector<std::vector<double>> normal_clt_samples;
  ExperimentResult normal_clt;
  bool have_normal_clt = false;
  double normal_clt_seconds = 0.0;
  const auto ensure_normal_clt = [&] {
    if (have_normal_clt) return;
    const auto t0 = std::chrono::steady_clock::now();
    QuadCltConfig cfg;
    cfg.seed = seed;
    cfg.law = SplitLaw::normal();
    normal_clt = run_quadratic_clt(cfg, workers, &normal_clt_samples);
    normal_clt_seconds = elapsed_since(t0);
    have_normal_clt = true;
  };

  suite.run(1, "closed form of phi vs quadrature", [&](CriterionResult& r) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(derive_seed(seed, 101));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int pairs = 0;
    while (pairs < 100) {
      const double x = u(gen), y = u(gen);
      if (std::abs(x - y) < 0.05 || x <= 0.0 || y <= 0.0) continue;
      worst = std::max(worst, std::abs(phi_closed(x, y) - phi_quadrature(x, y)));
      ++pairs;
    }
    const double secs = elapsed_since(t0);
    r.passed = worst <= 1e-8 && secs < 5.0;
    r.detail = fmtv("max |closed - quadrature| = %.3g over 100 pairs (tol 1e-8), %.2f s (limit 5 s)", worst, secs);
  });

  suite.run(2, "Riemann-sum error bound for phi", [&](CriterionResult& r) {
    const auto t0 = std::chrono::steady_clock::now();
    long checked = 0, violations = 0;
    double worst_ratio = 0.0;
    for (int n : {128, 512}) {
      for (int i = 1; i <= n; ++i)
        for (int j = i + 4; j <= n; ++j) {
          const auto rs = riemann_phi(n, i, j);
          const double gap = std::abs(phi_closed(static_cast<double>(i) / n, static_cast<double>(j) / n) - rs.sum);
          worst_ratio = std::max(worst_ratio, gap / rs.error_bound);
          violations += gap > rs.error_bound;
          ++checked;
        }
    }
    const double secs = elapsed_since(t0);
    r.passed = violations == 0 && secs < 30.0;
    r.detail = fmtv("%ld pairs, %ld violations, max gap/bound = %.3g, %.1f s (limit 30 s)", checked, violations,
                    worst_ratio, secs);
  });

  suite.run(3, "deterministic coefficient inequalities", [&](CriterionResult& r) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    for (int n : {10, 100, 1000}) {
      const double d = influence(quad_clt_coeffs(n), 2);
      const bool pass = d * d <= 2.0 / n;
      ok = ok && pass;
      r.info.push_back(fmtv("n=%d: delta_2^2 = %.4g <= 2/n = %.4g %s", n, d * d, 2.0 / n, pass ? "ok" : "VIOLATED"));
    }
    for (int n : {100, 1000}) {
      const double ln = std::log(static_cast<double>(n));
      const double norm = std::pow(level_norm(quad_clt_coeffs(n), 2), 2);
      const bool pass = 1.0 - 1.0 / ln <= norm && norm <= 1.0 + 1.0 / ln;
      ok = ok && pass;
      r.info.push_back(fmtv("n=%d: |c_n|_2^2 = %.5f in [%.5f, %.5f] %s", n, norm, 1.0 - 1.0 / ln, 1.0 + 1.0 / ln,
                            pass ? "ok" : "VIOLATED"));
    }
    for (int n : {200, 1000}) {
      const auto rows = row_logsum_check(n);
      ok = ok && rows.all_pass;
      r.info.push_back(fmtv("n=%d: row log-sum bounds %s for all %d rows", n, rows.all_pass ? "hold" : "FAIL", n - 1));
    }
    for (int n : {512, 1024}) {
      const auto f = abar_facts(n);
      ok = ok && f.contraction_lower_pass;
      r.info.push_back(fmtv("n=%d: sum (c_n x_1 c_n)^2 = %.5g >= c*/(4 ln^2 n) = %.5g %s; statement proviso %s, "
                            "proof proviso %s",
                            n, f.contraction_sq, f.contraction_lower, f.contraction_lower_pass ? "ok" : "VIOLATED",
                            f.statement_proviso ? "holds" : "fails", f.proof_proviso ? "holds" : "fails"));
    }
    const double secs = elapsed_since(t0);
    r.passed = ok && secs < 60.0;
    r.detail = fmtv("c* = %.10f, all explicit inequalities %s, %.1f s (limit 60 s)", c_star(), ok ? "hold" : "FAIL",
                    secs);
  });

  suite.run(4, "iterated Hoeffding tail soundness", [&](CriterionResult& r) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(derive_seed(seed, 104));
    std::uniform_int_distribution<int> support_dist(4, 40);
    int failures = 0;
    double worst_margin = HUGE_VAL;
    double max_mc = 0.0;
    for (int t = 0; t < 50; ++t) {
      const int degree = 1 + t % 3;
      const double p = t % 2 ? 0.4 : 0.2;
      const int support = std::max(support_dist(gen), degree);
      const auto c = sparse_family(gen, degree, support, 12);
      const double x = 0.5 * hoeffding_threshold(c, degree, p);
      const auto tail = hoeffding_tail(c, degree, x, p);
      const auto mc = mc_squared_series_tail(c, degree, x, p, 100000, derive_seed(seed, 1000 + t), workers);
      const double margin = tail.value + 3.0 * mc.standard_error - mc.estimate;
      worst_margin = std::min(worst_margin, margin);
      max_mc = std::max(max_mc, mc.estimate);
      failures += margin < 0.0 || !tail.flags.at("valid");
    }
    const double secs = elapsed_since(t0);
    r.passed = failures == 0 && secs < 300.0;
    r.detail = fmtv("50 families, %d violations, min (bound + 3 SE - estimate) = %.4g, %.1f s (limit 300 s)",
                    failures, worst_margin, secs);
    r.info.push_back(fmtv("largest MC probability %.4g; the tail bound exceeds 1 at these x, so the check is "
                          "satisfied with room", max_mc));
  });

  suite.run(5, "splitting representation", [&](CriterionResult& r) {
    bool ok = true;
    std::string detail;
    const std::size_t draws = 100000;
    const SplitLaw laws[] = {SplitLaw::normal(0.0, 0.25, 0.2), SplitLaw::uniform(0.0, 0.25, 0.2),
                             SplitLaw::gauss_mixture({}, 0.0, 0.25, 0.2)};
    int index = 0;
    for (const auto& law : laws) {
      const LawFamily fam(law, 1);
      const auto direct = sample_batch(fam, draws, derive_seed(seed, 500 + index), false, workers);
      const auto split = sample_batch(fam, draws, derive_seed(seed, 600 + index), true, workers);
      const std::span<const double> a(direct.values.data(), draws), b(split.values.data(), draws);
      const double ks = kolmogorov_two_sample(a, b);
      const double pv = ks_pvalue_two_sample(ks, draws, draws);
      ok = ok && pv > 0.001;
      detail += fmtv("%s%s KS=%.4g p=%.3g", index ? "; " : "", to_string(law.kind()).c_str(), ks, pv);
      ++index;
    }
    r.info.push_back("rademacher has no density and cannot be split; it is not part of this check");
    r.passed = ok;
    r.detail = detail + " (alpha 0.001)";
  });

  suite.run(6, "series engine oracles", [&](CriterionResult& r) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(derive_seed(seed, 106));
    std::normal_distribution<double> nd(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    double worst_value = 0.0, worst_grad = 0.0, worst_lambda = 0.0;
    for (int t = 0; t < 100; ++t) {
      const int degree = 1 + t % 3;
      const int support = 2 + t % 5;
      const auto c = dense_random_family(gen, degree, support, 0.6);
      std::vector<double> z(support);
      for (auto& v : z) v = nd(gen);
      const double s = eval_series(c, z, degree);
      const double ref = brute_series(c, z, degree);
      worst_value = std::max(worst_value, std::abs(s - ref) / std::max(1.0, std::abs(ref)));
      if (degree <= 2)
        worst_value = std::max(worst_value, std::abs(DenseQuadratic(c, degree).eval(z) - ref) / std::max(1.0, std::abs(ref)));
      const auto grad = gradient(c, z, degree);
      std::vector<std::uint8_t> chi(support);
      for (auto& x : chi) x = coin(gen);
      double recomposed = 0.0;
      for (int j = 1; j <= support; ++j) {
        const double h = 1e-5;
        auto zp = z, zm = z;
        zp[j - 1] += h;
        zm[j - 1] -= h;
        const double fd = (brute_series(c, zp, degree) - brute_series(c, zm, degree)) / (2 * h);
        const double g = grad[j - 1];
        worst_grad = std::max(worst_grad, std::abs(fd - g) / std::max(1.0, std::abs(g)));
        if (chi[j - 1]) recomposed += g * g;
      }
      const double lam = covariance_lambda(c, z, chi, degree);
      worst_lambda = std::max(worst_lambda, std::abs(lam - recomposed) / std::max(1.0, recomposed));
    }
    const double secs = elapsed_since(t0);
    r.passed = worst_value <= 1e-12 && worst_grad <= 1e-6 && worst_lambda <= 1e-12 && secs < 30.0;
    r.detail = fmtv("100 instances: value err %.2g (tol 1e-12), gradient vs finite differences %.2g (tol 1e-6), "
                    "lambda recomposition %.2g (tol 1e-12), %.1f s",
                    worst_value, worst_grad, worst_lambda, secs);
  });

  suite.run(7, "isometry at n=256", [&](CriterionResult& r) {
    ensure_normal_clt();
    const std::size_t row = 1;  // n = 256
    const double var = normal_clt.at(row, "variance");
    const double se = normal_clt.at(row, "variance_se");
    const double target = normal_clt.at(row, "variance_target");
    r.passed = std::abs(var - target) <= 5.0 * se;
    r.detail = fmtv("sample variance %.5f vs 2!|c_n|_2^2 = %.5f, |gap| = %.2f SE (limit 5)", var, target,
                    std::abs(var - target) / se);
    const double literal = 0.5 * target;
    r.info.push_back(fmtv("against |c_n|_2^2 = %.5f alone the gap is %.0f SE: the ordered double sum has variance "
                          "2|c_n|_2^2", literal, std::abs(var - literal) / se));
  });

  suite.run(8, "quadratic CLT trend", [&](CriterionResult& r) {
    ensure_normal_clt();
    const auto t0 = std::chrono::steady_clock::now();
    QuadCltConfig cfg;
    cfg.seed = seed;
    cfg.law = SplitLaw::uniform();
    const auto uniform = run_quadratic_clt(cfg, workers);
    const double secs = normal_clt_seconds + elapsed_since(t0);
    bool ok = secs < 180.0;
    std::string detail;
    for (const ExperimentResult* res : {static_cast<const ExperimentResult*>(&normal_clt), &uniform}) {
      std::vector<double> scaled, raw;
      for (std::size_t i = 0; i < res->rows.size(); ++i) {
        scaled.push_back(res->at(i, "ks_scaled"));
        raw.push_back(res->at(i, "ks_raw"));
      }
      const bool trend = strictly_decreasing(scaled);
      const bool level = scaled.back() <= 0.05;
      ok = ok && trend && level;
      const std::string name = res == &normal_clt ? "normal" : "uniform";
      detail += fmtv("%s%s: KS(S_n/sqrt2, Phi) = [%s] %s, final %s 0.05", detail.empty() ? "" : "; ", name.c_str(),
                     list(scaled).c_str(), trend ? "decreasing" : "NOT decreasing", level ? "<=" : ">");
      r.info.push_back(fmtv("%s: KS(S_n, Phi) unscaled = [%s]", name.c_str(), list(raw).c_str()));
      std::vector<double> dk, tv;
      for (std::size_t i = 0; i < res->rows.size(); ++i) {
        dk.push_back(res->at(i, "dk1_scaled"));
        tv.push_back(res->at(i, "tv_kde_scaled"));
      }
      r.info.push_back(fmtv("%s: dk_lower(k=1) = [%s], tv_kde = [%s]", name.c_str(), list(dk).c_str(),
                            list(tv).c_str()));
    }
    r.info.push_back("the sum over ordered pairs has variance -> 2, so S_n is compared with N(0,1) after division "
                     "by sqrt2; the 0.05 level at n=1024 is out of reach with the slow log-rate convergence");
    r.passed = ok;
    r.detail = detail + fmt(", %.0f s (limit 180 s)", secs);
  });

  suite.run(9, "chi-squared example", [&](CriterionResult& r) {
    Chi2Config cfg;
    cfg.seed = seed;
    cfg.m = 2;
    cfg.l_list = {8, 16, 32, 64};
    const auto res = run_chi2(cfg, workers);
    bool var_ok = true, bound_ok = true, printed_ok = true;
    std::vector<double> kappa, kappa_printed, ks, dk, bound;
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      var_ok = var_ok && std::abs(res.at(i, "variance") - res.at(i, "variance_target")) <= 5.0 * res.at(i, "variance_se");
      kappa.push_back(res.at(i, "kappa_matched"));
      kappa_printed.push_back(res.at(i, "kappa_printed"));
      ks.push_back(res.at(i, "ks"));
      dk.push_back(res.at(i, "dk1"));
      bound.push_back(res.at(i, "bound_matched"));
      bound_ok = bound_ok && res.at(i, "dk1") <= res.at(i, "bound_matched");
      printed_ok = printed_ok && res.at(i, "dk1") <= res.at(i, "bound_printed");
      r.info.push_back(fmtv("L=%g: var %.4f (target %.4f, SE %.4f), KS %.4f, dk1 %.4f, bound %.4f (printed form %.4f)",
                            res.at(i, "L"), res.at(i, "variance"), res.at(i, "variance_target"),
                            res.at(i, "variance_se"), res.at(i, "ks"), res.at(i, "dk1"), res.at(i, "bound_matched"),
                            res.at(i, "bound_printed")));
    }
    const bool kappa_ok = strictly_decreasing(kappa);
    const bool ks_ok = strictly_decreasing(ks);
    r.info.push_back(fmtv("printed-form kappa = [%s], %s; its bound %s every dk1", list(kappa_printed).c_str(),
                          strictly_decreasing(kappa_printed) ? "decreasing" : "not decreasing",
                          printed_ok ? "dominates" : "does NOT dominate"));
    r.passed = var_ok && kappa_ok && ks_ok && bound_ok;
    r.detail = fmtv("variance within 5 SE %s; kappa = [%s] %s; KS = [%s] %s; dk1 <= K1 sqrt(kappa) %s",
                    var_ok ? "yes" : "NO", list(kappa).c_str(), kappa_ok ? "decreasing" : "NOT decreasing",
                    list(ks).c_str(), ks_ok ? "decreasing" : "NOT decreasing", bound_ok ? "at every L" : "VIOLATED");
  });

  suite.run(10, "variance estimator", [&](CriterionResult& r) {
    VarianceConfig cfg;
    cfg.seed = seed;
    std::vector<double> reference;
    const auto res = run_variance_experiment(cfg, workers, &reference);
    std::vector<double> ks;
    double gap = 0.0;
    bool facts = true;
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      ks.push_back(res.at(i, "ks_two_sample"));
      gap = std::max(gap, res.at(i, "max_path_gap"));
      facts = facts && res.at(i, "norm_lower_pass") == 1.0 && res.at(i, "contraction_lower_pass") == 1.0;
      r.info.push_back(fmtv("n=%g: KS %.4f, tv_kde %.4f, mean %.4f, variance %.3f", res.at(i, "n"),
                            res.at(i, "ks_two_sample"), res.at(i, "tv_kde"), res.at(i, "mean"), res.at(i, "variance")));
    }
    const auto coarse = i2_phi_reference(256, cfg.draws, derive_seed(seed, 3), workers);
    const double ks_grid = kolmogorov_two_sample(coarse, reference);
    const double crit = ks_critical_two_sample(coarse.size(), reference.size(), 0.01);
    const bool trend = strictly_decreasing(ks);
    r.passed = gap <= 1e-10 && trend && ks.back() <= 0.06 && ks_grid < crit;
    r.detail = fmtv("two-path gap %.2g (tol 1e-10); KS(V_n, I2) = [%s] %s, final %s 0.06; grid 256 vs 512 KS %.4f "
                    "vs critical %.4f",
                    gap, list(ks).c_str(), trend ? "decreasing" : "NOT decreasing", ks.back() <= 0.06 ? "<=" : ">",
                    ks_grid, crit);
    r.info.push_back(fmtv("explicit cbar_n lower bounds %s at every n", facts ? "hold" : "FAIL"));
  });

  suite.run(11, "small-ball shape at n=256", [&](CriterionResult& r) {
    const auto c = quad_clt_coeffs(256);
    const auto sample =
        mc_series(c, LawFamily(SplitLaw::normal(), 256), 2, 100000, derive_seed(seed, 111), true, workers);
    std::vector<double> etas, probs;
    for (int k = 0; k <= 4; ++k) etas.push_back(1e-3 * std::pow(10.0, 0.5 * k));
    for (double eta : etas) probs.push_back(small_ball_from_lambda(*sample.lambda, eta).interval.estimate);
    bool monotone = true;
    for (std::size_t i = 1; i < probs.size(); ++i) monotone = monotone && probs[i] >= probs[i - 1];
    std::vector<double> slopes;
    bool slope_ok = true;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i - 1] <= 0.0 || probs[i] <= 0.0) {
        slopes.push_back(NAN);
        slope_ok = false;
        continue;
      }
      const double s = std::log(probs[i] / probs[i - 1]) / std::log(etas[i] / etas[i - 1]);
      slopes.push_back(s);
      slope_ok = slope_ok && s >= 0.35;
    }
    r.passed = monotone;
    r.detail = fmtv("P(lambda_2 <= eta) = [%s] %s in eta", list(probs).c_str(), monotone ? "monotone" : "NOT monotone");
    r.info.push_back(fmtv("log-log secant slopes [%s]: %s", list(slopes, "%.3f").c_str(),
                          slope_ok ? "all >= 0.35" : "below 0.35 or undefined (investigation trigger, not a failure)"));
    auto lam = *sample.lambda;
    r.info.push_back(fmtv("lambda_2: mean %.4f, min %.4g", sample_mean(lam), *std::min_element(lam.begin(), lam.end())));
    std::sort(lam.begin(), lam.end());
    const double q1 = lam[lam.size() / 1000], q2 = lam[lam.size() / 100], q3 = lam[lam.size() / 10];
    r.info.push_back(fmtv("where the lower tail has mass: eta = %.3f, %.3f, %.3f (0.1%%, 1%%, 10%% quantiles) give "
                          "slopes %.2f, %.2f",
                          q1, q2, q3, std::log(10.0) / std::log(q2 / q1), std::log(10.0) / std::log(q3 / q2)));
  });

  suite.run(12, "determinism across worker counts", [&](CriterionResult& r) {
    const std::size_t draws = 4096;
    const unsigned many = std::max(4u, workers);
    int checks = 0, mismatches = 0;
    const auto compare = [&](const std::string& a, const std::string& b) {
      ++checks;
      mismatches += a != b;
    };
    const auto c = quad_clt_coeffs(256);
    const LawFamily fam(SplitLaw::normal(), 256);
    const auto s1 = mc_series(c, fam, 2, draws, seed, true, 1);
    const auto s2 = mc_series(c, fam, 2, draws, seed, true, many);
    const auto s3 = mc_series(c, fam, 2, draws, seed, true, 1);
    compare(bytes_of(s1.values) + bytes_of(*s1.lambda), bytes_of(s2.values) + bytes_of(*s2.lambda));
    compare(bytes_of(s1.values), bytes_of(s3.values));
    const auto sparse = quad_clt_coeffs(12);
    const CoefficientFamily cubic(3, 6, {{{1, 2, 3}, 0.5}, {{2, 4, 6}, -1.0}, {{1}, 0.3}});
    compare(bytes_of(mc_series(cubic, LawFamily(SplitLaw::uniform(), 6), 3, draws, seed, true, 1).values),
            bytes_of(mc_series(cubic, LawFamily(SplitLaw::uniform(), 6), 3, draws, seed, true, many).values));
    Chi2Config chi;
    chi.seed = seed;
    chi.draws = draws;
    chi.l_list = {8, 16};
    compare(bytes_of(run_chi2(chi, 1)), bytes_of(run_chi2(chi, many)));
    QuadCltConfig q;
    q.seed = seed;
    q.draws = draws;
    q.n_list = {64, 128};
    compare(bytes_of(run_quadratic_clt(q, 1)), bytes_of(run_quadratic_clt(q, many)));
    compare(bytes_of(variance_estimator_sample(64, SplitLaw::gauss_mixture(), draws, seed, 1).sample.values),
            bytes_of(variance_estimator_sample(64, SplitLaw::gauss_mixture(), draws, seed, many).sample.values));
    compare(bytes_of(i2_phi_reference(64, draws, seed, 1)), bytes_of(i2_phi_reference(64, draws, seed, many)));
    const auto h1 = mc_squared_series_tail(sparse, 2, 0.1, 0.4, draws, seed, 1);
    const auto h2 = mc_squared_series_tail(sparse, 2, 0.1, 0.4, draws, seed, many);
    compare(bytes_of({h1.estimate}), bytes_of({h2.estimate}));
    const auto b1 = sample_batch(LawFamily(SplitLaw::gauss_mixture(), 3), draws, seed, true, 1);
    const auto b2 = sample_batch(LawFamily(SplitLaw::gauss_mixture(), 3), draws, seed, true, many);
    compare(bytes_of(std::vector<double>(b1.values.data(), b1.values.data() + b1.values.size())),
            bytes_of(std::vector<double>(b2.values.data(), b2.values.data() + b2.values.size())));
    const auto& a = s1.values;
    const auto dict = default_dictionary(a, s3.values, 2);
    compare(bytes_of({dk_lower(a, s2.values, 2, dict, 1).estimate}),
            bytes_of({dk_lower(a, s2.values, 2, dict, many).estimate}));
    r.passed = mismatches == 0;
    r.detail = fmtv("%d output comparisons (workers 1 vs %u, and a same-seed rerun), %d mismatches", checks, many,
                    mismatches);
    r.info.push_back(fmt("comparisons use %.0f draws per run; chunk boundaries and RNG streams do not depend on the "
                         "worker count, so full-size runs follow the same code path",
                         static_cast<double>(draws)));
  });

  const auto results = suite.results();
  int passed = 0;
  for (const auto& res : results) passed += res.passed;
  out << "acceptance: " << passed << "/" << results.size() << " criteria passed\n";
  return results;
}

}  // namespace homsum
