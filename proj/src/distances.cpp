#include "homsum/distances.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "homsum/bump.hpp"
#include "homsum/error.hpp"
#include "homsum/parallel.hpp"
#include "homsum/rng.hpp"
#include "homsum/summary.hpp"

namespace homsum {

std::string distance_to_json(const DistanceReport& report) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["kind"] = report.kind;
  doc["estimate"] = report.estimate;
  if (report.ci) doc["ci"] = {report.ci->first, report.ci->second};
  doc["params"] = report.params;
  return doc.dump(2);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double centered_chi2_cdf(double x, int dof) {
  require(dof >= 1, "centered_chi2_cdf: degrees of freedom must be positive");
  const double y = x + dof;
  if (y <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * y);
}

double kolmogorov_vs_cdf(std::span<const double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), "kolmogorov_vs_cdf: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double best = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    best = std::max({best, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::min(best, 1.0);
}

double kolmogorov_two_sample(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "kolmogorov_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto n = static_cast<double>(x.size());
  const auto m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size()) v = x[i];
    else if (i == x.size()) v = y[j];
    else v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return best;
}

double ks_critical_one_sample(std::size_t n, double alpha) {
  require(n > 0 && alpha > 0.0 && alpha < 1.0, "ks_critical_one_sample: bad arguments");
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha) {
  require(n > 0 && m > 0 && alpha > 0.0 && alpha < 1.0, "ks_critical_two_sample: bad arguments");
  const auto dn = static_cast<double>(n);
  const auto dm = static_cast<double>(m);
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) * std::sqrt((dn + dm) / (dn * dm));
}

double ks_pvalue_two_sample(double statistic, std::size_t n, std::size_t m) {
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  const double root = std::sqrt(ne);
  const double lambda = (root + 0.12 + 0.11 / root) * statistic;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double profile_derivative_sup(TestShape shape, int p) {
  require(p >= 0 && p <= 3, "profile_derivative_sup: order must be 0..3");
  if (p == 0) return 0.5;
  if (shape == TestShape::sigmoid) {
    static const double kSigmoid[] = {0.25, std::sqrt(3.0) / 18.0, 0.125};
    return kSigmoid[p - 1];
  }
  if (p == 1) return std::exp(-0.5);
  if (p == 2) return 1.0;
  const double u2 = 3.0 - std::sqrt(6.0);
  return std::sqrt(u2) * std::sqrt(6.0) * std::exp(-0.5 * u2);
}

double TestFunction::operator()(double x) const {
  const double u = (x - shift) / scale;
  const double g = shape == TestShape::sigmoid ? 1.0 / (1.0 + std::exp(-u)) - 0.5 : std::exp(-0.5 * u * u) - 0.5;
  return weight * g;
}

double TestFunction::norm(int k) const {
  require(k >= 0 && k <= 3, "test function norm: order must be 0..3");
  double total = 0.0;
  for (int p = 0; p <= k; ++p) total += profile_derivative_sup(shape, p) / std::pow(scale, p);
  return std::abs(weight) * total;
}

std::vector<TestFunction> normalize_dictionary(std::vector<TestFunction> dictionary, int k) {
  for (auto& f : dictionary) {
    f.weight = 1.0;
    f.weight = 1.0 / f.norm(k);
  }
  return dictionary;
}

std::vector<TestFunction> default_dictionary(std::span<const double> a, std::span<const double> b, int k) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  require(!pooled.empty(), "default_dictionary: empty samples");
  std::sort(pooled.begin(), pooled.end());
  double sd = std::sqrt(sample_variance(pooled));
  if (!(sd > 0.0)) sd = 1.0;
  std::vector<TestFunction> out;
  for (TestShape shape : {TestShape::sigmoid, TestShape::bump}) {
    for (int q = 0; q < 8; ++q) {
      const auto at = static_cast<std::size_t>((q + 0.5) / 8.0 * static_cast<double>(pooled.size() - 1));
      for (int s = 0; s < 8; ++s) out.push_back({shape, pooled[at], sd * std::pow(2.0, s - 4), 1.0});
    }
  }
  return normalize_dictionary(std::move(out), k);
}

DistanceReport dk_lower(std::span<const double> a, std::span<const double> b, int k,
                        const std::vector<TestFunction>& dictionary, unsigned workers) {
  require(!a.empty() && !b.empty(), "dk_lower: empty sample");
  for (const auto& f : dictionary)
    require(f.norm(k) <= 1.0 + 1e-12, "dk_lower: dictionary member has norm above 1");
  std::vector<double> gaps(dictionary.size(), 0.0);
  parallel_chunks(dictionary.size(), 1, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> fa(a.size());
    std::vector<double> fb(b.size());
    for (std::size_t d = begin; d < end; ++d) {
      const auto& f = dictionary[d];
      std::transform(a.begin(), a.end(), fa.begin(), f);
      std::transform(b.begin(), b.end(), fb.begin(), f);
      gaps[d] = std::abs(sample_mean(fa) - sample_mean(fb));
    }
  });
  DistanceReport rep;
  rep.kind = "d_k";
  rep.estimate = gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end());
  rep.params["k"] = k;
  rep.params["dictionary_size"] = static_cast<double>(dictionary.size());
  return rep;
}

double smoothing_kernel(double z, double delta) {
  static const double kMass = mass_m(1.0);
  return psi_r(1.0, z * z / delta) / (kMass * std::sqrt(delta));
}

double kde_value(std::span<const double> sorted_sample, double x, double delta) {
  const double reach = std::sqrt(2.0 * delta);
  auto it = std::lower_bound(sorted_sample.begin(), sorted_sample.end(), x - reach);
  double sum = 0.0;
  for (; it != sorted_sample.end() && *it <= x + reach; ++it) sum += smoothing_kernel(x - *it, delta);
  return sum / static_cast<double>(sorted_sample.size());
}

namespace {

void accumulate_kde(std::span<const double> sample, double lo, double step, double delta, std::vector<double>& grid) {
  const double reach = std::sqrt(2.0 * delta);
  const double inv = 1.0 / static_cast<double>(sample.size());
  const auto last = static_cast<long>(grid.size()) - 1;
  for (double x : sample) {
    const long first = std::max(0L, static_cast<long>(std::ceil((x - reach - lo) / step)));
    const long stop = std::min(last, static_cast<long>(std::floor((x + reach - lo) / step)));
    for (long g = first; g <= stop; ++g)
      grid[static_cast<std::size_t>(g)] += inv * smoothing_kernel(lo + static_cast<double>(g) * step - x, delta);
  }
}

}  // namespace

DistanceReport tv_kde(std::span<const double> a, std::span<const double> b, double delta) {
  require(delta > 0.0, "tv_kde: bandwidth must be positive");
  require(!a.empty() && !b.empty(), "tv_kde: empty sample");
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double pad = 4.0 * std::sqrt(delta);
  const double lo = std::min(*amin, *bmin) - pad;
  const double hi = std::max(*amax, *bmax) + pad;
  const double target_step = std::sqrt(delta) / 8.0;
  const double wanted = std::ceil((hi - lo) / target_step) + 1.0;
  require(wanted < 1e8, "tv_kde: bandwidth too small for the sample range");
  const auto points = std::max(kKdeMinGridPoints, static_cast<std::size_t>(wanted));
  const double step = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> fa(points, 0.0);
  std::vector<double> fb(points, 0.0);
  accumulate_kde(a, lo, step, delta, fa);
  accumulate_kde(b, lo, step, delta, fb);
  std::vector<double> diff(points);
  for (std::size_t g = 0; g < points; ++g) {
    const double w = (g == 0 || g + 1 == points) ? 0.5 : 1.0;
    diff[g] = w * std::abs(fa[g] - fb[g]);
  }
  DistanceReport rep;
  rep.kind = "tv_kde";
  rep.estimate = std::min(1.0, 0.5 * step * pairwise_sum(diff));
  rep.params["delta"] = delta;
  rep.params["grid_points"] = static_cast<double>(points);
  return rep;
}

std::pair<double, double> bootstrap_interval(
    std::span<const double> a, std::span<const double> b,
    const std::function<double(std::span<const double>, std::span<const double>)>& statistic,
    std::size_t replicates, std::uint64_t seed, double level) {
  require(replicates >= 2 && level > 0.0 && level < 1.0, "bootstrap_interval: bad arguments");
  std::vector<double> stats(replicates);
  std::vector<double> ra(a.size());
  std::vector<double> rb(b.size());
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    RngStream rng(seed, rep, 0);
    for (auto& v : ra) v = a[std::min(a.size() - 1, static_cast<std::size_t>(rng.uniform() * a.size()))];
    for (auto& v : rb) v = b[std::min(b.size() - 1, static_cast<std::size_t>(rng.uniform() * b.size()))];
    stats[rep] = statistic(ra, rb);
  }
  std::sort(stats.begin(), stats.end());
  const double tail = 0.5 * (1.0 - level);
  auto pick = [&](double q) { return stats[static_cast<std::size_t>(q * static_cast<double>(replicates - 1))]; };
  return {pick(tail), pick(1.0 - tail)};
}

}  // namespace homsum
