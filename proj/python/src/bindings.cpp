#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homsum/bounds.hpp"
#include "homsum/coeff_io.hpp"
#include "homsum/coefficients.hpp"
#include "homsum/contraction.hpp"
#include "homsum/distances.hpp"
#include "homsum/error.hpp"
#include "homsum/experiments.hpp"
#include "homsum/laws.hpp"
#include "homsum/series.hpp"

namespace py = pybind11;
using namespace homsum;

namespace {

py::array_t<double> to_array(const std::vector<double>& xs) {
  py::array_t<double> out(static_cast<py::ssize_t>(xs.size()));
  std::copy(xs.begin(), xs.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  const auto buf = a.request();
  if (buf.ndim != 1) throw ArgumentError("expected a one-dimensional array");
  const auto* p = static_cast<const double*>(buf.ptr);
  return std::vector<double>(p, p + buf.shape[0]);
}

py::dict report_dict(const BoundReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["value"] = r.value;
  d["inputs"] = r.inputs;
  d["flags"] = r.flags;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "homogeneous sums: coefficients, laws, series, distances, bounds and experiments";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  // ArgumentError derives from std::invalid_argument, which pybind11 maps to ValueError.

  py::class_<CoefficientFamily>(m, "CoefficientFamily")
      .def(py::init([](int degree, int support, const std::vector<std::pair<std::vector<int>, double>>& entries) {
             std::vector<CoefficientEntry> es;
             for (const auto& [k, v] : entries) es.push_back({k, v});
             return CoefficientFamily(degree, support, std::move(es));
           }),
           py::arg("degree"), py::arg("support"), py::arg("entries"))
      .def_static("from_dense", &CoefficientFamily::from_dense, py::arg("matrix"), py::arg("drop_below") = 0.0)
      .def_property_readonly("degree", &CoefficientFamily::degree)
      .def_property_readonly("support", &CoefficientFamily::support)
      .def("entry_count", &CoefficientFamily::entry_count)
      .def("__call__", [](const CoefficientFamily& c, const std::vector<int>& idx) { return eval_coeff(c, idx); })
      .def("to_json", [](const CoefficientFamily& c) { return coefficients_to_json(c); });

  m.def("parse_coefficients_json", &parse_coefficients_json);
  m.def("load_coefficients", &load_coefficients);
  m.def("level_norm", &level_norm);
  m.def("influence", &influence);
  m.def("total_norm", &total_norm);
  m.def("total_influence", &total_influence);
  m.def("kappa_chi2", [](const CoefficientFamily& c, int dof, int degree, bool variance_matched) {
    return kappa_chi2(c, dof, degree, variance_matched ? KappaForm::variance_matched : KappaForm::printed);
  }, py::arg("c"), py::arg("m"), py::arg("degree"), py::arg("variance_matched") = false);

  py::class_<SplitLaw>(m, "SplitLaw")
      .def_static("normal", &SplitLaw::normal, py::arg("center") = 0.0, py::arg("r") = 0.25, py::arg("epsilon") = 0.2)
      .def_static("uniform", &SplitLaw::uniform, py::arg("center") = 0.0, py::arg("r") = 0.25,
                  py::arg("epsilon") = 0.2)
      .def_static("gauss_mixture", [](double center, double r, double eps) {
        return SplitLaw::gauss_mixture({}, center, r, eps);
      }, py::arg("center") = 0.0, py::arg("r") = 0.25, py::arg("epsilon") = 0.2)
      .def_static("rademacher", &SplitLaw::rademacher, py::arg("center") = 0.0, py::arg("r") = 0.25,
                  py::arg("epsilon") = 0.2)
      .def_static("from_json", &parse_law_config)
      .def("density", &SplitLaw::density)
      .def("bernoulli_p", &SplitLaw::bernoulli_p)
      .def("describe", &SplitLaw::describe);
  m.def("validate_membership", [](const SplitLaw& law) { return membership_to_json(validate_membership(law)); });

  m.def("eval_series", [](const CoefficientFamily& c, const std::vector<double>& z, int degree) {
    return eval_series(c, z, degree);
  });
  m.def("gradient", [](const CoefficientFamily& c, const std::vector<double>& z, int degree) {
    return to_array(gradient(c, z, degree));
  });
  m.def("mc_series", [](const CoefficientFamily& c, const SplitLaw& law, int degree, std::size_t draws,
                        std::uint64_t seed, bool with_lambda, unsigned workers) {
    const auto s = [&] {
      py::gil_scoped_release release;
      return mc_series(c, LawFamily(law, std::max(c.support(), 1)), degree, draws, seed, with_lambda, workers);
    }();
    py::object lambda = py::none();
    if (s.lambda) lambda = to_array(*s.lambda);
    return py::make_tuple(to_array(s.values), lambda);
  }, py::arg("c"), py::arg("law"), py::arg("degree"), py::arg("draws"), py::arg("seed") = 42,
     py::arg("with_lambda") = false, py::arg("workers") = 1);

  m.def("normal_cdf", &normal_cdf);
  m.def("centered_chi2_cdf", &centered_chi2_cdf);
  m.def("kolmogorov_normal", [](py::array_t<double> a) { return kolmogorov_vs_cdf(to_vector(a), normal_cdf); });
  m.def("kolmogorov_two_sample",
        [](py::array_t<double> a, py::array_t<double> b) { return kolmogorov_two_sample(to_vector(a), to_vector(b)); });
  m.def("dk_lower", [](py::array_t<double> a, py::array_t<double> b, int k) {
    const auto x = to_vector(a), y = to_vector(b);
    return dk_lower(x, y, k, default_dictionary(x, y, k)).estimate;
  });
  m.def("tv_kde", [](py::array_t<double> a, py::array_t<double> b, double delta) {
    return tv_kde(to_vector(a), to_vector(b), delta).estimate;
  }, py::arg("a"), py::arg("b"), py::arg("delta") = kDefaultKdeDelta);

  m.def("c_small", &c_small);
  m.def("k1_constant", &k1_constant);
  m.def("hoeffding_threshold", &hoeffding_threshold);
  m.def("hoeffding_tail", [](const CoefficientFamily& c, int degree, double x, double p) {
    return report_dict(hoeffding_tail(c, degree, x, p));
  });
  m.def("chi2_bound", [](const CoefficientFamily& c, int degree, int dof, bool variance_matched) {
    return report_dict(
        chi2_bound(c, degree, dof, variance_matched ? KappaForm::variance_matched : KappaForm::printed));
  }, py::arg("c"), py::arg("degree"), py::arg("m"), py::arg("variance_matched") = false);
  m.def("smooth_invariance_bound", [](const CoefficientFamily& c, int degree, double m3, double f3) {
    return report_dict(smooth_invariance_bound(c, degree, m3, f3));
  });

  m.def("phi_closed", &phi_closed);
  m.def("phi_quadrature", &phi_quadrature, py::arg("x"), py::arg("y"), py::arg("tol") = 1e-12);
  m.def("riemann_phi", [](int n, int i, int j) {
    const auto r = riemann_phi(n, i, j);
    return py::make_tuple(r.sum, r.error_bound);
  });
  m.def("quad_clt_coeffs", &quad_clt_coeffs);
  m.def("chi2_target_coeffs", &chi2_target_coeffs);
  m.def("c_star", &c_star);
  m.def("run_experiment", [](const std::string& config_json, unsigned workers) {
    const auto cfg = parse_experiment_config(config_json);
    const auto res = [&] {
      py::gil_scoped_release release;
      return run_experiment(cfg, workers);
    }();
    py::dict out;
    for (std::size_t c = 0; c < res.columns.size(); ++c) {
      std::vector<double> col;
      for (const auto& row : res.rows) col.push_back(row[c]);
      out[py::str(res.columns[c])] = to_array(col);
    }
    return out;
  }, py::arg("config_json"), py::arg("workers") = 1);
}
