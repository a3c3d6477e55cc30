#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include "rhg/algebra.hpp"
#include "rhg/cli.hpp"
#include "rhg/error.hpp"
#include "rhg/weyl_G.hpp"

namespace py = pybind11;

namespace {

rhg::OrthFamily family(int n, int m) { return rhg::build_family(n, m); }

py::tuple element_tuple(const rhg::GroupElement& a) { return py::make_tuple(a.q, a.p, a.t); }

rhg::GroupElement element_from(const py::tuple& t) {
  if (t.size() != 3) throw py::value_error("group element is a (q, p, t) tuple");
  return rhg::GroupElement(t[0].cast<std::vector<double>>(), t[1].cast<std::vector<double>>(),
                           t[2].cast<std::vector<double>>());
}

}  // namespace

PYBIND11_MODULE(_rhg, m) {
  m.doc() = "Harmonic analysis on the reduced Heisenberg group with multidimensional center";

  static py::exception<rhg::Error> error(m, "RhgError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const rhg::Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.def("suite_names", &rhg::suite_names);
  m.def(
      "run_suite_json",
      [](const std::string& name, const std::string& config) {
        const auto cfg = rhg::config_from_json(config);
        py::gil_scoped_release release;
        return rhg::report_to_json(rhg::run_suite(name, cfg));
      },
      py::arg("name"), py::arg("config") = "{}");
  m.def(
      "run_invariants_json",
      [](const std::string& config) { return rhg::report_to_json(rhg::run_invariants(rhg::config_from_json(config))); },
      py::arg("config") = "{}");

  m.def(
      "multiply",
      [](const py::tuple& a, const py::tuple& b, int n, int mm) {
        return element_tuple(rhg::multiply(element_from(a), element_from(b), family(n, mm)));
      },
      py::arg("a"), py::arg("b"), py::arg("n") = 1, py::arg("m") = 1);
  m.def("inverse", [](const py::tuple& a) { return element_tuple(rhg::inverse(element_from(a))); });
  m.def("alpha_weight", [](const std::vector<int>& k, int n) { return rhg::alpha_weight(rhg::FreqIndex(k), n); });

  m.def(
      "gaussian_me",
      [](const std::vector<int>& k, double alpha) {
        const auto me = rhg::gaussian_me_1d(rhg::FreqIndex(k), alpha);
        py::dict d;
        d["t_factor"] = me.t_factor;
        d["q_factor"] = me.q_factor;
        d["q_gamma_limit"] = me.q_gamma_limit;
        d["value"] = me.value(1);
        return d;
      },
      py::arg("k"), py::arg("alpha"));
  m.def("f_alpha_norm_sq", &rhg::f_alpha_norm_sq, py::arg("alpha"), py::arg("n") = 1, py::arg("m") = 1);

  m.def(
      "divergence",
      [](double alpha, double r_prime, int k_max, int n, int mm) {
        const auto r = rhg::divergence_partial_sums(alpha, r_prime, k_max, family(n, mm));
        py::list ladder;
        for (const auto& row : r.ladder) ladder.append(py::make_tuple(row.K, row.S, row.increment, row.log_slope));
        py::dict d;
        d["S"] = r.S;
        d["ladder"] = ladder;
        d["exponent"] = r.exponent;
        d["strictly_increasing"] = r.strictly_increasing;
        d["fit_slope"] = r.fit_slope;
        d["fit_r2"] = r.fit_r2;
        d["csv"] = rhg::divergence_csv(r);
        return d;
      },
      py::arg("alpha"), py::arg("r_prime"), py::arg("k_max"), py::arg("n") = 1, py::arg("m") = 1);

  m.def(
      "schatten",
      [](std::uint64_t seed, int points, double extent) {
        const auto fam = family(1, 1);
        const auto sigma = rhg::random_single_k_symbol(seed, fam, points, extent);
        rhg::SchattenReport r;
        {
          py::gil_scoped_release release;
          r = rhg::schatten_suite(sigma, fam);
        }
        auto one = [](const rhg::SchattenCheck& c) {
          py::dict d;
          d["r"] = c.r;
          d["lhs"] = c.lhs;
          d["rhs"] = c.rhs;
          d["slack"] = c.slack;
          d["pass"] = c.pass;
          return d;
        };
        py::dict d;
        d["k"] = sigma.ks[0].k;
        d["s1"] = one(r.s1);
        d["s2"] = one(r.s2);
        return d;
      },
      py::arg("seed"), py::arg("points") = 16, py::arg("extent") = 5.0);
}
