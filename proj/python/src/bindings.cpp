#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "sblfem/fem1d.hpp"
#include "sblfem/fit.hpp"
#include "sblfem/meshing.hpp"
#include "sblfem/polybasis.hpp"
#include "sblfem/problems.hpp"
#include "sblfem/study.hpp"
#include "sblfem/verify.hpp"

namespace py = pybind11;
using namespace sblfem;

namespace {

// JSON crosses the boundary as text; the Python side parses it.
py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict row_dict(const study::StudyRow& r) {
  py::dict d;
  d["problem"] = r.problem;
  d["eps"] = r.eps;
  d["p"] = r.p;
  d["kappa"] = r.kappa;
  d["energy"] = r.energy;
  d["balanced"] = r.balanced;
  d["max"] = r.max;
  d["c1max"] = r.c1max;
  d["dofs"] = r.dofs;
  d["error"] = r.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of sblfem";

  py::class_<study::StudyRow>(m, "StudyRow")
      .def_readonly("problem", &study::StudyRow::problem)
      .def_readonly("eps", &study::StudyRow::eps)
      .def_readonly("p", &study::StudyRow::p)
      .def_readonly("kappa", &study::StudyRow::kappa)
      .def_readonly("energy", &study::StudyRow::energy)
      .def_readonly("balanced", &study::StudyRow::balanced)
      .def_readonly("max", &study::StudyRow::max)
      .def_readonly("c1max", &study::StudyRow::c1max)
      .def_readonly("dofs", &study::StudyRow::dofs)
      .def_readonly("error", &study::StudyRow::error)
      .def("as_dict", &row_dict);

  m.def("catalog_1d_names", &problems::catalog_1d_names);

  m.def("run_case_1d", &study::run_case_1d, py::arg("problem"), py::arg("eps"), py::arg("p"), py::arg("kappa") = 1.0,
        py::call_guard<py::gil_scoped_release>(), "Solve a 1D catalog problem and return its error norms.");

  m.def(
      "run_case_2d",
      [](const std::string& problem, double eps, int p, double kappa, double rho0, int n_sectors, double b, double c,
         double f0) {
        auto cfg = study::default_config(2);
        cfg.problem = problem;
        cfg.kappa = kappa;
        cfg.rho0 = rho0;
        cfg.n_sectors = n_sectors;
        cfg.b = b;
        cfg.c = c;
        cfg.f0 = f0;
        cfg.eps = {eps};
        cfg.p_min = cfg.p_max = p;
        cfg.validate();
        py::gil_scoped_release release;
        return study::run_case_2d(cfg, eps, p);
      },
      py::arg("problem") = "BESSEL", py::arg("eps") = 1e-2, py::arg("p") = 4, py::arg("kappa") = 1.0,
      py::arg("rho0") = 0.5, py::arg("n_sectors") = 8, py::arg("b") = 1.0, py::arg("c") = 1.0, py::arg("f0") = 1.0,
      "Solve the mixed 2D problem on the SBL disk mesh and return its error norms.");

  m.def(
      "solve_1d",
      [](const std::string& problem, double eps, int p, double kappa, const std::vector<double>& x) {
        const auto spec = problems::catalog_1d(problem, eps);
        const auto sol = fem1d::solve_1d(spec, kappa, p);
        std::vector<double> values;
        values.reserve(x.size());
        for (double xi : x) values.push_back(sol.field.evaluate(xi));
        return values;
      },
      py::arg("problem"), py::arg("eps"), py::arg("p"), py::arg("kappa") = 1.0, py::arg("x"),
      "Discrete 1D solution sampled at the points x.");

  m.def(
      "run_study",
      [](int dimension, const std::string& problem, const std::vector<double>& eps, int p_min, int p_max,
         double kappa) {
        auto cfg = study::default_config(dimension);
        cfg.problem = problem;
        cfg.eps = eps;
        cfg.p_min = p_min;
        cfg.p_max = p_max;
        cfg.kappa = kappa;
        study::StudyReport report;
        {
          py::gil_scoped_release release;
          report = study::run_study(cfg);
        }
        py::dict out;
        out["rows"] = report.rows;
        out["fit"] = from_json(study::fit_json(report));
        out["csv"] = study::results_csv(report);
        return out;
      },
      py::arg("dimension"), py::arg("problem"), py::arg("eps"), py::arg("p_min"), py::arg("p_max"),
      py::arg("kappa") = 1.0, "Run a convergence study in memory; returns rows, fits and CSV text.");

  m.def(
      "dump_mesh_1d", [](double kappa, int p, double eps) { return from_json(mesh::to_json(mesh::build_mesh_1d(kappa, p, eps))); },
      py::arg("kappa"), py::arg("p"), py::arg("eps"));
  m.def(
      "dump_mesh_2d",
      [](double kappa, int p, double eps, double rho0, int n_sectors) {
        return from_json(mesh::to_json(mesh::build_mesh_2d({rho0, n_sectors}, kappa, p, eps)));
      },
      py::arg("kappa"), py::arg("p"), py::arg("eps"), py::arg("rho0") = 0.5, py::arg("n_sectors") = 8);

  m.def(
      "verify",
      [](const std::string& suite) {
        std::vector<verify::SuiteResult> results;
        {
          py::gil_scoped_release release;
          results = verify::run_suites(suite);
        }
        py::list out;
        for (const auto& r : results) out.append(from_json(verify::to_json(r)));
        return out;
      },
      py::arg("suite") = "ALL", "Run verification suites; returns one dict per suite.");

  m.def(
      "gauss_rule",
      [](int n) {
        const auto r = poly::gauss_rule(n);
        return py::make_tuple(r.points, r.weights);
      },
      py::arg("n"), "Gauss-Legendre points and weights on [-1, 1].");

  m.def("scaled_bessel_i", &problems::scaled_bessel_i, py::arg("nu"), py::arg("x"), "exp(-x) I_nu(x), nu in {0, 1}.");

  m.def(
      "bessel_exact_u",
      [](double eps, double b, double c, double f0, double r) { return problems::bessel_disk(eps, b, c, f0).u(r); },
      py::arg("eps"), py::arg("b"), py::arg("c"), py::arg("f0"), py::arg("r"));

  m.def(
      "fit_exponential",
      [](const std::vector<double>& p, const std::vector<double>& err, double floor) {
        const auto f = fit::fit_exponential(p, err, floor);
        py::dict d;
        d["beta"] = f.beta;
        d["log_c"] = f.log_c;
        d["r2"] = f.r2;
        d["n"] = f.n;
        return d;
      },
      py::arg("p"), py::arg("err"), py::arg("floor") = 1e-12, "Least-squares fit err ~ C exp(-beta p).");
}
