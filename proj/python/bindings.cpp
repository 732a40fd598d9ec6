#include "skt/cli.hpp"
#include "skt/config.hpp"
#include "skt/diagnostics.hpp"
#include "skt/drift.hpp"
#include "skt/model.hpp"
#include "skt/studies.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <iostream>

namespace py = pybind11;
using namespace skt;

namespace {

DriftForm drift_form(const std::string& s) {
  if (s == "cross-diffusion") return DriftForm::cross_diffusion;
  if (s == "linear") return DriftForm::linear;
  if (s == "none") return DriftForm::none;
  throw ConfigError("unknown drift form '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral Galerkin ensembles for stochastic SKT-type cross-diffusion systems";
  m.attr("__version__") = SKT_SPDE_VERSION;

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](Vector a0, Matrix a, std::optional<Vector> pi) {
             if (!pi) return ModelParams::with_solved_weights(std::move(a0), std::move(a));
             ModelParams p{static_cast<std::size_t>(a0.size()), std::move(a0), std::move(a), *pi};
             p.validate();
             return p;
           }),
           py::arg("a0"), py::arg("a"), py::arg("pi") = py::none())
      .def_readonly("n", &ModelParams::n)
      .def_readonly("a0", &ModelParams::a0)
      .def_readonly("a", &ModelParams::a)
      .def_readonly("pi", &ModelParams::pi);

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("alpha1", &ConditionReport::alpha1)
      .def_readonly("alpha2", &ConditionReport::alpha2)
      .def_readonly("detailed_balance", &ConditionReport::detailed_balance)
      .def_readonly("admissible", &ConditionReport::admissible)
      .def_readonly("alpha", &ConditionReport::alpha)
      .def_readonly("weights", &ConditionReport::weights)
      .def_property_readonly("route", [](const ConditionReport& r) -> py::object {
        switch (r.route) {
          case CoercivityRoute::detailed_balance: return py::str("detailed-balance");
          case CoercivityRoute::self_diffusion: return py::str("self-diffusion");
          case CoercivityRoute::none: break;
        }
        return py::none();
      });

  m.def("check_conditions", &check_conditions, py::arg("params"));
  m.def("solve_detailed_balance", &solve_detailed_balance, py::arg("a"));
  m.def("alpha_detailed_balance", &alpha_detailed_balance, py::arg("a"));
  m.def("alpha_self_diffusion", &alpha_self_diffusion, py::arg("a"));
  m.def("eval_diffusion_matrix", &eval_diffusion_matrix, py::arg("params"), py::arg("u"));
  m.def("eval_truncated_matrix", &eval_truncated_matrix, py::arg("params"), py::arg("u"));
  m.def("quadratic_form_gap", &quadratic_form_gap, py::arg("params"), py::arg("report"),
        py::arg("u"), py::arg("z"));

  py::class_<SpectralBasis>(m, "SpectralBasis")
      .def(py::init<int, std::vector<double>, int, int>(), py::arg("dim"), py::arg("lengths"),
           py::arg("modes"), py::arg("grid"))
      .def_property_readonly("num_modes", &SpectralBasis::num_modes)
      .def_property_readonly("num_points", &SpectralBasis::num_points)
      .def_property_readonly("eigenvalues", &SpectralBasis::eigenvalues)
      .def("points", &SpectralBasis::points)
      .def("project", &SpectralBasis::project, py::arg("fields"))
      .def("synthesize", &SpectralBasis::synthesize, py::arg("coeffs"));

  m.def(
      "drift_apply",
      [](const SpectralBasis& b, const ModelParams& p, const Matrix& coeffs, const std::string& form,
         bool truncated) { return drift_apply(b, p, {coeffs, 0.0}, {drift_form(form), truncated}); },
      py::arg("basis"), py::arg("params"), py::arg("coeffs"), py::arg("form") = "cross-diffusion",
      py::arg("truncated") = false);

  m.def("stampacchia_f", &stampacchia_f, py::arg("eps"), py::arg("z"));

  m.def(
      "ensemble_csv",
      [](const std::filesystem::path& config, const std::vector<std::string>& overrides) {
        py::gil_scoped_release release;
        return format_csv(make_simulator(load_config(config, overrides)).run_ensemble());
      },
      py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
      "Runs the ensemble of a config file and returns stats.csv as text.");

  m.def(
      "study_json",
      [](const std::string& name, const std::filesystem::path& config,
         const std::vector<std::string>& overrides) {
        py::gil_scoped_release release;
        return run_study(name, load_config(config, overrides)).dump();
      },
      py::arg("name"), py::arg("config"), py::arg("overrides") = std::vector<std::string>{});

  m.def(
      "run",
      [](const std::filesystem::path& config, const std::vector<std::string>& overrides,
         std::optional<std::filesystem::path> output, std::optional<unsigned> workers,
         std::optional<std::string> study) {
        RunOptions o{config, overrides, workers, std::move(output), std::move(study)};
        py::gil_scoped_release release;
        return run_experiment(o, std::cout, std::cerr);
      },
      py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
      py::arg("output") = py::none(), py::arg("workers") = py::none(),
      py::arg("study") = py::none(),
      "Same as `skt-spde run`; returns the exit code.");
}
