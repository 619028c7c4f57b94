#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subord/dominant.hpp"
#include "subord/errors.hpp"
#include "subord/harness.hpp"
#include "subord/json_io.hpp"
#include "subord/nb_operator.hpp"

namespace py = pybind11;
using namespace subord;

namespace {

// Structured results cross the boundary as JSON text; the package decodes them.
std::string dump(const nlohmann::json& j) { return j.dump(); }

ClassParams params_from(int p, int n, Complex mu, double alpha, double beta, const std::string& target) {
  return make_params(p, n, mu, alpha, beta, target_from_json(nlohmann::json::parse(target)));
}

}  // namespace

PYBIND11_MODULE(_subord, m) {
  m.doc() = "numerical checks for the non-Bazilevic operator and its subordination results";

  // translators are tried newest first: register the base class before the others
  auto& base = py::register_exception<Error>(m, "SubordError");
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<BranchError>(m, "BranchError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<NearBoundaryError>(m, "NearBoundaryError", base.ptr());

  py::class_<AnalyticFunction>(m, "AnalyticFunction")
      .def(py::init(&make_function), py::arg("p"), py::arg("n"), py::arg("coeffs"))
      .def_property_readonly("p", &AnalyticFunction::valence)
      .def_property_readonly("n", &AnalyticFunction::gap)
      .def_property_readonly("truncation_order", &AnalyticFunction::truncation_order)
      .def_property_readonly("tail_bound", &AnalyticFunction::tail_bound)
      .def_property_readonly("coeffs",
                             [](const AnalyticFunction& f) {
                               const auto c = f.coefficients();
                               return std::vector<Complex>(c.begin(), c.end());
                             })
      .def("__call__", &AnalyticFunction::operator(), py::arg("z"));

  py::class_<NbEvaluator>(m, "NbEvaluator")
      .def(py::init<AnalyticFunction, Complex>(), py::arg("f"), py::arg("exponent"))
      .def("phi", &NbEvaluator::phi, py::arg("z"))
      .def("phi_continued", &NbEvaluator::phi_continued, py::arg("z"))
      .def("j", &NbEvaluator::j, py::arg("z"), py::arg("mu"))
      .def_property_readonly("series_radius", &NbEvaluator::series_radius);

  m.def(
      "dominant_quadrature",
      [](Complex gamma, double A, double B, Complex z) {
        const auto r = dominant_quadrature(make_dominant_spec(gamma, A, B), z);
        return py::make_tuple(r.value, r.error_estimate);
      },
      py::arg("gamma"), py::arg("A"), py::arg("B"), py::arg("z"));
  m.def(
      "dominant_series",
      [](Complex gamma, double A, double B, Complex z) {
        return dominant_series(make_dominant_spec(gamma, A, B), z).value;
      },
      py::arg("gamma"), py::arg("A"), py::arg("B"), py::arg("z"));
  m.def(
      "dominant_coefficients",
      [](Complex gamma, double A, double B, std::size_t count) {
        return dominant_coefficients(make_dominant_spec(gamma, A, B), count);
      },
      py::arg("gamma"), py::arg("A"), py::arg("B"), py::arg("count"));
  m.def(
      "extrema_of_re",
      [](Complex gamma, double A, double B, int angles) {
        return dump(to_json(extrema_of_re(make_dominant_spec(gamma, A, B), default_grid(angles))));
      },
      py::arg("gamma"), py::arg("A"), py::arg("B"), py::arg("angles") = 720);
  m.def(
      "lemma1_transform",
      [](const std::function<Complex(Complex)>& h, Complex gamma, int n, Complex z) {
        return lemma1_transform(h, gamma, n, z).value;
      },
      py::arg("h"), py::arg("gamma"), py::arg("n"), py::arg("z"));

  m.def(
      "mobius_image", [](double A, double B, double r) { return dump(to_json(mobius_image(make_mobius(A, B), r))); },
      py::arg("A"), py::arg("B"), py::arg("r"));

  m.def(
      "identity_residual",
      [](const AnalyticFunction& f, Complex mu, double alpha, double beta, double radius, int angles) {
        const auto params = make_params(f.valence(), f.gap(), mu, alpha, beta, MobiusTarget{1.0, -1.0});
        return identity_check(f, params, disk_grid(radius, 9, angles)).max_residual;
      },
      py::arg("f"), py::arg("mu"), py::arg("alpha") = 1.0, py::arg("beta") = 0.0, py::arg("radius") = 0.9,
      py::arg("angles") = 180);
  m.def(
      "membership",
      [](const AnalyticFunction& f, Complex mu, double alpha, double beta, const std::string& target, int angles) {
        const auto params = params_from(f.valence(), f.gap(), mu, alpha, beta, target);
        const auto grid = default_grid(angles);
        const auto v = std::holds_alternative<MobiusTarget>(params.target) ? membership_def1(f, params, grid)
                                                                           : membership_def2(f, params, grid);
        return dump(to_json(v));
      },
      py::arg("f"), py::arg("mu"), py::arg("alpha"), py::arg("beta"), py::arg("target"), py::arg("angles") = 180);

  m.def(
      "generate_corpus",
      [](const std::string& config) {
        auto c = config_from_json(nlohmann::json::parse(config));
        auto corpus = generate_corpus(c);
        const DiskGrid grid = DiskGrid::from_radii(c.grid.radii, c.grid.angles);
        for (auto& e : corpus) screen_entry(e, grid);
        return dump(corpus_to_json(corpus));
      },
      py::arg("config") = "{}");
  m.def(
      "run_all",
      [](const std::string& config) {
        const auto c = config_from_json(nlohmann::json::parse(config));
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_all(c);
        }
        return py::make_tuple(dump(r.report), exit_code(r));
      },
      py::arg("config") = "{}");
}
