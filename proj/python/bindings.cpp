#include "flexoiga/error.hpp"
#include "flexoiga/lattice.hpp"
#include "flexoiga/material.hpp"
#include "flexoiga/scenario.hpp"
#include "flexoiga/solve.hpp"
#include "flexoiga/spline.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace flexoiga;

namespace {

py::list table_rows(const Table& t) {
  py::list rows;
  for (const auto& row : t.rows) {
    py::list r;
    for (const Cell& c : row) {
      if (const double* d = std::get_if<double>(&c)) {
        r.append(*d);
      } else {
        r.append(std::get<std::string>(c));
      }
    }
    rows.append(r);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-patch IGA flexoelectric solver";

  static py::exception<Error> error_type(m, "FlexoigaError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      err.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::class_<MaterialSet>(m, "MaterialSet")
      .def(py::init<>())
      .def_readwrite("E", &MaterialSet::E)
      .def_readwrite("nu", &MaterialSet::nu)
      .def_readwrite("kappa11", &MaterialSet::kappa11)
      .def_readwrite("kappa22", &MaterialSet::kappa22)
      .def_readwrite("e11", &MaterialSet::e11)
      .def_readwrite("e15", &MaterialSet::e15)
      .def_readwrite("e21", &MaterialSet::e21)
      .def_readwrite("e22", &MaterialSet::e22)
      .def_readwrite("mu11", &MaterialSet::mu11)
      .def_readwrite("mu12", &MaterialSet::mu12)
      .def_readwrite("mu44", &MaterialSet::mu44)
      .def_readwrite("length_scale", &MaterialSet::length_scale)
      .def("validate", &MaterialSet::validate);
  m.def("material_preset", &material_preset, py::arg("name"));
  m.def("normalized_thickness", &normalized_thickness, py::arg("material"), py::arg("thickness"));
  m.def(
      "analytical_kem",
      [](const MaterialSet& mat, double thickness, const std::string& mode) {
        const AnalyticKem k = analytical_kem(mat, thickness, parse_kem_mode(mode));
        return py::dict(py::arg("K_EM") = k.K_EM, py::arg("normalized") = k.normalized);
      },
      py::arg("material"), py::arg("thickness"), py::arg("mode") = "combined");

  m.def(
      "bspline_basis",
      [](int degree, std::vector<double> knots, double x, int n_derivs) {
        const BasisEval b = bspline_basis(KnotVector(degree, std::move(knots)), x, n_derivs);
        return py::dict(py::arg("first") = b.first(), py::arg("values") = b.values, py::arg("d1") = b.d1,
                        py::arg("d2") = b.d2);
      },
      py::arg("degree"), py::arg("knots"), py::arg("x"), py::arg("n_derivs") = 0);

  py::class_<LatticeSpec>(m, "LatticeSpec")
      .def(py::init<>())
      .def_readwrite("topology", &LatticeSpec::topology)
      .def_readwrite("a", &LatticeSpec::a)
      .def_readwrite("b", &LatticeSpec::b)
      .def_readwrite("rho", &LatticeSpec::rho)
      .def_readwrite("nx", &LatticeSpec::nx)
      .def_readwrite("ny", &LatticeSpec::ny)
      .def_readwrite("degree", &LatticeSpec::degree)
      .def_readwrite("elements", &LatticeSpec::elements)
      .def_readwrite("elements_y", &LatticeSpec::elements_y);
  m.def("strut_width", &solve_strut_width, py::arg("spec"));
  m.def(
      "lattice_summary",
      [](const LatticeSpec& spec) {
        const MultiPatchMesh mesh = tessellate(spec);
        return py::dict(py::arg("patches") = mesh.num_patches(), py::arg("interfaces") = mesh.interfaces().size(),
                        py::arg("nodes") = mesh.num_nodes(), py::arg("dofs") = mesh.num_dofs(),
                        py::arg("area") = mesh.total_area());
      },
      py::arg("spec"));

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_static("from_text", &ScenarioConfig::from_text, py::arg("text"), py::arg("base") = "")
      .def_static("from_file", &ScenarioConfig::from_file, py::arg("path"), py::arg("base") = "")
      .def_static("builtin", &ScenarioConfig::builtin, py::arg("name"))
      .def("set", &ScenarioConfig::set, py::arg("key"), py::arg("value"))
      .def_property_readonly("name", &ScenarioConfig::name)
      .def("text", &ScenarioConfig::text)
      .def("validate", &ScenarioConfig::validate);
  m.def("builtin_scenarios", &builtin_scenarios);
  m.def(
      "run_scenario",
      [](const ScenarioConfig& config) {
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(config);
        }
        return py::dict(py::arg("name") = r.name, py::arg("header") = r.table.header,
                        py::arg("rows") = table_rows(r.table), py::arg("profile_header") = r.profile.header,
                        py::arg("profile_rows") = table_rows(r.profile), py::arg("csv") = format_csv(r.table));
      },
      py::arg("config"));
}
