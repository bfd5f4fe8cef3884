#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "advdiff/errors.hpp"
#include "advdiff/mesh.hpp"
#include "advdiff/problem.hpp"
#include "advdiff/runner.hpp"

namespace py = pybind11;
using namespace advdiff;

PYBIND11_MODULE(_advdiff, m) {
    m.doc() = "Advection-dominated diffusion solvers: FEM, PINN and VPINN";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError", PyExc_ValueError);

    m.def("uniform_mesh", [](int n) { return uniform_mesh(n).breakpoints; }, py::arg("n_points"));
    m.def("adaptive_mesh", [](int n, double eps) { return adaptive_mesh(n, eps).breakpoints; },
          py::arg("n_points"), py::arg("eps"));

    m.def("exact_1d", [](double eps, const std::vector<double>& xs) {
        std::vector<double> out;
        out.reserve(xs.size());
        for (double x : xs) {
            out.push_back(exact_solution_1d(Problem1D{eps}, x));
        }
        return out;
    }, py::arg("eps"), py::arg("x"));

    m.def("exact_ej", [](double eps, const std::vector<double>& xs, const std::vector<double>& ys) {
        if (xs.size() != ys.size()) {
            throw InvalidArgumentError("x and y must have the same length");
        }
        const ProblemEJ problem(eps);
        std::vector<double> out;
        out.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out.push_back(problem.exact(xs[i], ys[i]));
        }
        return out;
    }, py::arg("eps"), py::arg("x"), py::arg("y"));

    m.def("normalize_config", [](const std::string& text) {
        const auto c = config_from_json(text).normalized();
        validate(c);
        return config_to_json(c);
    }, py::arg("config_json"));

    m.def("run_json", [](const std::string& text, const std::string& out_dir) {
        const auto config = config_from_json(text);
        py::gil_scoped_release release;
        return run_experiment(config, out_dir).to_json();
    }, py::arg("config_json"), py::arg("out_dir"));
}
