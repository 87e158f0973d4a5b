// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Python bindings. The boundary follows the CLI conventions: graphs, measures
// and certificates cross as JSON text, points as "vertex" or "edge@offset"
// strings. Heavyweight state (graphs, eigensolutions) stays in C++ handles.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "graphforms/eigensolution.hpp"
#include "graphforms/eigensolver.hpp"
#include "graphforms/io.hpp"
#include "graphforms/schnol.hpp"

namespace py = pybind11;
using namespace graphforms;

namespace {

struct PyGraph {
  std::shared_ptr<MetricGraph> g;
};

struct PySolution {
  std::shared_ptr<MetricGraph> g;
  PiecewiseFunction u;
  double lambda = 0.0;
};

MeasurePerturbation measure_of(const PyGraph& graph, const std::string& mu_json) {
  if (mu_json.empty()) return {};
  return mu_from_json(*graph.g, Json::parse(mu_json), "mu");
}

GraphPoint point_of(const PyGraph& graph, const std::string& text) {
  if (text.empty()) return GraphPoint::at_vertex(0);
  return point_from_string(*graph.g, text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "numerics for quantum graphs: Dirichlet forms, eigensolutions, "
            "growth-based spectrum certificates";

  py::class_<PyGraph>(m, "Graph")
      .def(py::init([](const std::string& json_text) {
             return PyGraph{graph_from_json(Json::parse(json_text))};
           }),
           py::arg("json_text"))
      .def_static(
          "load",
          [](const std::string& path) { return PyGraph{graph_from_json(load_json_file(path))}; },
          py::arg("path"))
      .def_property_readonly("n_vertices", [](const PyGraph& s) { return s.g->vertex_count(); })
      .def_property_readonly("n_edges", [](const PyGraph& s) { return s.g->edge_count(); })
      .def_property_readonly("total_length", [](const PyGraph& s) { return s.g->total_length(); })
      .def("to_json", [](const PyGraph& s) { return graph_to_json(*s.g).dump(); })
      .def(
          "distance",
          [](const PyGraph& s, const std::string& p, const std::string& q) {
            return path_distance(*s.g, point_from_string(*s.g, p), point_from_string(*s.g, q));
          },
          py::arg("p"), py::arg("q"), "path metric between two points")
      .def("__repr__", [](const PyGraph& s) {
        return "<graphforms.Graph " + std::to_string(s.g->vertex_count()) + " vertices, " +
               std::to_string(s.g->edge_count()) + " edges>";
      });

  py::class_<PySolution>(m, "Solution")
      .def_property_readonly("lam", [](const PySolution& s) { return s.lambda; })
      .def(
          "eval",
          [](const PySolution& s, const std::string& edge, double t) {
            int e = s.g->find_edge(edge);
            if (e < 0) throw std::invalid_argument("unknown edge '" + edge + "'");
            return s.u.eval(e, t);
          },
          py::arg("edge"), py::arg("t"))
      .def("to_json",
           [](const PySolution& s) { return solution_to_json(*s.g, s.u, s.lambda).dump(); })
      .def("__repr__", [](const PySolution& s) {
        return "<graphforms.Solution lambda=" + format_float(s.lambda) + ">";
      });

  m.def(
      "solve",
      [](const PyGraph& graph, double lam, const std::string& vertex, Complex value,
         Complex derivative, const std::map<std::string, Complex>& edge_derivatives) {
        SeedSpec seed;
        if (!vertex.empty()) {
          seed.vertex = graph.g->find_vertex(vertex);
          if (seed.vertex < 0) throw std::invalid_argument("unknown vertex '" + vertex + "'");
        }
        seed.value = value;
        seed.derivative = derivative;
        for (const auto& [id, d] : edge_derivatives) {
          int e = graph.g->find_edge(id);
          if (e < 0) throw std::invalid_argument("unknown edge '" + id + "'");
          seed.edge_derivative[e] = d;
        }
        ShootResult r = shoot(graph.g, lam, seed);
        if (!r.feasible())
          throw std::invalid_argument("no eigensolution at lambda=" + format_float(lam) +
                                      " (matching defect " + format_float(r.matching_residual) +
                                      ")");
        return PySolution{graph.g, *r.solution, lam};
      },
      py::arg("graph"), py::arg("lam"), py::arg("vertex") = std::string(),
      py::arg("value") = Complex(1.0, 0.0), py::arg("derivative") = Complex(0.0, 0.0),
      py::arg("edge_derivatives") = std::map<std::string, Complex>{},
      "exact eigensolution by shooting from a seed vertex");

  m.def(
      "load_solution",
      [](const PyGraph& graph, const std::string& path) {
        auto [u, lam] = solution_from_json(graph.g, load_json_file(path));
        return PySolution{graph.g, std::move(u), lam};
      },
      py::arg("graph"), py::arg("path"));

  m.def(
      "spectrum",
      [](const PyGraph& graph, int count, double mesh_h, double shift, unsigned seed,
         const std::string& mu_json) {
        auto mesh = std::make_shared<Mesh>(graph.g, mesh_h);
        FormMatrices fm = assemble(mesh, measure_of(graph, mu_json));
        SpectralResult sr = solve_spectrum(fm, count, shift, seed);
        std::vector<double> vals(sr.eigenvalues.data(), sr.eigenvalues.data() + count);
        std::vector<double> res(sr.residuals.data(), sr.residuals.data() + count);
        return py::make_tuple(vals, res);
      },
      py::arg("graph"), py::arg("count") = 8, py::arg("mesh_h") = 0.05, py::arg("shift") = -1.0,
      py::arg("seed") = 12345u, py::arg("mu") = std::string(),
      "discrete eigenvalues nearest the shift, with dual-norm residuals");

  m.def(
      "form_bound",
      [](const PyGraph& graph, double mesh_h, const std::string& mu_json) {
        auto mesh = std::make_shared<Mesh>(graph.g, mesh_h);
        FormBound fb = estimate_form_bound(assemble(mesh, measure_of(graph, mu_json)));
        py::dict d;
        d["kappa"] = fb.kappa;
        d["c_kappa"] = fb.c_kappa;
        d["admissible"] = fb.admissible;
        return d;
      },
      py::arg("graph"), py::arg("mesh_h") = 0.05, py::arg("mu") = std::string(),
      "relative bound of the negative measure part against the free form");

  m.def(
      "certify",
      [](const PyGraph& graph, const PySolution& sol, double mesh_h, const std::string& x0,
         double b, double delta, int radius_budget, double ratio_threshold,
         double residual_factor, const std::string& profile, const std::string& mu_json) {
        SchnolConfig cfg;
        cfg.x0 = point_of(graph, x0);
        cfg.b = b;
        cfg.delta = delta;
        cfg.radius_budget = radius_budget;
        cfg.ratio_threshold = ratio_threshold;
        cfg.residual_factor = residual_factor;
        if (profile == "smooth")
          cfg.kind = CutoffProfile::Kind::Smooth;
        else if (profile != "linear")
          throw std::invalid_argument("profile must be linear or smooth");
        auto mesh = std::make_shared<Mesh>(graph.g, mesh_h);
        FormMatrices fm = assemble(mesh, measure_of(graph, mu_json));
        SchnolCertificate cert = certify(*graph.g, fm, sol.u, sol.lambda, cfg);
        return certificate_to_json(cert).dump();
      },
      py::arg("graph"), py::arg("solution"), py::arg("mesh_h") = 0.05,
      py::arg("x0") = std::string(), py::arg("b") = 1.0, py::arg("delta") = 0.05,
      py::arg("radius_budget") = 16, py::arg("ratio_threshold") = 0.05,
      py::arg("residual_factor") = 10.0, py::arg("profile") = std::string("linear"),
      py::arg("mu") = std::string(),
      "growth-based certificate as JSON text (parse with json.loads)");

  m.def(
      "caccioppoli",
      [](const PyGraph& graph, const PySolution& sol, const std::string& center, double radius,
         double b, double constant) {
        Region e_set = ball(*graph.g, point_of(graph, center), radius);
        CaccioppoliReport rep =
            caccioppoli_check(*graph.g, sol.u, sol.lambda, e_set, b, constant);
        py::dict d;
        d["lam"] = rep.lambda;
        d["lhs"] = rep.lhs;
        d["rhs"] = rep.rhs;
        d["empirical"] = rep.empirical;
        d["pass"] = rep.pass;
        return d;
      },
      py::arg("graph"), py::arg("solution"), py::arg("center"), py::arg("radius"), py::arg("b"),
      py::arg("constant"), "energy-versus-neighborhood-mass inequality on a metric ball");
}
