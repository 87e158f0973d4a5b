// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Functions on a metric graph and the integrals the rest of the toolkit is
// built on. Two representations:
//
//   NODAL  P1 finite-element functions on a per-edge uniform mesh with shared
//          vertex values; truncation cuts are Dirichlet nodes (value 0).
//   EXACT  per-edge solutions of -u'' = lambda u in the value/derivative
//          normalized fundamental basis c, s with c(0)=1, c'(0)=0, s(0)=0,
//          s'(0)=1, i.e. u_e(t) = A_e c(t) + B_e s(t).
//
// For lambda < 0 the coefficients are carried internally in exponential
// components u = P e^{kt} + Q e^{-kt} (k = sqrt(-lambda)); reconstructing a
// decaying solution from (A, B) cancels catastrophically once k*t is large,
// while (P, Q) evaluates stably at any depth.
//
// Integrals are exact for piecewise-polynomial integrands and accumulate
// composite 16-point Gauss-Legendre panels for trigonometric/hyperbolic ones,
// subdivided so that sqrt(|lambda|) * panel <= 4; at that bandlimit the panel
// error is far below double rounding.

#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "graphforms/metric_graph.hpp"

namespace graphforms {

using Complex = std::complex<double>;

class Mesh {
 public:
  // Cells per edge: ceil(length / target_h), at least 1.
  Mesh(std::shared_ptr<const MetricGraph> g, double target_h);

  const MetricGraph& graph() const { return *graph_; }
  const std::shared_ptr<const MetricGraph>& graph_ptr() const { return graph_; }
  double target_h() const { return target_h_; }

  int cells(int e) const { return cells_[e]; }
  double cell_size(int e) const { return graph_->edge_length(e) / cells_[e]; }
  double max_cell_size() const;

  int dof_count() const { return dof_count_; }
  int dof_of_vertex(int v) const { return v; }
  // Mesh node k = 0..cells(e); -1 at a truncation cut (Dirichlet).
  int dof_of_node(int e, int k) const;
  double node_offset(int e, int k) const { return k * cell_size(e); }

 private:
  std::shared_ptr<const MetricGraph> graph_;
  double target_h_;
  std::vector<int> cells_;
  std::vector<int> interior_base_;  // dof index of node (e, 1)
  int dof_count_ = 0;
};

class PiecewiseFunction {
 public:
  enum class Kind { Nodal, Exact };

  static PiecewiseFunction nodal(std::shared_ptr<const Mesh> mesh, Eigen::VectorXcd dofs);
  // (A_e, B_e) fundamental-basis coefficients, one pair per edge.
  static PiecewiseFunction exact(std::shared_ptr<const MetricGraph> g, double lambda,
                                 std::vector<std::pair<Complex, Complex>> ab);
  // lambda < 0 only: exponential components (P_e, Q_e).
  static PiecewiseFunction exact_exponential(std::shared_ptr<const MetricGraph> g, double lambda,
                                             std::vector<std::pair<Complex, Complex>> pq);

  Kind kind() const { return kind_; }
  bool is_nodal() const { return kind_ == Kind::Nodal; }
  double lambda() const;
  const MetricGraph& graph() const;
  const Mesh& mesh() const;
  const std::shared_ptr<const Mesh>& mesh_ptr() const;
  const Eigen::VectorXcd& dofs() const;

  std::pair<Complex, Complex> ab(int e) const;  // Exact only

  Complex eval(int e, double t) const;
  Complex deriv(int e, double t) const;
  Complex eval(const MetricGraph& g, GraphPoint p) const;

  PiecewiseFunction scaled(Complex factor) const;

 private:
  Kind kind_ = Kind::Nodal;
  std::shared_ptr<const Mesh> mesh_;
  Eigen::VectorXcd dofs_;
  std::shared_ptr<const MetricGraph> graph_;
  double lambda_ = 0.0;
  // lambda >= 0: (A_e, B_e); lambda < 0: (P_e, Q_e).
  std::vector<std::pair<Complex, Complex>> coeff_;
};

// |u'|^2 as an evaluable density (per-cell constant for NODAL input).
class EnergyDensity {
 public:
  explicit EnergyDensity(PiecewiseFunction u) : u_(std::move(u)) {}
  double eval(int e, double t) const { return std::norm(u_.deriv(e, t)); }

 private:
  PiecewiseFunction u_;
};

EnergyDensity energy_density(const PiecewiseFunction& u);

// Integration. Conventions: inner products conjugate the second argument,
//   inner_product(u, v) = \int u conj(v) dm,
//   mixed_energy(u, v)  = \int u' conj(v') dm.
// NODAL x NODAL requires both functions on the same mesh.
double integrate_sq(const PiecewiseFunction& u, const Region& a);
double integrate_energy(const PiecewiseFunction& u, const Region& a);
Complex inner_product(const PiecewiseFunction& u, const PiecewiseFunction& v, const Region& a);
Complex mixed_energy(const PiecewiseFunction& u, const PiecewiseFunction& v, const Region& a);
// \int eta eta' u' conj(u) dm for real-valued eta; shows up in the
// generalized-eigenfunction integration-by-parts identities.
Complex cutoff_cross_term(const PiecewiseFunction& u, const PiecewiseFunction& eta,
                          const Region& a);
// \int |(eta u)'|^2 dm computed directly from the product rule.
double product_energy(const PiecewiseFunction& u, const PiecewiseFunction& eta, const Region& a);

// || e^{-alpha rho(x0, .)} u ||_{L^2} over the truncated graph.
double weighted_norm(const MetricGraph& g, const PiecewiseFunction& u, GraphPoint x0,
                     double alpha);

struct GrowthProfile {
  GraphPoint center;
  std::vector<double> radii;   // strictly increasing
  std::vector<double> values;  // J(r) = \int_{B_r} |u|^2
};

// J over the given radii. Radii must be increasing and must stay within the
// truncation horizon of x0; violations raise std::invalid_argument naming it.
GrowthProfile growth_function(const MetricGraph& g, const PiecewiseFunction& u, GraphPoint x0,
                              const std::vector<double>& radii);

// Nodal interpolant (cut nodes pinned to 0, consistent with the form domain).
PiecewiseFunction interpolate(const PiecewiseFunction& u, std::shared_ptr<const Mesh> mesh);

// Nodal interpolant of the distance function rho(., e_set). Truncation cuts
// carry their true distance value (the result lives on an internal mesh where
// cuts are real nodes), so per-cell slopes stay within the Lipschitz bound.
PiecewiseFunction interpolate_distance(const MetricGraph& g, std::shared_ptr<const Mesh> mesh,
                                       const Region& e_set);

// Low-level quadrature driver shared by the integrals above: calls
// fn(edge, t, weight) on Gauss-Legendre points covering `a`, with panels
// split at the breakpoints of every function in `nodal_meshes`, at
// `extra_breakpoints` (per edge), and at the bandlimit of `caps`.
void for_each_quad_point(const MetricGraph& g, const Region& a,
                         const std::vector<const Mesh*>& nodal_meshes, double band_cap,
                         const std::vector<std::vector<double>>* extra_breakpoints,
                         const std::function<void(int, double, double)>& fn);

}  // namespace graphforms
