// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "graphforms/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

namespace graphforms {

namespace {

using Triplet = Eigen::Triplet<double>;

void add_sym2(std::vector<Triplet>& out, int d0, int d1, const double m[2][2]) {
  int dof[2] = {d0, d1};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (dof[i] >= 0 && dof[j] >= 0 && m[i][j] != 0.0) out.push_back({dof[i], dof[j], m[i][j]});
}

Eigen::SparseMatrix<double> from_triplets(int n, std::vector<Triplet>& t) {
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

FormMatrices assemble(std::shared_ptr<const Mesh> mesh, const MeasurePerturbation& mu) {
  if (!mesh) throw std::invalid_argument("assemble needs a mesh");
  const Mesh& m = *mesh;
  const MetricGraph& g = m.graph();
  int n = m.dof_count();
  std::vector<Triplet> tk, tm, tp, tq;

  for (int e = 0; e < g.edge_count(); ++e) {
    double h = m.cell_size(e);
    double k_cell[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
    double m_cell[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
    for (int k = 0; k < m.cells(e); ++k) {
      int d0 = m.dof_of_node(e, k);
      int d1 = m.dof_of_node(e, k + 1);
      add_sym2(tk, d0, d1, k_cell);
      add_sym2(tm, d0, d1, m_cell);
    }
    if (mu.edge_density) {
      for (int k = 0; k < m.cells(e); ++k) {
        double v0 = mu.edge_density(e, m.node_offset(e, k));
        double v1 = mu.edge_density(e, m.node_offset(e, k + 1));
        // nodal interpolant of V against linear shapes, sign parts separately
        auto cell = [&](double a0, double a1, std::vector<Triplet>& out) {
          if (a0 == 0.0 && a1 == 0.0) return;
          double c[2][2] = {{h / 12.0 * (3.0 * a0 + a1), h / 12.0 * (a0 + a1)},
                            {h / 12.0 * (a0 + a1), h / 12.0 * (a0 + 3.0 * a1)}};
          add_sym2(out, m.dof_of_node(e, k), m.dof_of_node(e, k + 1), c);
        };
        cell(std::max(v0, 0.0), std::max(v1, 0.0), tp);
        cell(std::max(-v0, 0.0), std::max(-v1, 0.0), tq);
      }
    }
  }

  auto add_point = [&](GraphPoint p, double w) {
    if (w == 0.0) return;
    p = g.canonical(p);
    std::vector<Triplet>& out = w > 0.0 ? tp : tq;
    double aw = std::abs(w);
    if (p.is_vertex()) {
      out.push_back({p.vertex, p.vertex, aw});
      return;
    }
    int e = p.edge;
    double h = m.cell_size(e);
    int k = std::clamp(static_cast<int>(std::floor(p.offset / h)), 0, m.cells(e) - 1);
    double xi = p.offset / h - k;
    int d0 = m.dof_of_node(e, k);
    int d1 = m.dof_of_node(e, k + 1);
    if (d0 < 0 || (d1 < 0 && xi > 1.0 - 1e-12))
      throw std::invalid_argument("point mass at a truncation cut is outside the form domain");
    double phi[2] = {1.0 - xi, xi};
    double cellm[2][2] = {{aw * phi[0] * phi[0], aw * phi[0] * phi[1]},
                          {aw * phi[1] * phi[0], aw * phi[1] * phi[1]}};
    add_sym2(out, d0, d1, cellm);
  };

  for (int v = 0; v < g.vertex_count(); ++v) add_point(GraphPoint::at_vertex(v), g.alpha(v));
  for (const PointMass& pm : mu.point_masses) add_point(pm.where, pm.weight);

  FormMatrices fm;
  fm.K = from_triplets(n, tk);
  fm.M = from_triplets(n, tm);
  fm.P_plus = from_triplets(n, tp);
  fm.P_minus = from_triplets(n, tq);
  fm.mesh = std::move(mesh);
  return fm;
}

double relative_bound_at(const FormMatrices& fm, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("relative bound needs c > 0");
  if (fm.P_minus.nonZeros() == 0) return 0.0;
  int n = fm.dofs();
  Eigen::SparseMatrix<double> b = fm.K + c * fm.M;

  if (n < 2000) {
    Eigen::MatrixXd bd(b), pd(fm.P_minus);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(pd, bd);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("generalized eigensolve for the relative bound failed");
    return es.eigenvalues().maxCoeff();
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(b);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("singular pencil: K + cM failed to factorize");
  std::mt19937 rng(9001);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * unif(rng);
  double kappa = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd w = fm.P_minus * v;
    Eigen::VectorXd y = solver.solve(w);
    double ynorm = std::sqrt(y.dot(b * y));
    if (!(ynorm > 0.0)) return 0.0;  // v fell in the kernel of P_minus
    v = y / ynorm;
    double next = v.dot(fm.P_minus * v);
    if (std::abs(next - kappa) <= 1e-12 * std::max(1.0, std::abs(next))) return next;
    kappa = next;
  }
  return kappa;
}

FormBound estimate_form_bound(const FormMatrices& fm) {
  if (fm.P_minus.nonZeros() == 0) return {0.0, 0.0, true};
  double best_kappa = std::numeric_limits<double>::infinity();
  double best_c = 0.0;
  for (int k = 0; k < 10; ++k) {
    double c = 0.25 * std::pow(2.0, k);
    double kappa = relative_bound_at(fm, c);
    if (kappa < best_kappa) {
      best_kappa = kappa;
      best_c = c;
    }
    if (kappa <= 0.5) return {kappa, kappa * c, true};
  }
  if (best_kappa < 0.98) return {best_kappa, best_kappa * best_c, true};
  return {best_kappa, best_kappa * best_c, false};
}

double caccioppoli_constant(double lambda0, double q, double C_q) {
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("relative bound q must lie in [0, 1)");
  double zeroth = std::max(lambda0 + C_q, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 10000; ++k) {
    double s = 1e-4 * k;
    double s2 = s * s;
    double denom = (1.0 - q) * (1.0 - s2);
    double num = 4.0 * (q + (1.0 - q) / s2) + zeroth;
    best = std::min(best, num / denom);
  }
  return best;
}

}  // namespace graphforms
