// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Assembly of the quadratic form on continuous piecewise-linear elements:
// stiffness K (energy), mass M, and the signed measure perturbation split
// P = P_plus - P_minus. Vertex couplings alpha_v enter P as point masses at
// the vertex dofs; truncation cuts carry no dof (homogeneous Dirichlet).
// Also: the relative bound of the negative part against K + cM, and the
// closed-form energy-vs-mass constant used by the neighborhood inequality.

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "graphforms/function_space.hpp"

namespace graphforms {

struct PointMass {
  GraphPoint where;
  double weight = 0.0;
};

// mu = mu_plus - mu_minus: point masses plus an optional per-edge density
// V(e, t), sampled at mesh nodes and integrated as its nodal interpolant.
struct MeasurePerturbation {
  std::vector<PointMass> point_masses;
  std::function<double(int, double)> edge_density;  // may be empty
};

struct FormMatrices {
  Eigen::SparseMatrix<double> K, M, P_plus, P_minus;
  std::shared_ptr<const Mesh> mesh;

  Eigen::SparseMatrix<double> P() const { return P_plus - P_minus; }
  int dofs() const { return static_cast<int>(K.rows()); }
};

// Relative bound of the negative part: mu_minus(|u|^2) <= kappa * E(u) +
// c_kappa * ||u||^2 holds on the discrete space when admissible.
struct FormBound {
  double kappa = 0.0;
  double c_kappa = 0.0;
  bool admissible = true;
};

// Assemble K, M and the perturbation split on the given mesh. Vertex
// couplings from the graph are always included; `mu` adds to them.
// Point masses at truncated-away locations are rejected.
FormMatrices assemble(std::shared_ptr<const Mesh> mesh, const MeasurePerturbation& mu = {});

// Largest generalized eigenvalue of P_minus against K + cM at one fixed c.
double relative_bound_at(const FormMatrices& fm, double c);

// Scan c over a geometric grid {0.25 * 2^k : k = 0..9}; admissible when some
// kappa(c) < 0.98. Picks the smallest c achieving kappa <= 0.5, else the c
// with the smallest kappa. Inadmissible inputs come back with the best
// (kappa, c) found and admissible = false.
FormBound estimate_form_bound(const FormMatrices& fm);

// Constant C in  \int_E |u'|^2 <= (C / b^2) \int_{B_b(E)} |u|^2  for
// generalized eigenvalues lambda <= lambda0 and negative-part bound
// (q, C_q), valid for all b <= 1. Minimized over a 10^4-point grid in S.
double caccioppoli_constant(double lambda0, double q, double C_q);

}  // namespace graphforms
