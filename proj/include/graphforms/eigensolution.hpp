// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Mesh-free eigensolutions: per-edge closed forms of -u'' = lambda u glued by
// continuity and the vertex derivative condition (sum of outgoing derivatives
// equals alpha_v u(v)). A chain-shooting fast path handles degree <= 2 graphs;
// everything else goes through one global least-squares solve over the edge
// coefficients. Truncation cuts carry no condition: the solution represents a
// function on the untruncated graph.

#pragma once

#include <map>
#include <memory>
#include <optional>

#include "graphforms/forms.hpp"
#include "graphforms/function_space.hpp"

namespace graphforms {

// Fundamental pair at energy lambda, value/derivative-normalized at t = 0:
// c(0) = 1, c'(0) = 0, s(0) = 0, s'(0) = 1; the Wronskian c s' - c' s is 1.
struct EdgeBasis {
  double lambda = 0.0;
  double c(double t) const;
  double s(double t) const;
  double cp(double t) const;
  double sp(double t) const;
  double wronskian(double t) const { return c(t) * sp(t) - cp(t) * s(t); }
};

EdgeBasis edge_basis(double lambda);

// Root data: u(vertex) = value, and per incident edge the outgoing derivative
// at the root (edge_derivative overrides `derivative` for specific edges,
// keyed by edge index).
struct SeedSpec {
  int vertex = 0;
  Complex value = 1.0;
  Complex derivative = 0.0;
  std::map<int, Complex> edge_derivative;
};

struct ShootResult {
  std::optional<PiecewiseFunction> solution;  // empty when infeasible
  double matching_residual = 0.0;             // scaled defect of the glue equations
  bool feasible() const { return solution.has_value(); }
};

// Solve for an exact eigensolution matching the seed. Infeasible seeds (e.g.
// a compact graph away from its spectrum, or contradictory root data) come
// back without a solution and with the violated matching residual.
ShootResult shoot(std::shared_ptr<const MetricGraph> g, double lambda, const SeedSpec& seed);

// Max over compactly supported tent probes v of
//   |E(u, v) + mu(u conj(v)) - lambda (u, v)| / ||v||_h,
// with the vertex couplings alpha_v included in the mu term and
// ||v||_h^2 = E(v) + ||v||^2 + |mu|(|v|^2). Probe placement is deterministic:
// hats at every vertex first, then interior tents spread over the edges.
double verify_eigensolution(const MetricGraph& g, const PiecewiseFunction& u, double lambda,
                            const MeasurePerturbation& mu = {}, int probes = 32);

}  // namespace graphforms
