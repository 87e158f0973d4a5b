// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Spectral certification pipeline. Given an exact eigensolution u at energy
// lambda, build cutoff functions from the distance to growing core sets,
// form the normalized sequence eta^2 u / ||eta^2 u||, and certify lambda as
// an approximate eigenvalue of the discrete pencil when the collar-to-core
// mass ratios fall below threshold together with the dual-norm residuals.
// Growth analysis picks the core radii where the ball mass J(r) grows
// subexponentially; exponentially growing inputs come back inconclusive.

#pragma once

#include <string>
#include <vector>

#include "graphforms/eigensolution.hpp"
#include "graphforms/eigensolver.hpp"

namespace graphforms {

// Radial profile zeta: [0, inf) -> [0, 1] with zeta(0) = 1, zeta == 0 from b
// on, and |zeta'| <= 2/b. Linear is the default ramp; Smooth is the C^1 cubic
// 1 - 3s^2 + 2s^3 (s = t/b), max slope 1.5/b.
struct CutoffProfile {
  double b = 1.0;
  enum class Kind { Linear, Smooth } kind = Kind::Linear;
};

double cutoff_value(const CutoffProfile& profile, double rho);

// eta = zeta(rho_{e_set}) interpolated on the mesh: 1 on e_set, 0 outside its
// b-neighborhood, exact at mesh nodes. Requires >= 8 cells per b on every
// edge where eta varies, and the ramp must die out before any truncation cut.
PiecewiseFunction make_cutoff(const MetricGraph& g, const Region& e_set,
                              const CutoffProfile& profile, std::shared_ptr<const Mesh> mesh);

enum class Verdict { Certified, Inconclusive };

struct SchnolCertificate {
  double lambda = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> radii;             // ball radii r_n (empty for custom core sets)
  std::vector<double> core_masses;       // ||u chi_{E_n}||
  std::vector<double> collar_masses;     // ||u chi_{A_{3b}(E_n)}||
  std::vector<double> ratios;            // collar / core
  std::vector<double> residuals;         // dual-norm residual of eta_n^2 u
  std::vector<double> growth_ratio;      // J(r_n + 3b) / J(r_n - 3b)
  std::vector<double> growth_increment;  // (J(r_n + 3b) - J(r_n - 3b)) / J(r_n)
  std::string notes;
};

// Ratios, residuals and verdict over caller-chosen increasing core sets.
// The cutoff ramp spans the width of the 3b collar whose mass enters the
// ratio. Verdict: certified when the best ratio beats `ratio_threshold` and
// its residual beats residual_factor * h_max * (1 + |lambda|), the assembly
// interpolation-error scale.
SchnolCertificate weyl_sequence(const MetricGraph& g, const FormMatrices& fm,
                                const PiecewiseFunction& u, double lambda,
                                const std::vector<Region>& e_sets, const CutoffProfile& profile,
                                double ratio_threshold = 0.05, double residual_factor = 10.0);

// All sampled radii r with J(r + b) <= e^delta J(r); J(r + b) is evaluated by
// linear interpolation between samples, and radii whose r + b overshoots the
// sampled range are not reported.
std::vector<double> subexponential_radii(const GrowthProfile& j, double b, double delta);

struct CaccioppoliReport {
  double lambda = 0.0;
  double lhs = 0.0;        // \int_E |u'|^2
  double rhs = 0.0;        // (C / b^2) \int_{B_b(E)} |u|^2
  double empirical = 0.0;  // smallest constant making this case tight
  bool pass = false;
};

// Energy-versus-neighborhood-mass inequality for one (E, b) with constant C.
CaccioppoliReport caccioppoli_check(const MetricGraph& g, const PiecewiseFunction& u,
                                    double lambda, const Region& e_set, double b, double C);

struct IdentityReport {
  // energy identity: \int eta^2 dG(u) against
  // lambda ||eta u||^2 - mu(|eta u|^2) - 2 \int eta eta' u' conj(u)
  double energy_lhs = 0.0;
  Complex energy_rhs{0.0};
  double energy_defect = 0.0;
  // product rule: E(eta u) against
  // \int eta^2 dG(u) + \int |u|^2 dG(eta) + 2 Re \int eta eta' u' conj(u)
  double product_lhs = 0.0;
  double product_rhs = 0.0;
  double product_defect = 0.0;
};

// Both integration-by-parts identities for a generalized eigensolution u and
// a compactly supported real cutoff eta; defects are |lhs - rhs| scaled by
// (|lhs| + |rhs| + 1). Vertex couplings count as part of mu.
IdentityReport identity_check(const MetricGraph& g, const PiecewiseFunction& u, double lambda,
                              const MeasurePerturbation& mu, const PiecewiseFunction& eta);

struct SchnolConfig {
  GraphPoint x0;
  double b = 1.0;
  double delta = 0.05;
  int radius_budget = 16;
  double ratio_threshold = 0.05;
  double residual_factor = 10.0;
  CutoffProfile::Kind kind = CutoffProfile::Kind::Linear;
};

// Full pipeline: sample J on a b-spaced grid (incrementally, by shells),
// find radii where six consecutive steps grow subexponentially, center the
// cores 3b into each run, space them 6b apart, subsample to the budget, and
// run the cutoff sequence on the record subsequence of decreasing ratios.
SchnolCertificate certify(const MetricGraph& g, const FormMatrices& fm,
                          const PiecewiseFunction& u, double lambda, const SchnolConfig& config);

}  // namespace graphforms
