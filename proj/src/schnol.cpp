// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "graphforms/schnol.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace graphforms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

Eigen::VectorXcd nodal_values(const PiecewiseFunction& u, const std::shared_ptr<const Mesh>& mesh) {
  if (!u.is_nodal()) return interpolate(u, mesh).dofs();
  const Mesh& a = u.mesh();
  const Mesh& b = *mesh;
  if (a.graph_ptr().get() != b.graph_ptr().get())
    throw std::invalid_argument("eigensolution and assembly live on different graphs");
  for (int e = 0; e < a.graph().edge_count(); ++e)
    if (a.cells(e) != b.cells(e))
      throw std::invalid_argument("nodal eigensolution does not match the assembly mesh");
  return u.dofs();
}

double m_norm2(const FormMatrices& fm, const Eigen::VectorXcd& w) {
  Eigen::VectorXd re = w.real(), im = w.imag();
  return re.dot(fm.M * re) + im.dot(fm.M * im);
}

struct SeqStep {
  double core = 0.0, collar_mass = 0.0, ratio = kInf;
};

std::optional<SeqStep> masses_of(const MetricGraph& g, const PiecewiseFunction& u,
                                 const Region& e_set, double b, std::string& notes) {
  SeqStep st;
  st.core = std::sqrt(integrate_sq(u, e_set));
  if (!(st.core > 0.0)) {
    notes += "skipped a core set carrying no mass; ";
    return std::nullopt;
  }
  st.collar_mass = std::sqrt(integrate_sq(u, collar(g, e_set, 3.0 * b)));
  st.ratio = st.collar_mass / st.core;
  return st;
}

double residual_of(const MetricGraph& g, const FormMatrices& fm, const Eigen::VectorXcd& unodal,
                   double lambda, const Region& e_set, double b, CutoffProfile::Kind kind,
                   const FormBound& bound, std::string& notes) {
  // the cutoff ramp spans the 3b collar, where the ratio's mass lives
  PiecewiseFunction eta = make_cutoff(g, e_set, CutoffProfile{3.0 * b, kind}, fm.mesh);
  Eigen::VectorXcd w(unodal.size());
  for (int i = 0; i < unodal.size(); ++i) {
    double h = std::real(eta.dofs()[i]);
    w[i] = h * h * unodal[i];
  }
  if (!(m_norm2(fm, w) > 0.0)) {
    notes += "cutoff annihilated the eigensolution on one core set; ";
    return kNaN;
  }
  return weyl_residual(fm, w, lambda, bound);
}

Verdict decide(const SchnolCertificate& cert, const FormMatrices& fm, double ratio_threshold,
               double residual_factor) {
  double res_threshold = residual_factor * fm.mesh->max_cell_size() * (1.0 + std::abs(cert.lambda));
  int best = -1;
  for (size_t i = 0; i < cert.ratios.size(); ++i) {
    if (std::isnan(cert.residuals[i])) continue;
    if (best < 0 || cert.ratios[i] < cert.ratios[best]) best = static_cast<int>(i);
  }
  if (best < 0) return Verdict::Inconclusive;
  bool ok = cert.ratios[best] < ratio_threshold && cert.residuals[best] < res_threshold;
  return ok ? Verdict::Certified : Verdict::Inconclusive;
}

}  // namespace

double cutoff_value(const CutoffProfile& profile, double rho) {
  if (!(profile.b > 0.0)) throw std::invalid_argument("cutoff width must be > 0");
  double s = rho / profile.b;
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  if (profile.kind == CutoffProfile::Kind::Linear) return 1.0 - s;
  return 1.0 - 3.0 * s * s + 2.0 * s * s * s;
}

PiecewiseFunction make_cutoff(const MetricGraph& g, const Region& e_set,
                              const CutoffProfile& profile, std::shared_ptr<const Mesh> mesh) {
  if (e_set.empty()) throw std::invalid_argument("cutoff needs a nonempty region");
  if (!(profile.b > 0.0)) throw std::invalid_argument("cutoff width must be > 0");
  const Mesh& m = *mesh;

  Region nb = neighborhood(g, e_set, profile.b);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (nb.on_edge(e).empty()) continue;
    double len = g.edge_length(e);
    double tol = 1e-12 * len;
    bool covered = false;
    for (const Interval& iv : e_set.on_edge(e))
      covered = covered || (iv.a <= tol && iv.b >= len - tol);
    if (covered) continue;
    if (m.cell_size(e) > profile.b / 8.0 * (1.0 + 1e-12))
      throw std::invalid_argument("mesh too coarse for the cutoff on edge '" + g.edge_id(e) +
                                  "': need cell size <= " + fmt(profile.b / 8.0) + ", have " +
                                  fmt(m.cell_size(e)));
  }

  std::vector<double> labels = vertex_distances_to_region(g, e_set);
  Eigen::VectorXcd dofs = Eigen::VectorXcd::Zero(m.dof_count());
  for (int v = 0; v < g.vertex_count(); ++v)
    dofs[v] = std::isfinite(labels[v]) ? cutoff_value(profile, labels[v]) : 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    EdgeDistanceEnvelope env = make_envelope(g, e, labels, &e_set, nullptr);
    if (g.edge_to(e) < 0 && env.eval(g.edge_length(e)) < profile.b * (1.0 - 1e-9))
      throw std::invalid_argument("cutoff ramp reaches the truncation cut on edge '" +
                                  g.edge_id(e) + "'; enlarge the truncation length");
    for (int k = 1; k < m.cells(e); ++k) {
      double rho = env.eval(m.node_offset(e, k));
      dofs[m.dof_of_node(e, k)] = std::isfinite(rho) ? cutoff_value(profile, rho) : 0.0;
    }
  }
  return PiecewiseFunction::nodal(std::move(mesh), std::move(dofs));
}

SchnolCertificate weyl_sequence(const MetricGraph& g, const FormMatrices& fm,
                                const PiecewiseFunction& u, double lambda,
                                const std::vector<Region>& e_sets, const CutoffProfile& profile,
                                double ratio_threshold, double residual_factor) {
  if (e_sets.empty()) throw std::invalid_argument("need at least one core set");
  for (size_t i = 0; i + 1 < e_sets.size(); ++i)
    if (!e_sets[i + 1].contains_region(g, e_sets[i]))
      throw std::invalid_argument("core sets must be increasing");
  FormBound bound = estimate_form_bound(fm);
  if (!bound.admissible)
    throw std::runtime_error("negative part is not form bounded on the scanned grid");
  Eigen::VectorXcd unodal = nodal_values(u, fm.mesh);

  SchnolCertificate cert;
  cert.lambda = lambda;
  for (const Region& e_set : e_sets) {
    auto st = masses_of(g, u, e_set, profile.b, cert.notes);
    if (!st) continue;
    cert.core_masses.push_back(st->core);
    cert.collar_masses.push_back(st->collar_mass);
    cert.ratios.push_back(st->ratio);
    cert.residuals.push_back(residual_of(g, fm, unodal, lambda, e_set, profile.b, profile.kind,
                                         bound, cert.notes));
  }
  cert.verdict = decide(cert, fm, ratio_threshold, residual_factor);
  return cert;
}

std::vector<double> subexponential_radii(const GrowthProfile& j, double b, double delta) {
  if (!(b > 0.0)) throw std::invalid_argument("step b must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (j.radii.size() != j.values.size() || j.radii.empty())
    throw std::invalid_argument("malformed growth profile");
  double gap = 0.0;
  for (size_t i = 0; i + 1 < j.radii.size(); ++i) {
    if (j.radii[i + 1] <= j.radii[i])
      throw std::invalid_argument("growth radii must be increasing");
    if (j.values[i + 1] < j.values[i] * (1.0 - 1e-12) - 1e-300)
      throw std::invalid_argument("growth profile must be nondecreasing");
    gap = std::max(gap, j.radii[i + 1] - j.radii[i]);
  }
  if (gap > b * (1.0 + 1e-12) && j.radii.size() > 1)
    std::cerr << "note: growth samples are " << gap << " apart but the step is " << b
              << "; J(r + b) is interpolated\n";

  auto jat = [&](double r) -> std::optional<double> {
    if (r > j.radii.back() + 1e-12 * (1.0 + std::abs(j.radii.back()))) return std::nullopt;
    auto it = std::lower_bound(j.radii.begin(), j.radii.end(), r);
    size_t hi = static_cast<size_t>(it - j.radii.begin());
    if (hi >= j.radii.size()) hi = j.radii.size() - 1;
    if (hi == 0) return j.values.front();
    double r0 = j.radii[hi - 1], r1 = j.radii[hi];
    double t = (r - r0) / (r1 - r0);
    return j.values[hi - 1] * (1.0 - t) + j.values[hi] * t;
  };

  double factor = std::exp(delta);
  std::vector<double> out;
  for (size_t i = 0; i < j.radii.size(); ++i) {
    auto ahead = jat(j.radii[i] + b);
    if (!ahead) continue;
    if (*ahead <= factor * j.values[i] * (1.0 + 1e-12)) out.push_back(j.radii[i]);
  }
  return out;
}

CaccioppoliReport caccioppoli_check(const MetricGraph& g, const PiecewiseFunction& u,
                                    double lambda, const Region& e_set, double b, double C) {
  if (e_set.empty()) throw std::invalid_argument("need a nonempty region");
  if (!(b > 0.0)) throw std::invalid_argument("need b > 0");
  CaccioppoliReport rep;
  rep.lambda = lambda;
  rep.lhs = integrate_energy(u, e_set);
  double mass = integrate_sq(u, neighborhood(g, e_set, b));
  rep.rhs = C / (b * b) * mass;
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-8);
  rep.empirical = mass > 0.0 ? rep.lhs * b * b / mass : (rep.lhs > 0.0 ? kInf : 0.0);
  return rep;
}

IdentityReport identity_check(const MetricGraph& g, const PiecewiseFunction& u, double lambda,
                              const MeasurePerturbation& mu, const PiecewiseFunction& eta) {
  Region whole = Region::whole(g);
  std::vector<const Mesh*> meshes;
  if (u.is_nodal()) meshes.push_back(&u.mesh());
  if (eta.is_nodal()) meshes.push_back(&eta.mesh());
  double cap = kInf;
  for (const PiecewiseFunction* f : {&u, &eta})
    if (!f->is_nodal() && f->lambda() != 0.0)
      cap = std::min(cap, 4.0 / std::sqrt(std::abs(f->lambda())));

  double e_sq_du = 0.0, u_sq_de = 0.0, eta_u_sq = 0.0, direct = 0.0, dens = 0.0;
  Complex cross = 0.0;
  for_each_quad_point(g, whole, meshes, cap, nullptr, [&](int e, double t, double w) {
    double h = std::real(eta.eval(e, t));
    double hd = std::real(eta.deriv(e, t));
    Complex uu = u.eval(e, t), ud = u.deriv(e, t);
    e_sq_du += w * h * h * std::norm(ud);
    u_sq_de += w * hd * hd * std::norm(uu);
    eta_u_sq += w * h * h * std::norm(uu);
    cross += w * h * hd * ud * std::conj(uu);
    direct += w * std::norm(hd * uu + h * ud);
    if (mu.edge_density) dens += w * mu.edge_density(e, t) * h * h * std::norm(uu);
  });

  double mu_points = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.alpha(v) == 0.0) continue;
    GraphPoint p = GraphPoint::at_vertex(v);
    double h = std::real(eta.eval(g, p));
    mu_points += g.alpha(v) * h * h * std::norm(u.eval(g, p));
  }
  for (const PointMass& pm : mu.point_masses) {
    GraphPoint p = g.canonical(pm.where);
    double h = std::real(eta.eval(g, p));
    mu_points += pm.weight * h * h * std::norm(u.eval(g, p));
  }

  IdentityReport rep;
  rep.energy_lhs = e_sq_du;
  rep.energy_rhs = lambda * eta_u_sq - (mu_points + dens) - 2.0 * cross;
  rep.energy_defect =
      std::abs(rep.energy_lhs - rep.energy_rhs) /
      (std::abs(rep.energy_lhs) + std::abs(rep.energy_rhs) + 1.0);
  rep.product_lhs = direct;
  rep.product_rhs = e_sq_du + u_sq_de + 2.0 * std::real(cross);
  rep.product_defect = std::abs(rep.product_lhs - rep.product_rhs) /
                       (std::abs(rep.product_lhs) + std::abs(rep.product_rhs) + 1.0);
  return rep;
}

SchnolCertificate certify(const MetricGraph& g, const FormMatrices& fm,
                          const PiecewiseFunction& u, double lambda, const SchnolConfig& config) {
  if (!(config.b > 0.0)) throw std::invalid_argument("need b > 0");
  if (!(config.delta > 0.0)) throw std::invalid_argument("need delta > 0");
  if (config.radius_budget < 1) throw std::invalid_argument("need a positive radius budget");
  GraphPoint x0 = g.canonical(config.x0);
  double b = config.b;

  SchnolCertificate cert;
  cert.lambda = lambda;

  double horizon = truncation_horizon(g, x0);
  double r_max;
  if (std::isfinite(horizon)) {
    r_max = horizon - 3.0 * b;
  } else {
    std::vector<double> labels = vertex_distances_from(g, x0);
    double far = 0.0, longest = 0.0;
    for (int v = 0; v < g.vertex_count(); ++v)
      if (std::isfinite(labels[v])) far = std::max(far, labels[v]);
    for (int e = 0; e < g.edge_count(); ++e) longest = std::max(longest, g.edge_length(e));
    r_max = far + longest + 7.0 * b;
  }
  int n_grid = static_cast<int>(std::floor(r_max / b + 1e-9));
  if (n_grid < 7) {
    cert.notes = "no room for growth analysis: sampled range reaches only r = " + fmt(r_max) +
                 " (truncation horizon " + fmt(horizon) + ")";
    return cert;
  }

  // ball masses on the b-grid, accumulated shell by shell
  GrowthProfile jp;
  jp.center = x0;
  Region prev = ball(g, x0, b);
  jp.radii.push_back(b);
  jp.values.push_back(integrate_sq(u, prev));
  for (int i = 2; i <= n_grid; ++i) {
    Region cur = ball(g, x0, i * b);
    Region shell = Region::intersect(g, cur, prev.complement(g));
    jp.radii.push_back(i * b);
    jp.values.push_back(jp.values.back() + integrate_sq(u, shell));
    prev = std::move(cur);
  }
  const std::vector<double>& jv = jp.values;

  std::vector<double> good = subexponential_radii(jp, b, config.delta);
  std::vector<char> q(n_grid + 1, 0);
  for (double r : good) q[static_cast<int>(std::lround(r / b))] = 1;

  // core radii sit 3b inside a run of six subexponential steps, 6b apart
  std::vector<int> centers;
  int last = -7;
  for (int i = 1; i + 5 <= n_grid; ++i) {
    bool run = true;
    for (int k = 0; k < 6; ++k) run = run && q[i + k];
    if (run && i + 3 >= last + 6) {
      centers.push_back(i + 3);
      last = i + 3;
    }
  }
  if (centers.empty()) {
    cert.notes = good.empty()
                     ? "no subexponential radii within the sampled range (r <= " + fmt(r_max) +
                           ", truncation horizon " + fmt(horizon) + ")"
                     : "subexponential radii never persist over six consecutive steps";
    if (g.has_truncation())
      cert.notes += "; leads truncated at L = " + fmt(g.truncation_length());
    return cert;
  }
  if (static_cast<int>(centers.size()) > config.radius_budget) {
    std::vector<int> pick;
    int m = static_cast<int>(centers.size());
    for (int i = 0; i < config.radius_budget; ++i) {
      int idx = static_cast<int>(std::lround(double(i) * (m - 1) / (config.radius_budget - 1)));
      if (pick.empty() || centers[idx] != pick.back()) pick.push_back(centers[idx]);
    }
    centers = std::move(pick);
  }

  FormBound bound = estimate_form_bound(fm);
  if (!bound.admissible)
    throw std::runtime_error("negative part is not form bounded on the scanned grid");
  Eigen::VectorXcd unodal = nodal_values(u, fm.mesh);

  // keep the record subsequence of decreasing ratios, then attach residuals
  double best = kInf;
  for (int c : centers) {
    double r = c * b;
    Region e_set = ball(g, x0, r);
    auto st = masses_of(g, u, e_set, b, cert.notes);
    if (!st || st->ratio > best + 1e-12) continue;
    best = std::min(best, st->ratio);
    cert.radii.push_back(r);
    cert.core_masses.push_back(st->core);
    cert.collar_masses.push_back(st->collar_mass);
    cert.ratios.push_back(st->ratio);
    cert.residuals.push_back(
        residual_of(g, fm, unodal, lambda, e_set, b, config.kind, bound, cert.notes));
    cert.growth_ratio.push_back(jv[c - 4] > 0.0 ? jv[c + 2] / jv[c - 4] : kInf);
    cert.growth_increment.push_back(jv[c - 1] > 0.0 ? (jv[c + 2] - jv[c - 4]) / jv[c - 1] : kInf);
  }
  if (g.has_truncation())
    cert.notes += "leads truncated at L = " + fmt(g.truncation_length()) +
                  "; rerun with a doubled truncation to assess sensitivity";
  cert.verdict = decide(cert, fm, config.ratio_threshold, config.residual_factor);
  return cert;
}

}  // namespace graphforms
