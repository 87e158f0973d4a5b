// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "graphforms/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace graphforms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GLPoint {
  double x, w;
};
// 16-point Gauss-Legendre rule on [-1, 1].
constexpr GLPoint kGL16[] = {
    {-0.9894009349916499, 0.027152459411754037},
    {-0.9445750230732326, 0.062253523938647706},
    {-0.8656312023878318, 0.09515851168249259},
    {-0.755404408355003, 0.12462897125553403},
    {-0.6178762444026438, 0.14959598881657676},
    {-0.45801677765722737, 0.16915651939500262},
    {-0.2816035507792589, 0.1826034150449236},
    {-0.09501250983763745, 0.18945061045506859},
    {0.09501250983763745, 0.18945061045506859},
    {0.2816035507792589, 0.1826034150449236},
    {0.45801677765722737, 0.16915651939500262},
    {0.6178762444026438, 0.14959598881657676},
    {0.755404408355003, 0.12462897125553403},
    {0.8656312023878318, 0.09515851168249259},
    {0.9445750230732326, 0.062253523938647706},
    {0.9894009349916499, 0.027152459411754037},
};

double band_cap_of(const PiecewiseFunction& u) {
  if (u.is_nodal() || u.lambda() == 0.0) return kInf;
  return 4.0 / std::sqrt(std::abs(u.lambda()));
}

void collect_mesh(const PiecewiseFunction& u, std::vector<const Mesh*>& meshes) {
  if (u.is_nodal()) meshes.push_back(&u.mesh());
}

void require_compatible(const PiecewiseFunction& u, const PiecewiseFunction& v) {
  if (!u.is_nodal() || !v.is_nodal()) return;
  if (&u.mesh() == &v.mesh()) return;
  const Mesh& a = u.mesh();
  const Mesh& b = v.mesh();
  if (a.graph_ptr().get() != b.graph_ptr().get())
    throw std::invalid_argument("nodal functions live on different graphs");
  for (int e = 0; e < a.graph().edge_count(); ++e)
    if (a.cells(e) != b.cells(e))
      throw std::invalid_argument("nodal functions live on mismatched meshes");
}

}  // namespace

// ---------------------------------------------------------------------------
// Mesh

Mesh::Mesh(std::shared_ptr<const MetricGraph> g, double target_h)
    : graph_(std::move(g)), target_h_(target_h) {
  if (!graph_) throw std::invalid_argument("mesh needs a graph");
  if (!(target_h > 0.0)) throw std::invalid_argument("mesh size must be > 0");
  int ecount = graph_->edge_count();
  cells_.resize(ecount);
  interior_base_.resize(ecount);
  int next = graph_->vertex_count();
  for (int e = 0; e < ecount; ++e) {
    double len = graph_->edge_length(e);
    cells_[e] = std::max(1, static_cast<int>(std::ceil(len / target_h - 1e-9)));
    interior_base_[e] = next;
    next += cells_[e] - 1;
  }
  dof_count_ = next;
}

double Mesh::max_cell_size() const {
  double h = 0.0;
  for (int e = 0; e < graph_->edge_count(); ++e) h = std::max(h, cell_size(e));
  return h;
}

int Mesh::dof_of_node(int e, int k) const {
  if (k == 0) return graph_->edge_from(e);
  if (k == cells_[e]) return graph_->edge_to(e);  // -1 at a truncation cut
  return interior_base_[e] + (k - 1);
}

// ---------------------------------------------------------------------------
// PiecewiseFunction

PiecewiseFunction PiecewiseFunction::nodal(std::shared_ptr<const Mesh> mesh,
                                           Eigen::VectorXcd dofs) {
  if (!mesh) throw std::invalid_argument("nodal function needs a mesh");
  if (dofs.size() != mesh->dof_count())
    throw std::invalid_argument("dof vector has wrong size for this mesh");
  PiecewiseFunction f;
  f.kind_ = Kind::Nodal;
  f.graph_ = mesh->graph_ptr();
  f.mesh_ = std::move(mesh);
  f.dofs_ = std::move(dofs);
  return f;
}

PiecewiseFunction PiecewiseFunction::exact(std::shared_ptr<const MetricGraph> g, double lambda,
                                           std::vector<std::pair<Complex, Complex>> ab) {
  if (!g) throw std::invalid_argument("exact function needs a graph");
  if (static_cast<int>(ab.size()) != g->edge_count())
    throw std::invalid_argument("need one coefficient pair per edge");
  PiecewiseFunction f;
  f.kind_ = Kind::Exact;
  f.graph_ = std::move(g);
  f.lambda_ = lambda;
  if (lambda < 0.0) {
    double kappa = std::sqrt(-lambda);
    f.coeff_.reserve(ab.size());
    for (auto& [a, b] : ab) f.coeff_.push_back({0.5 * (a + b / kappa), 0.5 * (a - b / kappa)});
  } else {
    f.coeff_ = std::move(ab);
  }
  return f;
}

PiecewiseFunction PiecewiseFunction::exact_exponential(
    std::shared_ptr<const MetricGraph> g, double lambda,
    std::vector<std::pair<Complex, Complex>> pq) {
  if (!g) throw std::invalid_argument("exact function needs a graph");
  if (!(lambda < 0.0))
    throw std::invalid_argument("exponential components only make sense for lambda < 0");
  if (static_cast<int>(pq.size()) != g->edge_count())
    throw std::invalid_argument("need one coefficient pair per edge");
  PiecewiseFunction f;
  f.kind_ = Kind::Exact;
  f.graph_ = std::move(g);
  f.lambda_ = lambda;
  f.coeff_ = std::move(pq);
  return f;
}

double PiecewiseFunction::lambda() const {
  if (kind_ != Kind::Exact) throw std::invalid_argument("not an exact function");
  return lambda_;
}

const MetricGraph& PiecewiseFunction::graph() const { return *graph_; }

const Mesh& PiecewiseFunction::mesh() const {
  if (!mesh_) throw std::invalid_argument("not a nodal function");
  return *mesh_;
}

const std::shared_ptr<const Mesh>& PiecewiseFunction::mesh_ptr() const {
  if (!mesh_) throw std::invalid_argument("not a nodal function");
  return mesh_;
}

const Eigen::VectorXcd& PiecewiseFunction::dofs() const {
  if (kind_ != Kind::Nodal) throw std::invalid_argument("not a nodal function");
  return dofs_;
}

std::pair<Complex, Complex> PiecewiseFunction::ab(int e) const {
  if (kind_ != Kind::Exact) throw std::invalid_argument("not an exact function");
  auto [p, q] = coeff_[e];
  if (lambda_ < 0.0) {
    double kappa = std::sqrt(-lambda_);
    return {p + q, kappa * (p - q)};
  }
  return {p, q};
}

Complex PiecewiseFunction::eval(int e, double t) const {
  if (kind_ == Kind::Nodal) {
    const Mesh& m = *mesh_;
    double h = m.cell_size(e);
    int k = std::clamp(static_cast<int>(std::floor(t / h)), 0, m.cells(e) - 1);
    double xi = t / h - k;
    int d0 = m.dof_of_node(e, k);
    int d1 = m.dof_of_node(e, k + 1);
    Complex v0 = d0 >= 0 ? dofs_[d0] : Complex{0.0};
    Complex v1 = d1 >= 0 ? dofs_[d1] : Complex{0.0};
    return v0 * (1.0 - xi) + v1 * xi;
  }
  auto [p, q] = coeff_[e];
  if (lambda_ > 0.0) {
    double w = std::sqrt(lambda_);
    return p * std::cos(w * t) + q * (std::sin(w * t) / w);
  }
  if (lambda_ == 0.0) return p + q * t;
  double kappa = std::sqrt(-lambda_);
  return p * std::exp(kappa * t) + q * std::exp(-kappa * t);
}

Complex PiecewiseFunction::deriv(int e, double t) const {
  if (kind_ == Kind::Nodal) {
    const Mesh& m = *mesh_;
    double h = m.cell_size(e);
    int k = std::clamp(static_cast<int>(std::floor(t / h)), 0, m.cells(e) - 1);
    int d0 = m.dof_of_node(e, k);
    int d1 = m.dof_of_node(e, k + 1);
    Complex v0 = d0 >= 0 ? dofs_[d0] : Complex{0.0};
    Complex v1 = d1 >= 0 ? dofs_[d1] : Complex{0.0};
    return (v1 - v0) / h;
  }
  auto [p, q] = coeff_[e];
  if (lambda_ > 0.0) {
    double w = std::sqrt(lambda_);
    return -p * w * std::sin(w * t) + q * std::cos(w * t);
  }
  if (lambda_ == 0.0) return q;
  double kappa = std::sqrt(-lambda_);
  return kappa * (p * std::exp(kappa * t) - q * std::exp(-kappa * t));
}

Complex PiecewiseFunction::eval(const MetricGraph& g, GraphPoint p) const {
  p = g.canonical(p);
  if (!p.is_vertex()) return eval(p.edge, p.offset);
  EdgeEnd ee = g.incident(p.vertex).front();
  return eval(ee.edge, ee.end == 0 ? 0.0 : g.edge_length(ee.edge));
}

PiecewiseFunction PiecewiseFunction::scaled(Complex factor) const {
  PiecewiseFunction f = *this;
  if (kind_ == Kind::Nodal) {
    f.dofs_ *= factor;
  } else {
    for (auto& [p, q] : f.coeff_) {
      p *= factor;
      q *= factor;
    }
  }
  return f;
}

EnergyDensity energy_density(const PiecewiseFunction& u) { return EnergyDensity(u); }

// ---------------------------------------------------------------------------
// Quadrature driver

void for_each_quad_point(const MetricGraph& g, const Region& a,
                         const std::vector<const Mesh*>& nodal_meshes, double band_cap,
                         const std::vector<std::vector<double>>* extra_breakpoints,
                         const std::function<void(int, double, double)>& fn) {
  std::vector<double> pts;
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ivs = a.on_edge(e);
    if (ivs.empty()) continue;
    double len = g.edge_length(e);
    double tol = 1e-12 * len;
    for (const Interval& iv : ivs) {
      if (iv.length() <= 0.0) continue;
      pts.clear();
      pts.push_back(iv.a);
      pts.push_back(iv.b);
      for (const Mesh* m : nodal_meshes) {
        double h = m->cell_size(e);
        int k0 = static_cast<int>(std::ceil(iv.a / h));
        int k1 = static_cast<int>(std::floor(iv.b / h));
        for (int k = k0; k <= k1; ++k) {
          double t = k * h;
          if (t > iv.a + tol && t < iv.b - tol) pts.push_back(t);
        }
      }
      if (extra_breakpoints) {
        for (double t : (*extra_breakpoints)[e])
          if (t > iv.a + tol && t < iv.b - tol) pts.push_back(t);
      }
      std::sort(pts.begin(), pts.end());
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double lo = pts[i], hi = pts[i + 1];
        double d = hi - lo;
        if (d <= tol) continue;
        int parts = 1;
        if (std::isfinite(band_cap) && d > band_cap)
          parts = static_cast<int>(std::ceil(d / band_cap));
        double step = d / parts;
        for (int p = 0; p < parts; ++p) {
          double mid = lo + (p + 0.5) * step;
          double half = 0.5 * step;
          for (const GLPoint& q : kGL16) fn(e, mid + half * q.x, half * q.w);
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Integrals

double integrate_sq(const PiecewiseFunction& u, const Region& a) {
  std::vector<const Mesh*> meshes;
  collect_mesh(u, meshes);
  double acc = 0.0;
  for_each_quad_point(u.graph(), a, meshes, band_cap_of(u), nullptr,
                      [&](int e, double t, double w) { acc += w * std::norm(u.eval(e, t)); });
  return acc;
}

double integrate_energy(const PiecewiseFunction& u, const Region& a) {
  std::vector<const Mesh*> meshes;
  collect_mesh(u, meshes);
  double acc = 0.0;
  for_each_quad_point(u.graph(), a, meshes, band_cap_of(u), nullptr,
                      [&](int e, double t, double w) { acc += w * std::norm(u.deriv(e, t)); });
  return acc;
}

Complex inner_product(const PiecewiseFunction& u, const PiecewiseFunction& v, const Region& a) {
  require_compatible(u, v);
  std::vector<const Mesh*> meshes;
  collect_mesh(u, meshes);
  collect_mesh(v, meshes);
  double cap = std::min(band_cap_of(u), band_cap_of(v));
  Complex acc = 0.0;
  for_each_quad_point(u.graph(), a, meshes, cap, nullptr, [&](int e, double t, double w) {
    acc += w * u.eval(e, t) * std::conj(v.eval(e, t));
  });
  return acc;
}

Complex mixed_energy(const PiecewiseFunction& u, const PiecewiseFunction& v, const Region& a) {
  require_compatible(u, v);
  std::vector<const Mesh*> meshes;
  collect_mesh(u, meshes);
  collect_mesh(v, meshes);
  double cap = std::min(band_cap_of(u), band_cap_of(v));
  Complex acc = 0.0;
  for_each_quad_point(u.graph(), a, meshes, cap, nullptr, [&](int e, double t, double w) {
    acc += w * u.deriv(e, t) * std::conj(v.deriv(e, t));
  });
  return acc;
}

Complex cutoff_cross_term(const PiecewiseFunction& u, const PiecewiseFunction& eta,
                          const Region& a) {
  require_compatible(u, eta);
  std::vector<const Mesh*> meshes;
  collect_mesh(u, meshes);
  collect_mesh(eta, meshes);
  double cap = std::min(band_cap_of(u), band_cap_of(eta));
  Complex acc = 0.0;
  for_each_quad_point(u.graph(), a, meshes, cap, nullptr, [&](int e, double t, double w) {
    double h = std::real(eta.eval(e, t));
    double hd = std::real(eta.deriv(e, t));
    acc += w * h * hd * u.deriv(e, t) * std::conj(u.eval(e, t));
  });
  return acc;
}

double product_energy(const PiecewiseFunction& u, const PiecewiseFunction& eta, const Region& a) {
  require_compatible(u, eta);
  std::vector<const Mesh*> meshes;
  collect_mesh(u, meshes);
  collect_mesh(eta, meshes);
  double cap = std::min(band_cap_of(u), band_cap_of(eta));
  double acc = 0.0;
  for_each_quad_point(u.graph(), a, meshes, cap, nullptr, [&](int e, double t, double w) {
    Complex d = eta.deriv(e, t) * u.eval(e, t) + eta.eval(e, t) * u.deriv(e, t);
    acc += w * std::norm(d);
  });
  return acc;
}

double weighted_norm(const MetricGraph& g, const PiecewiseFunction& u, GraphPoint x0,
                     double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("weight rate must be >= 0");
  x0 = g.canonical(x0);
  std::vector<double> labels = vertex_distances_from(g, x0);
  std::vector<EdgeDistanceEnvelope> envs;
  std::vector<std::vector<double>> extra(g.edge_count());
  envs.reserve(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    envs.push_back(make_envelope(g, e, labels, nullptr, &x0));
    extra[e] = envs.back().breakpoints();
  }
  std::vector<const Mesh*> meshes;
  collect_mesh(u, meshes);
  double cap = band_cap_of(u);
  if (alpha > 0.0) cap = std::min(cap, 2.0 / alpha);
  double acc = 0.0;
  for_each_quad_point(g, Region::whole(g), meshes, cap, &extra, [&](int e, double t, double w) {
    double rho = envs[e].eval(t);
    acc += w * std::exp(-2.0 * alpha * rho) * std::norm(u.eval(e, t));
  });
  return std::sqrt(acc);
}

GrowthProfile growth_function(const MetricGraph& g, const PiecewiseFunction& u, GraphPoint x0,
                              const std::vector<double>& radii) {
  x0 = g.canonical(x0);
  if (radii.empty()) throw std::invalid_argument("growth function needs at least one radius");
  double horizon = truncation_horizon(g, x0);
  GrowthProfile gp;
  gp.center = x0;
  double prev = -kInf;
  for (double r : radii) {
    if (!(r >= 0.0)) throw std::invalid_argument("growth radii must be >= 0");
    if (!(r > prev)) throw std::invalid_argument("growth radii must be strictly increasing");
    if (r > horizon)
      throw std::invalid_argument("radius " + std::to_string(r) +
                                  " exceeds the truncation horizon " + std::to_string(horizon));
    prev = r;
    gp.radii.push_back(r);
    gp.values.push_back(integrate_sq(u, ball(g, x0, r)));
  }
  return gp;
}

PiecewiseFunction interpolate(const PiecewiseFunction& u, std::shared_ptr<const Mesh> mesh) {
  const Mesh& m = *mesh;
  const MetricGraph& g = m.graph();
  Eigen::VectorXcd dofs = Eigen::VectorXcd::Zero(m.dof_count());
  for (int v = 0; v < g.vertex_count(); ++v) dofs[v] = u.eval(g, GraphPoint::at_vertex(v));
  for (int e = 0; e < g.edge_count(); ++e)
    for (int k = 1; k < m.cells(e); ++k) dofs[m.dof_of_node(e, k)] = u.eval(e, m.node_offset(e, k));
  return PiecewiseFunction::nodal(std::move(mesh), std::move(dofs));
}

PiecewiseFunction interpolate_distance(const MetricGraph& g, std::shared_ptr<const Mesh> mesh,
                                       const Region& e_set) {
  std::vector<double> labels = vertex_distances_to_region(g, e_set);

  // A truncation cut carries no dof, and nodal evaluation would read it as 0,
  // fabricating a steep final cell. The distance is a plain scalar field, not
  // a form-domain function, so build the interpolant on a twin graph whose
  // cuts are real degree-1 vertices; edge indices and node layout carry over.
  std::shared_ptr<const Mesh> target = std::move(mesh);
  if (g.any_infinite_edge()) {
    std::vector<VertexSpec> vs;
    for (int v = 0; v < g.vertex_count(); ++v) vs.push_back({g.vertex_id(v), 0.0});
    std::vector<EdgeSpec> es;
    for (int e = 0; e < g.edge_count(); ++e) {
      std::string to = g.edge_to(e) >= 0 ? g.vertex_id(g.edge_to(e)) : "#cut:" + g.edge_id(e);
      if (g.edge_to(e) < 0) vs.push_back({to, 0.0});
      es.push_back({g.edge_id(e), g.vertex_id(g.edge_from(e)), to, g.edge_length(e)});
    }
    auto twin = std::make_shared<MetricGraph>(std::move(vs), std::move(es));
    target = std::make_shared<Mesh>(twin, target->target_h());
  }

  const Mesh& m = *target;
  Eigen::VectorXcd dofs = Eigen::VectorXcd::Zero(m.dof_count());
  for (int v = 0; v < g.vertex_count(); ++v) dofs[v] = labels[v];
  for (int e = 0; e < g.edge_count(); ++e) {
    EdgeDistanceEnvelope env = make_envelope(g, e, labels, &e_set, nullptr);
    for (int k = 1; k < m.cells(e); ++k)
      dofs[m.dof_of_node(e, k)] = env.eval(m.node_offset(e, k));
    if (g.edge_to(e) < 0) dofs[m.dof_of_node(e, m.cells(e))] = env.eval(g.edge_length(e));
  }
  return PiecewiseFunction::nodal(std::move(target), std::move(dofs));
}

}  // namespace graphforms
