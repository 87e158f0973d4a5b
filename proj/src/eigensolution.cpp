// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "graphforms/eigensolution.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace graphforms {

double EdgeBasis::c(double t) const {
  if (lambda > 0.0) return std::cos(std::sqrt(lambda) * t);
  if (lambda == 0.0) return 1.0;
  return std::cosh(std::sqrt(-lambda) * t);
}

double EdgeBasis::s(double t) const {
  if (lambda > 0.0) {
    double w = std::sqrt(lambda);
    return std::sin(w * t) / w;
  }
  if (lambda == 0.0) return t;
  double k = std::sqrt(-lambda);
  return std::sinh(k * t) / k;
}

double EdgeBasis::cp(double t) const {
  if (lambda > 0.0) {
    double w = std::sqrt(lambda);
    return -w * std::sin(w * t);
  }
  if (lambda == 0.0) return 0.0;
  double k = std::sqrt(-lambda);
  return k * std::sinh(k * t);
}

double EdgeBasis::sp(double t) const {
  if (lambda > 0.0) return std::cos(std::sqrt(lambda) * t);
  if (lambda == 0.0) return 1.0;
  return std::cosh(std::sqrt(-lambda) * t);
}

EdgeBasis edge_basis(double lambda) { return EdgeBasis{lambda}; }

namespace {

// Unknowns x are two coefficients per edge. For lambda >= 0 these are the
// fundamental-basis pair (A, B). For lambda < 0 they are the scaled
// exponential components (Pt, Q) with u = Pt e^{-k(l-t)} + Q e^{-kt}: every
// matrix entry then has magnitude <= max(1, k), whatever the edge length.
struct CoeffBasis {
  double lambda, kappa;
  explicit CoeffBasis(double l) : lambda(l), kappa(l < 0.0 ? std::sqrt(-l) : 0.0) {}

  std::pair<double, double> value(double t, double len) const {
    EdgeBasis eb{lambda};
    if (lambda >= 0.0) return {eb.c(t), eb.s(t)};
    return {std::exp(-kappa * (len - t)), std::exp(-kappa * t)};
  }
  std::pair<double, double> deriv(double t, double len) const {
    EdgeBasis eb{lambda};
    if (lambda >= 0.0) return {eb.cp(t), eb.sp(t)};
    return {kappa * std::exp(-kappa * (len - t)), -kappa * std::exp(-kappa * t)};
  }
};

struct LinRow {
  std::vector<std::pair<int, double>> coeffs;  // column, real coefficient
  Complex rhs{0.0};
};

// end 0 sits at t = 0, end 1 at t = len; outgoing points into the edge.
void add_value(LinRow& row, const CoeffBasis& cb, int e, int end, double len, double scale) {
  auto [f, g] = cb.value(end == 0 ? 0.0 : len, len);
  row.coeffs.push_back({2 * e, scale * f});
  row.coeffs.push_back({2 * e + 1, scale * g});
}

void add_outgoing(LinRow& row, const CoeffBasis& cb, int e, int end, double len, double scale) {
  double sgn = end == 0 ? 1.0 : -1.0;
  auto [f, g] = cb.deriv(end == 0 ? 0.0 : len, len);
  row.coeffs.push_back({2 * e, sgn * scale * f});
  row.coeffs.push_back({2 * e + 1, sgn * scale * g});
}

std::vector<LinRow> matching_rows(const MetricGraph& g, const CoeffBasis& cb,
                                  const SeedSpec& seed) {
  std::vector<LinRow> rows;
  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto& inc = g.incident(v);
    EdgeEnd ref = inc.front();
    double rlen = g.edge_length(ref.edge);
    for (size_t i = 1; i < inc.size(); ++i) {
      LinRow row;
      add_value(row, cb, inc[i].edge, inc[i].end, g.edge_length(inc[i].edge), 1.0);
      add_value(row, cb, ref.edge, ref.end, rlen, -1.0);
      rows.push_back(std::move(row));
    }
    LinRow kirchhoff;
    for (const EdgeEnd& ee : inc)
      add_outgoing(kirchhoff, cb, ee.edge, ee.end, g.edge_length(ee.edge), 1.0);
    add_value(kirchhoff, cb, ref.edge, ref.end, rlen, -g.alpha(v));
    rows.push_back(std::move(kirchhoff));
  }

  const auto& inc = g.incident(seed.vertex);
  LinRow val;
  add_value(val, cb, inc.front().edge, inc.front().end, g.edge_length(inc.front().edge), 1.0);
  val.rhs = seed.value;
  rows.push_back(std::move(val));
  for (const EdgeEnd& ee : inc) {
    LinRow der;
    add_outgoing(der, cb, ee.edge, ee.end, g.edge_length(ee.edge), 1.0);
    auto it = seed.edge_derivative.find(ee.edge);
    der.rhs = it != seed.edge_derivative.end() ? it->second : seed.derivative;
    rows.push_back(std::move(der));
  }
  return rows;
}

double row_norm(const LinRow& row) {
  double s = 0.0;
  for (auto& [col, a] : row.coeffs) s += a * a;
  return std::sqrt(s);
}

double max_defect(const std::vector<LinRow>& rows, const Eigen::VectorXcd& x) {
  double worst = 0.0;
  for (const LinRow& row : rows) {
    Complex acc = -row.rhs;
    for (auto& [col, a] : row.coeffs) acc += a * x[col];
    double nrm = row_norm(row);
    if (nrm > 0.0) worst = std::max(worst, std::abs(acc) / nrm);
  }
  return worst;
}

// Chain propagation: applicable when the whole graph is a path reachable from
// the seed with every degree <= 2 and no cycle.
std::optional<Eigen::VectorXcd> chain_solve(const MetricGraph& g, const CoeffBasis& cb,
                                            const SeedSpec& seed) {
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) > 2) return std::nullopt;
  for (int e = 0; e < g.edge_count(); ++e)
    if (g.edge_from(e) == g.edge_to(e)) return std::nullopt;

  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(2 * g.edge_count());
  std::vector<char> edge_done(g.edge_count(), 0), vertex_done(g.vertex_count(), 0);

  // solve the 2x2 for the coefficients from end data, then evaluate the far end
  auto seed_edge = [&](int e, int end, Complex value, Complex outgoing) {
    double len = g.edge_length(e);
    auto [fv, gv] = cb.value(end == 0 ? 0.0 : len, len);
    auto [fd, gd] = cb.deriv(end == 0 ? 0.0 : len, len);
    double sgn = end == 0 ? 1.0 : -1.0;
    double det = fv * sgn * gd - gv * sgn * fd;
    Complex a = (value * sgn * gd - gv * outgoing) / det;
    Complex b = (fv * outgoing - value * sgn * fd) / det;
    x[2 * e] = a;
    x[2 * e + 1] = b;
    edge_done[e] = 1;
  };
  auto at_end = [&](int e, int end) {
    double len = g.edge_length(e);
    auto [fv, gv] = cb.value(end == 0 ? 0.0 : len, len);
    auto [fd, gd] = cb.deriv(end == 0 ? 0.0 : len, len);
    double sgn = end == 0 ? 1.0 : -1.0;
    Complex value = fv * x[2 * e] + gv * x[2 * e + 1];
    Complex outgoing = sgn * (fd * x[2 * e] + gd * x[2 * e + 1]);
    return std::pair<Complex, Complex>{value, outgoing};
  };

  struct Front {
    int edge, far_end;
  };
  std::deque<Front> frontier;
  vertex_done[seed.vertex] = 1;
  for (const EdgeEnd& ee : g.incident(seed.vertex)) {
    if (edge_done[ee.edge]) return std::nullopt;  // two ends at the seed: a loop
    auto it = seed.edge_derivative.find(ee.edge);
    Complex d = it != seed.edge_derivative.end() ? it->second : seed.derivative;
    seed_edge(ee.edge, ee.end, seed.value, d);
    frontier.push_back({ee.edge, 1 - ee.end});
  }

  while (!frontier.empty()) {
    Front fr = frontier.front();
    frontier.pop_front();
    int v = g.end_vertex(fr.edge, fr.far_end);
    if (v < 0) continue;  // truncation cut: free end
    if (vertex_done[v]) return std::nullopt;  // cycle
    vertex_done[v] = 1;
    auto [value, out_back] = at_end(fr.edge, fr.far_end);
    for (const EdgeEnd& ee : g.incident(v)) {
      if (ee.edge == fr.edge && ee.end == fr.far_end) continue;
      if (edge_done[ee.edge]) return std::nullopt;
      seed_edge(ee.edge, ee.end, value, g.alpha(v) * value - out_back);
      frontier.push_back({ee.edge, 1 - ee.end});
    }
  }

  for (char d : edge_done)
    if (!d) return std::nullopt;  // disconnected: no data to propagate
  return x;
}

}  // namespace

ShootResult shoot(std::shared_ptr<const MetricGraph> gp, double lambda, const SeedSpec& seed) {
  const MetricGraph& g = *gp;
  if (seed.vertex < 0 || seed.vertex >= g.vertex_count())
    throw std::invalid_argument("seed vertex out of range");
  for (auto& [e, d] : seed.edge_derivative)
    if (e < 0 || e >= g.edge_count()) throw std::invalid_argument("seed edge out of range");

  CoeffBasis cb(lambda);
  std::vector<LinRow> rows = matching_rows(g, cb, seed);

  Eigen::VectorXcd x;
  if (auto fast = chain_solve(g, cb, seed)) {
    x = std::move(*fast);
  } else {
    if (g.edge_count() > 200)
      throw std::invalid_argument(
          "graphs with cycles or branching support at most 200 edges in the global solve");
    int ncols = 2 * g.edge_count();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<int>(rows.size()), ncols);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      double nrm = row_norm(rows[i]);
      if (nrm == 0.0) continue;
      for (auto& [col, coef] : rows[i].coeffs) a(static_cast<int>(i), col) += coef / nrm;
      b[static_cast<int>(i)] = rows[i].rhs / nrm;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(a);
    x = cod.solve(b);
  }

  double scale = 1.0 + std::abs(seed.value) + std::abs(seed.derivative);
  for (auto& [e, d] : seed.edge_derivative) scale += std::abs(d);
  ShootResult res;
  res.matching_residual = max_defect(rows, x);
  if (res.matching_residual > 1e-8 * scale) return res;
  if (x.lpNorm<Eigen::Infinity>() <= 1e-12 * scale) return res;  // only the zero solution

  std::vector<std::pair<Complex, Complex>> coeff(g.edge_count());
  if (lambda < 0.0) {
    for (int e = 0; e < g.edge_count(); ++e)
      coeff[e] = {x[2 * e] * std::exp(-cb.kappa * g.edge_length(e)), x[2 * e + 1]};
    res.solution = PiecewiseFunction::exact_exponential(gp, lambda, std::move(coeff));
  } else {
    for (int e = 0; e < g.edge_count(); ++e) coeff[e] = {x[2 * e], x[2 * e + 1]};
    res.solution = PiecewiseFunction::exact(gp, lambda, std::move(coeff));
  }
  return res;
}

namespace {

struct Tent {
  struct Seg {
    int e;
    double a, b, va, vb;
  };
  std::vector<Seg> segs;

  double eval(int e, double t) const {
    for (const Seg& s : segs)
      if (s.e == e && t >= s.a - 1e-14 && t <= s.b + 1e-14) {
        double xi = (t - s.a) / (s.b - s.a);
        return s.va * (1.0 - xi) + s.vb * xi;
      }
    return 0.0;
  }

  double at_point(const MetricGraph& g, GraphPoint p) const {
    p = g.canonical(p);
    if (!p.is_vertex()) return eval(p.edge, p.offset);
    for (const EdgeEnd& ee : g.incident(p.vertex)) {
      double t = ee.end == 0 ? 0.0 : g.edge_length(ee.edge);
      double v = eval(ee.edge, t);
      if (v != 0.0) return v;
    }
    return 0.0;
  }
};

constexpr double kVerifyGL[][2] = {
    {-0.9894009349916499, 0.027152459411754037}, {-0.9445750230732326, 0.062253523938647706},
    {-0.8656312023878318, 0.09515851168249259},  {-0.755404408355003, 0.12462897125553403},
    {-0.6178762444026438, 0.14959598881657676},  {-0.45801677765722737, 0.16915651939500262},
    {-0.2816035507792589, 0.1826034150449236},   {-0.09501250983763745, 0.18945061045506859},
    {0.09501250983763745, 0.18945061045506859},  {0.2816035507792589, 0.1826034150449236},
    {0.45801677765722737, 0.16915651939500262},  {0.6178762444026438, 0.14959598881657676},
    {0.755404408355003, 0.12462897125553403},    {0.8656312023878318, 0.09515851168249259},
    {0.9445750230732326, 0.062253523938647706},  {0.9894009349916499, 0.027152459411754037},
};

}  // namespace

double verify_eigensolution(const MetricGraph& g, const PiecewiseFunction& u, double lambda,
                            const MeasurePerturbation& mu, int probes) {
  if (probes < 1) throw std::invalid_argument("need at least one probe");

  std::vector<Tent> tents;
  for (int v = 0; v < g.vertex_count() && static_cast<int>(tents.size()) < probes; ++v) {
    double w = std::numeric_limits<double>::infinity();
    for (const EdgeEnd& ee : g.incident(v)) w = std::min(w, g.edge_length(ee.edge));
    w *= 0.45;
    Tent t;
    for (const EdgeEnd& ee : g.incident(v)) {
      double len = g.edge_length(ee.edge);
      if (ee.end == 0)
        t.segs.push_back({ee.edge, 0.0, w, 1.0, 0.0});
      else
        t.segs.push_back({ee.edge, len - w, len, 0.0, 1.0});
    }
    tents.push_back(std::move(t));
  }
  int k = 0;
  while (static_cast<int>(tents.size()) < probes) {
    int e = k % g.edge_count();
    double f = std::fmod(0.5 + 0.6180339887498949 * k, 1.0);
    double len = g.edge_length(e);
    double center = len * (0.2 + 0.6 * f);
    double w = 0.45 * std::min(center, len - center);
    Tent t;
    t.segs.push_back({e, center - w, center, 0.0, 1.0});
    t.segs.push_back({e, center, center + w, 1.0, 0.0});
    tents.push_back(std::move(t));
    ++k;
  }

  double cap = std::numeric_limits<double>::infinity();
  if (!u.is_nodal() && u.lambda() != 0.0) cap = 4.0 / std::sqrt(std::abs(u.lambda()));

  double worst = 0.0;
  for (const Tent& tent : tents) {
    Complex energy_uv = 0.0, ip = 0.0, density_uv = 0.0;
    double energy_v = 0.0, vsq = 0.0, density_vv = 0.0;
    for (const Tent::Seg& s : tent.segs) {
      double slen = s.b - s.a;
      double slope = (s.vb - s.va) / slen;
      energy_uv += slope * (u.eval(s.e, s.b) - u.eval(s.e, s.a));
      energy_v += slope * slope * slen;
      vsq += slen * (s.va * s.va + s.va * s.vb + s.vb * s.vb) / 3.0;
      int parts = std::isfinite(cap) ? std::max(1, static_cast<int>(std::ceil(slen / cap))) : 1;
      double step = slen / parts;
      for (int p = 0; p < parts; ++p) {
        double mid = s.a + (p + 0.5) * step, half = 0.5 * step;
        for (auto& q : kVerifyGL) {
          double t = mid + half * q[0], wq = half * q[1];
          double vt = s.va + slope * (t - s.a);
          Complex ut = u.eval(s.e, t);
          ip += wq * ut * vt;
          if (mu.edge_density) {
            double dv = mu.edge_density(s.e, t);
            density_uv += wq * dv * ut * vt;
            density_vv += wq * std::abs(dv) * vt * vt;
          }
        }
      }
    }

    Complex point_uv = 0.0;
    double point_vv = 0.0;
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (g.alpha(v) == 0.0) continue;
      double tv = tent.at_point(g, GraphPoint::at_vertex(v));
      if (tv == 0.0) continue;
      point_uv += g.alpha(v) * u.eval(g, GraphPoint::at_vertex(v)) * tv;
      point_vv += std::abs(g.alpha(v)) * tv * tv;
    }
    for (const PointMass& pm : mu.point_masses) {
      GraphPoint p = g.canonical(pm.where);
      double tv = tent.at_point(g, p);
      if (tv == 0.0) continue;
      point_uv += pm.weight * u.eval(g, p) * tv;
      point_vv += std::abs(pm.weight) * tv * tv;
    }

    double num = std::abs(energy_uv + point_uv + density_uv - lambda * ip);
    double den = std::sqrt(energy_v + vsq + point_vv + density_vv);
    worst = std::max(worst, num / den);
  }
  return worst;
}

}  // namespace graphforms
