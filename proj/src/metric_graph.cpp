// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "graphforms/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace graphforms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double merge_tol(const MetricGraph& g, int e) { return 1e-12 * g.edge_length(e); }

}  // namespace

MetricGraph::MetricGraph(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges,
                         std::optional<double> truncation_length)
    : truncation_(truncation_length) {
  if (vertices.empty()) throw std::invalid_argument("metric graph needs at least one vertex");
  std::unordered_map<std::string, int> vindex;
  for (const auto& v : vertices) {
    if (!std::isfinite(v.alpha))
      throw std::invalid_argument("vertex '" + v.id + "': alpha must be finite");
    if (!vindex.emplace(v.id, static_cast<int>(alphas_.size())).second)
      throw std::invalid_argument("duplicate vertex id '" + v.id + "'");
    alphas_.push_back(v.alpha);
    vertex_ids_.push_back(v.id);
  }
  incident_.resize(alphas_.size());
  if (truncation_ && !(*truncation_ > 0.0 && std::isfinite(*truncation_)))
    throw std::invalid_argument("truncation length must be positive and finite");

  std::unordered_map<std::string, int> eindex;
  for (const auto& e : edges) {
    if (!eindex.emplace(e.id, static_cast<int>(lengths_.size())).second)
      throw std::invalid_argument("duplicate edge id '" + e.id + "'");
    auto from_it = vindex.find(e.from);
    if (from_it == vindex.end())
      throw std::invalid_argument("edge '" + e.id + "': unknown vertex '" + e.from + "'");
    int from = from_it->second;
    int to = -1;
    bool infinite = !e.to.has_value();
    double len;
    if (infinite) {
      if (!truncation_)
        throw std::invalid_argument("edge '" + e.id +
                                    "' is infinite but no truncation length is configured");
      len = *truncation_;
      any_infinite_ = true;
    } else {
      auto to_it = vindex.find(*e.to);
      if (to_it == vindex.end())
        throw std::invalid_argument("edge '" + e.id + "': unknown vertex '" + *e.to + "'");
      to = to_it->second;
      len = e.length;
      if (!(len > 0.0) || !std::isfinite(len))
        throw std::invalid_argument("edge '" + e.id + "': length must be positive and finite");
    }
    int idx = static_cast<int>(lengths_.size());
    lengths_.push_back(len);
    infinite_.push_back(infinite);
    from_.push_back(from);
    to_.push_back(to);
    edge_ids_.push_back(e.id);
    incident_[from].push_back({idx, 0});
    if (to >= 0) incident_[to].push_back({idx, 1});
    total_length_ += len;
  }
  if (lengths_.empty()) throw std::invalid_argument("metric graph needs at least one edge");
  for (int v = 0; v < vertex_count(); ++v)
    if (incident_[v].empty())
      throw std::invalid_argument("vertex '" + vertex_ids_[v] + "' is not incident to any edge");
}

int MetricGraph::find_vertex(std::string_view id) const {
  for (int v = 0; v < vertex_count(); ++v)
    if (vertex_ids_[v] == id) return v;
  return -1;
}

int MetricGraph::find_edge(std::string_view id) const {
  for (int e = 0; e < edge_count(); ++e)
    if (edge_ids_[e] == id) return e;
  return -1;
}

double MetricGraph::truncation_length() const {
  if (!truncation_) throw std::invalid_argument("graph has no truncation configured");
  return *truncation_;
}

GraphPoint MetricGraph::canonical(GraphPoint p) const {
  if (p.is_vertex()) {
    if (p.vertex >= vertex_count()) throw std::invalid_argument("vertex index out of range");
    return GraphPoint::at_vertex(p.vertex);
  }
  if (p.edge < 0 || p.edge >= edge_count()) throw std::invalid_argument("edge index out of range");
  double len = lengths_[p.edge];
  double tol = 1e-12 * len;
  if (!(p.offset >= -tol && p.offset <= len + tol))
    throw std::invalid_argument("offset " + std::to_string(p.offset) + " outside [0, " +
                                std::to_string(len) + "] on edge '" + edge_ids_[p.edge] + "'");
  if (p.offset <= tol) return GraphPoint::at_vertex(from_[p.edge]);
  if (p.offset >= len - tol) {
    if (to_[p.edge] >= 0) return GraphPoint::at_vertex(to_[p.edge]);
    return GraphPoint::on_edge(p.edge, len);  // truncation cut: stays an edge point
  }
  return GraphPoint::on_edge(p.edge, p.offset);
}

// ---------------------------------------------------------------------------
// Region

Region Region::empty_region(const MetricGraph& g) {
  Region r;
  r.per_edge_.resize(g.edge_count());
  r.vertex_in_.assign(g.vertex_count(), 0);
  return r;
}

Region Region::whole(const MetricGraph& g) {
  std::vector<std::vector<Interval>> iv(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) iv[e].push_back({0.0, g.edge_length(e)});
  return from_intervals(g, std::move(iv));
}

Region Region::from_intervals(const MetricGraph& g, std::vector<std::vector<Interval>> per_edge) {
  per_edge.resize(g.edge_count());
  Region r;
  r.per_edge_.resize(g.edge_count());
  r.vertex_in_.assign(g.vertex_count(), 0);
  for (int e = 0; e < g.edge_count(); ++e) {
    double len = g.edge_length(e);
    double tol = merge_tol(g, e);
    std::vector<Interval> clipped;
    for (Interval iv : per_edge[e]) {
      iv.a = std::max(iv.a, 0.0);
      iv.b = std::min(iv.b, len);
      if (iv.b < iv.a) continue;  // fell outside after clipping
      clipped.push_back(iv);
    }
    std::sort(clipped.begin(), clipped.end(),
              [](const Interval& x, const Interval& y) { return x.a < y.a; });
    std::vector<Interval>& out = r.per_edge_[e];
    for (const Interval& iv : clipped) {
      if (!out.empty() && iv.a <= out.back().b + tol)
        out.back().b = std::max(out.back().b, iv.b);
      else
        out.push_back(iv);
    }
    for (const Interval& iv : out) {
      r.measure_ += iv.length();
      if (iv.a <= tol) r.vertex_in_[g.edge_from(e)] = 1;
      if (iv.b >= len - tol && g.edge_to(e) >= 0) r.vertex_in_[g.edge_to(e)] = 1;
    }
  }
  return r;
}

bool Region::empty() const {
  for (const auto& iv : per_edge_)
    if (!iv.empty()) return false;
  return true;
}

bool Region::contains(const MetricGraph& g, GraphPoint p) const {
  p = g.canonical(p);
  if (p.is_vertex()) return vertex_in(p.vertex);
  double tol = merge_tol(g, p.edge);
  for (const Interval& iv : per_edge_[p.edge])
    if (p.offset >= iv.a - tol && p.offset <= iv.b + tol) return true;
  return false;
}

Region Region::complement(const MetricGraph& g) const {
  std::vector<std::vector<Interval>> out(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    double len = g.edge_length(e);
    double cursor = 0.0;
    for (const Interval& iv : per_edge_[e]) {
      if (iv.a > cursor) out[e].push_back({cursor, iv.a});
      cursor = std::max(cursor, iv.b);
    }
    if (cursor < len) out[e].push_back({cursor, len});
  }
  return from_intervals(g, std::move(out));
}

Region Region::intersect(const MetricGraph& g, const Region& x, const Region& y) {
  std::vector<std::vector<Interval>> out(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& xs = x.per_edge_[e];
    const auto& ys = y.per_edge_[e];
    size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
      double lo = std::max(xs[i].a, ys[j].a);
      double hi = std::min(xs[i].b, ys[j].b);
      if (lo <= hi) out[e].push_back({lo, hi});
      if (xs[i].b < ys[j].b)
        ++i;
      else
        ++j;
    }
  }
  Region r = from_intervals(g, std::move(out));
  // A vertex in both operands stays in the intersection even when no common
  // interval touches it (closed sets); pin it with a degenerate interval.
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (x.vertex_in(v) && y.vertex_in(v) && !r.vertex_in(v)) {
      EdgeEnd ee = g.incident(v).front();
      double t = ee.end == 0 ? 0.0 : g.edge_length(ee.edge);
      auto iv = r.per_edge_;
      iv[ee.edge].push_back({t, t});
      r = from_intervals(g, std::move(iv));
    }
  }
  return r;
}

Region Region::unite(const MetricGraph& g, const Region& x, const Region& y) {
  std::vector<std::vector<Interval>> out(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    out[e] = x.per_edge_[e];
    out[e].insert(out[e].end(), y.per_edge_[e].begin(), y.per_edge_[e].end());
  }
  return from_intervals(g, std::move(out));
}

bool Region::contains_region(const MetricGraph& g, const Region& other) const {
  for (int e = 0; e < g.edge_count(); ++e) {
    double tol = merge_tol(g, e) + 1e-12;
    for (const Interval& iv : other.per_edge_[e]) {
      bool covered = false;
      for (const Interval& mine : per_edge_[e]) {
        if (iv.a >= mine.a - tol && iv.b <= mine.b + tol) {
          covered = true;
          break;
        }
      }
      if (!covered) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Distances

std::vector<double> vertex_distances(const MetricGraph& g,
                                     const std::vector<std::pair<int, double>>& sources) {
  std::vector<double> dist(g.vertex_count(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (auto [v, d] : sources) {
    if (d < dist[v]) {
      dist[v] = d;
      heap.push({d, v});
    }
  }
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const EdgeEnd& ee : g.incident(v)) {
      int w = g.end_vertex(ee.edge, 1 - ee.end);
      if (w < 0) continue;  // truncation cut: nothing beyond
      double nd = d + g.edge_length(ee.edge);
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.push({nd, w});
      }
    }
  }
  return dist;
}

std::vector<double> vertex_distances_from(const MetricGraph& g, GraphPoint x) {
  x = g.canonical(x);
  std::vector<std::pair<int, double>> sources;
  if (x.is_vertex()) {
    sources.push_back({x.vertex, 0.0});
  } else {
    sources.push_back({g.edge_from(x.edge), x.offset});
    int to = g.edge_to(x.edge);
    if (to >= 0) sources.push_back({to, g.edge_length(x.edge) - x.offset});
  }
  return vertex_distances(g, sources);
}

std::vector<double> vertex_distances_to_region(const MetricGraph& g, const Region& e_set) {
  if (e_set.empty()) throw std::invalid_argument("region is empty");
  std::vector<std::pair<int, double>> sources;
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ivs = e_set.on_edge(e);
    if (ivs.empty()) continue;
    sources.push_back({g.edge_from(e), ivs.front().a});
    int to = g.edge_to(e);
    if (to >= 0) sources.push_back({to, g.edge_length(e) - ivs.back().b});
  }
  for (int v = 0; v < g.vertex_count(); ++v)
    if (e_set.vertex_in(v)) sources.push_back({v, 0.0});
  return vertex_distances(g, sources);
}

EdgeDistanceEnvelope make_envelope(const MetricGraph& g, int e,
                                   const std::vector<double>& vertex_labels,
                                   const Region* direct_region, const GraphPoint* direct_point) {
  EdgeDistanceEnvelope env;
  double len = g.edge_length(e);
  env.len_ = len;
  env.d_from_ = vertex_labels[g.edge_from(e)];
  int to = g.edge_to(e);
  env.d_to_ = to >= 0 ? vertex_labels[to] : kInf;
  if (direct_region) env.direct_ = direct_region->on_edge(e);
  if (direct_point && !direct_point->is_vertex() && direct_point->edge == e)
    env.direct_point_ = direct_point->offset;

  // Breakpoint superset. Every candidate is piecewise linear with slopes in
  // {-1, 0, +1}; kinks sit at candidate corners and wherever a slope-plus
  // piece t + u crosses a slope-minus piece -t + v, i.e. at t = (v - u) / 2.
  auto add = [&](double t) {
    if (t > 0.0 && t < len) env.breakpoints_.push_back(t);
  };
  std::vector<double> plus_c, minus_c;
  if (std::isfinite(env.d_from_)) plus_c.push_back(env.d_from_);
  if (std::isfinite(env.d_to_)) minus_c.push_back(env.d_to_ + len);
  for (const Interval& iv : env.direct_) {
    add(iv.a);
    add(iv.b);
    plus_c.push_back(-iv.b);
    minus_c.push_back(iv.a);
  }
  if (env.direct_point_) {
    add(*env.direct_point_);
    plus_c.push_back(-*env.direct_point_);
    minus_c.push_back(*env.direct_point_);
  }
  for (double u : plus_c)
    for (double v : minus_c) add(0.5 * (v - u));
  std::sort(env.breakpoints_.begin(), env.breakpoints_.end());
  return env;
}

double EdgeDistanceEnvelope::eval(double t) const {
  double best = kInf;
  if (std::isfinite(d_from_)) best = std::min(best, d_from_ + t);
  if (std::isfinite(d_to_)) best = std::min(best, d_to_ + (len_ - t));
  for (const Interval& iv : direct_)
    best = std::min(best, std::max({0.0, iv.a - t, t - iv.b}));
  if (direct_point_) best = std::min(best, std::abs(t - *direct_point_));
  return best;
}

double path_distance(const MetricGraph& g, GraphPoint x, GraphPoint y) {
  x = g.canonical(x);
  y = g.canonical(y);
  std::vector<double> dist = vertex_distances_from(g, x);
  if (y.is_vertex()) {
    if (x.is_vertex() && x.vertex == y.vertex) return 0.0;
    return dist[y.vertex];
  }
  EdgeDistanceEnvelope env = make_envelope(g, y.edge, dist, nullptr, &x);
  return env.eval(y.offset);
}

double distance_to_set(const MetricGraph& g, GraphPoint x, const Region& e_set) {
  x = g.canonical(x);
  if (e_set.contains(g, x)) return 0.0;
  std::vector<double> dist = vertex_distances_to_region(g, e_set);
  if (x.is_vertex()) return dist[x.vertex];
  EdgeDistanceEnvelope env = make_envelope(g, x.edge, dist, &e_set, nullptr);
  return env.eval(x.offset);
}

Region ball(const MetricGraph& g, GraphPoint x, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("ball radius must be >= 0");
  x = g.canonical(x);
  std::vector<double> dist = vertex_distances_from(g, x);
  std::vector<std::vector<Interval>> out(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    double len = g.edge_length(e);
    double di = dist[g.edge_from(e)];
    int to = g.edge_to(e);
    double dj = to >= 0 ? dist[to] : kInf;
    if (r >= di) out[e].push_back({0.0, std::min(len, r - di)});
    if (std::isfinite(dj) && r >= dj) out[e].push_back({std::max(0.0, len - (r - dj)), len});
    if (!x.is_vertex() && x.edge == e)
      out[e].push_back({std::max(0.0, x.offset - r), std::min(len, x.offset + r)});
  }
  return Region::from_intervals(g, std::move(out));
}

Region neighborhood(const MetricGraph& g, const Region& e_set, double b) {
  if (e_set.empty()) throw std::invalid_argument("region is empty");
  if (!(b > 0.0)) throw std::invalid_argument("neighborhood width must be > 0");
  std::vector<double> dist = vertex_distances_to_region(g, e_set);
  std::vector<std::vector<Interval>> out(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    double len = g.edge_length(e);
    double di = dist[g.edge_from(e)];
    int to = g.edge_to(e);
    double dj = to >= 0 ? dist[to] : kInf;
    if (b >= di) out[e].push_back({0.0, std::min(len, b - di)});
    if (std::isfinite(dj) && b >= dj) out[e].push_back({std::max(0.0, len - (b - dj)), len});
    for (const Interval& iv : e_set.on_edge(e))
      out[e].push_back({std::max(0.0, iv.a - b), std::min(len, iv.b + b)});
  }
  return Region::from_intervals(g, std::move(out));
}

Region collar(const MetricGraph& g, const Region& e_set, double b) {
  Region comp = e_set.complement(g);
  if (comp.empty()) return Region::empty_region(g);
  return Region::intersect(g, neighborhood(g, e_set, b), neighborhood(g, comp, b));
}

double truncation_horizon(const MetricGraph& g, GraphPoint x0) {
  x0 = g.canonical(x0);
  bool any = false;
  for (int e = 0; e < g.edge_count(); ++e) any = any || g.edge_infinite(e);
  if (!any) return kInf;
  std::vector<double> dist = vertex_distances_from(g, x0);
  double best = kInf;
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!g.edge_infinite(e)) continue;
    double len = g.edge_length(e);
    double d = dist[g.edge_from(e)] + len;
    if (!x0.is_vertex() && x0.edge == e) d = std::min(d, len - x0.offset);
    best = std::min(best, d);
  }
  return best;
}

}  // namespace graphforms
