// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Metric graphs: a finite multigraph whose edges carry lengths, with points
// parameterized by (edge, offset). Infinite edges (leads) are represented up
// to a configured truncation length; the cut carries a Dirichlet marker and
// the horizon helpers below report how far geometry can be trusted.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace graphforms {

struct VertexSpec {
  std::string id;
  double alpha = 0.0;  // delta-coupling strength; 0 = Kirchhoff
};

struct EdgeSpec {
  std::string id;
  std::string from;
  std::optional<std::string> to;  // nullopt: infinite lead starting at `from`
  double length = 0.0;            // ignored for leads
};

// A point of the graph: either a vertex or an interior point of an edge.
// Canonical form (produced by MetricGraph::canonical): endpoint offsets are
// folded into the vertex representation, except the truncation cut of a lead,
// which stays an edge point since no vertex lives there.
struct GraphPoint {
  int edge = -1;
  double offset = 0.0;
  int vertex = -1;

  static GraphPoint at_vertex(int v) { return GraphPoint{-1, 0.0, v}; }
  static GraphPoint on_edge(int e, double t) { return GraphPoint{e, t, -1}; }
  bool is_vertex() const { return vertex >= 0; }
};

struct EdgeEnd {
  int edge;
  int end;  // 0 = from side (offset 0), 1 = to side (offset = length)
};

class MetricGraph {
 public:
  MetricGraph(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges,
              std::optional<double> truncation_length = std::nullopt);

  int vertex_count() const { return static_cast<int>(alphas_.size()); }
  int edge_count() const { return static_cast<int>(lengths_.size()); }

  // Effective length: declared length for finite edges, truncation L for leads.
  double edge_length(int e) const { return lengths_[e]; }
  bool edge_infinite(int e) const { return infinite_[e]; }
  int edge_from(int e) const { return from_[e]; }
  int edge_to(int e) const { return to_[e]; }  // -1 for leads

  double alpha(int v) const { return alphas_[v]; }
  int degree(int v) const { return static_cast<int>(incident_[v].size()); }
  const std::vector<EdgeEnd>& incident(int v) const { return incident_[v]; }

  const std::string& vertex_id(int v) const { return vertex_ids_[v]; }
  const std::string& edge_id(int e) const { return edge_ids_[e]; }
  int find_vertex(std::string_view id) const;
  int find_edge(std::string_view id) const;

  bool has_truncation() const { return truncation_.has_value(); }
  double truncation_length() const;
  bool any_infinite_edge() const { return any_infinite_; }

  double total_length() const { return total_length_; }

  // Validates a point and folds endpoint offsets into vertices (within
  // 1e-12 * edge length). Throws std::invalid_argument on out-of-range input.
  GraphPoint canonical(GraphPoint p) const;

  // Endpoint vertex of an edge end, -1 at a truncation cut.
  int end_vertex(int e, int end) const { return end == 0 ? from_[e] : to_[e]; }

 private:
  std::vector<double> alphas_;
  std::vector<std::string> vertex_ids_;
  std::vector<double> lengths_;
  std::vector<bool> infinite_;
  std::vector<int> from_, to_;
  std::vector<std::string> edge_ids_;
  std::vector<std::vector<EdgeEnd>> incident_;
  std::optional<double> truncation_;
  bool any_infinite_ = false;
  double total_length_ = 0.0;
};

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
};

// Closed subset of a metric graph: per-edge disjoint closed intervals, sorted,
// merged when they overlap within 1e-12 of the edge length. Degenerate
// intervals [t, t] are kept (they carry points of positive capacity).
// Vertex membership is derived: a vertex belongs to the region iff some
// incident interval touches its end of the edge.
class Region {
 public:
  static Region empty_region(const MetricGraph& g);
  static Region whole(const MetricGraph& g);
  static Region from_intervals(const MetricGraph& g,
                               std::vector<std::vector<Interval>> per_edge);

  const std::vector<Interval>& on_edge(int e) const { return per_edge_[e]; }
  int edge_count() const { return static_cast<int>(per_edge_.size()); }
  bool vertex_in(int v) const { return vertex_in_[v] != 0; }
  bool empty() const;
  double measure() const { return measure_; }

  bool contains(const MetricGraph& g, GraphPoint p) const;
  Region complement(const MetricGraph& g) const;
  static Region intersect(const MetricGraph& g, const Region& x, const Region& y);
  static Region unite(const MetricGraph& g, const Region& x, const Region& y);
  // Superset test: does this region contain `other` (up to 1e-12*edge slack)?
  bool contains_region(const MetricGraph& g, const Region& other) const;

 private:
  std::vector<std::vector<Interval>> per_edge_;
  std::vector<char> vertex_in_;
  double measure_ = 0.0;
  friend class MetricGraph;
};

// Minimum over a finite family of unit-slope candidate functions on one edge;
// evaluates the distance to a source configuration restricted to that edge.
class EdgeDistanceEnvelope {
 public:
  double eval(double t) const;
  // Superset of the envelope's kink locations, for exact piecewise handling.
  std::vector<double> breakpoints() const { return breakpoints_; }

 private:
  friend EdgeDistanceEnvelope make_envelope(const MetricGraph&, int,
                                            const std::vector<double>&,
                                            const Region*, const GraphPoint*);
  double len_ = 0.0;
  double d_from_ = 0.0, d_to_ = 0.0;         // +inf when unreachable
  std::vector<Interval> direct_;             // region intervals on this edge
  std::optional<double> direct_point_;       // source point on this edge
  std::vector<double> breakpoints_;
};

// Labels on vertices: shortest-path distance to the source configuration.
// Unreachable vertices get +inf. Sources are (vertex, initial distance) pairs.
std::vector<double> vertex_distances(const MetricGraph& g,
                                     const std::vector<std::pair<int, double>>& sources);
std::vector<double> vertex_distances_from(const MetricGraph& g, GraphPoint x);
std::vector<double> vertex_distances_to_region(const MetricGraph& g, const Region& e_set);

EdgeDistanceEnvelope make_envelope(const MetricGraph& g, int e,
                                   const std::vector<double>& vertex_labels,
                                   const Region* direct_region = nullptr,
                                   const GraphPoint* direct_point = nullptr);

// Path metric distance; +inf across components.
double path_distance(const MetricGraph& g, GraphPoint x, GraphPoint y);

// Distance from x to a nonempty closed region.
double distance_to_set(const MetricGraph& g, GraphPoint x, const Region& e_set);

// Closed metric ball of radius r >= 0 around x, on the truncated graph.
Region ball(const MetricGraph& g, GraphPoint x, double r);

// B_b(E): closed b-neighborhood of a nonempty region, b > 0.
Region neighborhood(const MetricGraph& g, const Region& e_set, double b);

// A_b(E) = B_b(E) n B_b(E^c); empty when the complement is empty.
Region collar(const MetricGraph& g, const Region& e_set, double b);

// Distance from x0 to the nearest truncation cut; +inf when no lead is
// truncated. Balls and growth radii beyond this value are not faithful.
double truncation_horizon(const MetricGraph& g, GraphPoint x0);

}  // namespace graphforms
