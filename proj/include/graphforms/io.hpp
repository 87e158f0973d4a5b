// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// File formats and table emission. Graphs, measure perturbations, points,
// closed-form eigensolutions and certificates travel as JSON with a strict
// schema: unknown keys are rejected with a path diagnostic. Tables go out as
// csv or jsonlines with a fixed column order and floats at 17 significant
// digits, so reruns are byte identical.

#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "graphforms/forms.hpp"
#include "graphforms/function_space.hpp"
#include "graphforms/metric_graph.hpp"
#include "graphforms/schnol.hpp"

namespace graphforms {

using Json = nlohmann::ordered_json;

// Parse errors carry the file path and the parser's position message.
Json load_json_file(const std::string& path);

// Throws when `obj` is not an object or holds a key outside `allowed`;
// `where` names the location in the diagnostic, e.g. "edges[2]".
void require_object(const Json& obj, const std::string& where);
void require_keys(const Json& obj, const std::string& where,
                  const std::vector<std::string>& allowed);

// Schema: {"vertices": [{"id", "alpha"?}], "edges": [{"id", "from",
// "to" (string or null), "length" (number or "inf")}], "truncation": {"L"}?}.
// A truncate override replaces the file's truncation length.
std::shared_ptr<MetricGraph> graph_from_json(const Json& j,
                                             std::optional<double> truncate_override = {});
Json graph_to_json(const MetricGraph& g);

// {"vertex": "a"} or {"edge": "e0", "t": 0.25}.
GraphPoint point_from_json(const MetricGraph& g, const Json& j, const std::string& where);
// "a" (a vertex id) or "e0@0.25" (an edge offset).
GraphPoint point_from_string(const MetricGraph& g, const std::string& text);
Json point_to_json(const MetricGraph& g, const GraphPoint& p);

// {"point_masses": [{"edge", "t", "weight"}]}. Vertex couplings live in the
// graph file; edge densities are API-only.
MeasurePerturbation mu_from_json(const MetricGraph& g, const Json& j, const std::string& where);

// Closed-form eigensolutions only: {"lambda", "edges": [{"id", "a": [re, im],
// "b": [re, im]}]} with u = a cos(sqrt(l) t) + b sin(sqrt(l) t)/sqrt(l) on
// each edge (degenerating to a + b t and the hyperbolic pair as usual).
Json solution_to_json(const MetricGraph& g, const PiecewiseFunction& u, double lambda);
std::pair<PiecewiseFunction, double> solution_from_json(std::shared_ptr<const MetricGraph> g,
                                                        const Json& j);

Json certificate_to_json(const SchnolCertificate& cert);

// %.17g: every double round-trips.
std::string format_float(double x);

enum class TableFormat { Csv, JsonLines };
TableFormat table_format_from_string(const std::string& name);

// Cells hold Json scalars; floats are printed via format_float in both
// formats (non-finite floats become "inf"/"nan" text in csv, null in
// jsonlines).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  void add_row(std::vector<Json> cells);
};
void write_table(std::ostream& os, const Table& t, TableFormat f);

}  // namespace graphforms
