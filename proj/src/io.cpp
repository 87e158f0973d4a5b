// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "graphforms/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace graphforms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("at " + where + ": " + what);
}

const Json& field(const Json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
  return *it;
}

std::string str_field(const Json& obj, const std::string& where, const char* key) {
  const Json& v = field(obj, where, key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

double num_field(const Json& obj, const std::string& where, const char* key) {
  const Json& v = field(obj, where, key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

const Json& array_field(const Json& obj, const std::string& where, const char* key) {
  const Json& v = field(obj, where, key);
  if (!v.is_array()) fail(where + "." + key, "expected an array");
  return v;
}

Complex complex_field(const Json& obj, const std::string& where, const char* key) {
  const Json& v = field(obj, where, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(where + "." + key, "expected [re, im]");
  return Complex(v[0].get<double>(), v[1].get<double>());
}

Json complex_out(Complex z) { return Json::array({z.real(), z.imag()}); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_csv(const Json& c) {
  if (c.is_null()) return "";
  if (c.is_string()) return csv_escape(c.get<std::string>());
  if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
  if (c.is_number_float()) return format_float(c.get<double>());
  return c.dump();
}

std::string cell_jsonl(const Json& c) {
  if (c.is_number_float()) {
    double x = c.get<double>();
    return std::isfinite(x) ? format_float(x) : "null";
  }
  return c.dump();
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("'" + path + "': " + e.what());
  }
}

void require_object(const Json& obj, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
}

void require_keys(const Json& obj, const std::string& where,
                  const std::vector<std::string>& allowed) {
  require_object(obj, where);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const std::string& k : allowed) known = known || k == it.key();
    if (!known) fail(where, "unknown key '" + it.key() + "'");
  }
}

std::shared_ptr<MetricGraph> graph_from_json(const Json& j,
                                             std::optional<double> truncate_override) {
  require_keys(j, "graph", {"vertices", "edges", "truncation"});

  std::vector<VertexSpec> vertices;
  const Json& vs = array_field(j, "graph", "vertices");
  for (size_t i = 0; i < vs.size(); ++i) {
    std::string where = "vertices[" + std::to_string(i) + "]";
    require_keys(vs[i], where, {"id", "alpha"});
    VertexSpec v;
    v.id = str_field(vs[i], where, "id");
    if (vs[i].contains("alpha")) v.alpha = num_field(vs[i], where, "alpha");
    vertices.push_back(std::move(v));
  }

  std::vector<EdgeSpec> edges;
  const Json& es = array_field(j, "graph", "edges");
  for (size_t i = 0; i < es.size(); ++i) {
    std::string where = "edges[" + std::to_string(i) + "]";
    require_keys(es[i], where, {"id", "from", "to", "length"});
    EdgeSpec e;
    e.id = str_field(es[i], where, "id");
    e.from = str_field(es[i], where, "from");
    const Json& to = field(es[i], where, "to");
    if (to.is_string())
      e.to = to.get<std::string>();
    else if (!to.is_null())
      fail(where + ".to", "expected a vertex id or null");
    const Json& len = field(es[i], where, "length");
    bool inf_len = len.is_string() && len.get<std::string>() == "inf";
    if (inf_len)
      e.length = kInf;
    else if (len.is_number())
      e.length = len.get<double>();
    else
      fail(where + ".length", "expected a number or \"inf\"");
    if (e.to.has_value() == inf_len)
      fail(where, "a lead needs \"to\": null together with \"length\": \"inf\"");
    edges.push_back(std::move(e));
  }

  std::optional<double> L = truncate_override;
  if (!L && j.contains("truncation")) {
    require_keys(j["truncation"], "truncation", {"L"});
    L = num_field(j["truncation"], "truncation", "L");
  }
  return std::make_shared<MetricGraph>(std::move(vertices), std::move(edges), L);
}

Json graph_to_json(const MetricGraph& g) {
  Json j = Json::object();
  j["vertices"] = Json::array();
  for (int v = 0; v < g.vertex_count(); ++v)
    j["vertices"].push_back({{"id", g.vertex_id(v)}, {"alpha", g.alpha(v)}});
  j["edges"] = Json::array();
  for (int e = 0; e < g.edge_count(); ++e) {
    Json je = {{"id", g.edge_id(e)}, {"from", g.vertex_id(g.edge_from(e))}};
    if (g.edge_to(e) >= 0) {
      je["to"] = g.vertex_id(g.edge_to(e));
      je["length"] = g.edge_length(e);
    } else {
      je["to"] = nullptr;
      je["length"] = "inf";
    }
    j["edges"].push_back(std::move(je));
  }
  if (g.has_truncation()) j["truncation"] = {{"L", g.truncation_length()}};
  return j;
}

GraphPoint point_from_json(const MetricGraph& g, const Json& j, const std::string& where) {
  require_object(j, where);
  if (j.contains("vertex")) {
    require_keys(j, where, {"vertex"});
    std::string id = str_field(j, where, "vertex");
    int v = g.find_vertex(id);
    if (v < 0) fail(where, "unknown vertex '" + id + "'");
    return GraphPoint::at_vertex(v);
  }
  require_keys(j, where, {"edge", "t"});
  std::string id = str_field(j, where, "edge");
  int e = g.find_edge(id);
  if (e < 0) fail(where, "unknown edge '" + id + "'");
  return g.canonical(GraphPoint::on_edge(e, num_field(j, where, "t")));
}

GraphPoint point_from_string(const MetricGraph& g, const std::string& text) {
  int v = g.find_vertex(text);
  if (v >= 0) return GraphPoint::at_vertex(v);
  size_t at = text.rfind('@');
  if (at != std::string::npos) {
    int e = g.find_edge(text.substr(0, at));
    if (e >= 0) {
      double t;
      try {
        t = std::stod(text.substr(at + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad offset in point '" + text + "'");
      }
      return g.canonical(GraphPoint::on_edge(e, t));
    }
  }
  throw std::invalid_argument("unknown point '" + text +
                              "'; expected a vertex id or edge@offset");
}

Json point_to_json(const MetricGraph& g, const GraphPoint& p) {
  GraphPoint c = g.canonical(p);
  if (c.is_vertex()) return {{"vertex", g.vertex_id(c.vertex)}};
  return {{"edge", g.edge_id(c.edge)}, {"t", c.offset}};
}

MeasurePerturbation mu_from_json(const MetricGraph& g, const Json& j, const std::string& where) {
  require_keys(j, where, {"point_masses"});
  MeasurePerturbation mu;
  if (!j.contains("point_masses")) return mu;
  const Json& pms = array_field(j, where, "point_masses");
  for (size_t i = 0; i < pms.size(); ++i) {
    std::string w = where + ".point_masses[" + std::to_string(i) + "]";
    require_keys(pms[i], w, {"edge", "t", "weight"});
    std::string id = str_field(pms[i], w, "edge");
    int e = g.find_edge(id);
    if (e < 0) fail(w, "unknown edge '" + id + "'");
    PointMass pm;
    pm.where = g.canonical(GraphPoint::on_edge(e, num_field(pms[i], w, "t")));
    pm.weight = num_field(pms[i], w, "weight");
    mu.point_masses.push_back(pm);
  }
  return mu;
}

Json solution_to_json(const MetricGraph& g, const PiecewiseFunction& u, double lambda) {
  if (u.is_nodal())
    throw std::invalid_argument("only closed-form eigensolutions can be serialized");
  Json j = Json::object();
  j["lambda"] = lambda;
  j["edges"] = Json::array();
  for (int e = 0; e < g.edge_count(); ++e) {
    auto [a, b] = u.ab(e);
    j["edges"].push_back({{"id", g.edge_id(e)}, {"a", complex_out(a)}, {"b", complex_out(b)}});
  }
  return j;
}

std::pair<PiecewiseFunction, double> solution_from_json(std::shared_ptr<const MetricGraph> g,
                                                        const Json& j) {
  // the dump may carry verification metrics; they are ignored on load
  require_keys(j, "solution", {"lambda", "edges", "matching_defect", "verification_residual"});
  double lambda = num_field(j, "solution", "lambda");
  const Json& es = array_field(j, "solution", "edges");
  if (static_cast<int>(es.size()) != g->edge_count())
    fail("solution.edges", "expected one entry per graph edge");
  std::vector<std::pair<Complex, Complex>> coeff(g->edge_count(), {0.0, 0.0});
  std::vector<char> seen(g->edge_count(), 0);
  for (size_t i = 0; i < es.size(); ++i) {
    std::string where = "solution.edges[" + std::to_string(i) + "]";
    require_keys(es[i], where, {"id", "a", "b"});
    std::string id = str_field(es[i], where, "id");
    int e = g->find_edge(id);
    if (e < 0) fail(where, "unknown edge '" + id + "'");
    if (seen[e]) fail(where, "duplicate edge '" + id + "'");
    seen[e] = 1;
    coeff[e] = {complex_field(es[i], where, "a"), complex_field(es[i], where, "b")};
  }
  return {PiecewiseFunction::exact(std::move(g), lambda, std::move(coeff)), lambda};
}

Json certificate_to_json(const SchnolCertificate& cert) {
  Json j = Json::object();
  j["lambda"] = cert.lambda;
  j["verdict"] = cert.verdict == Verdict::Certified ? "certified" : "inconclusive";
  j["points"] = Json::array();
  for (size_t n = 0; n < cert.ratios.size(); ++n) {
    Json p = Json::object();
    p["n"] = static_cast<int>(n);
    p["r"] = n < cert.radii.size() ? Json(cert.radii[n]) : Json(nullptr);
    p["core_mass"] = cert.core_masses[n];
    p["collar_mass"] = cert.collar_masses[n];
    p["ratio"] = cert.ratios[n];
    p["residual"] = cert.residuals[n];
    p["growth_ratio"] = n < cert.growth_ratio.size() ? Json(cert.growth_ratio[n]) : Json(nullptr);
    p["growth_increment"] =
        n < cert.growth_increment.size() ? Json(cert.growth_increment[n]) : Json(nullptr);
    j["points"].push_back(std::move(p));
  }
  j["notes"] = cert.notes;
  return j;
}

std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

TableFormat table_format_from_string(const std::string& name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "jsonlines") return TableFormat::JsonLines;
  throw std::invalid_argument("unknown format '" + name + "'; expected csv or jsonlines");
}

void Table::add_row(std::vector<Json> cells) {
  if (cells.size() != columns.size())
    throw std::logic_error("table row width does not match its columns");
  rows.push_back(std::move(cells));
}

void write_table(std::ostream& os, const Table& t, TableFormat f) {
  if (f == TableFormat::Csv) {
    for (size_t c = 0; c < t.columns.size(); ++c)
      os << (c ? "," : "") << csv_escape(t.columns[c]);
    os << "\n";
    for (const auto& row : t.rows) {
      for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_csv(row[c]);
      os << "\n";
    }
    return;
  }
  for (const auto& row : t.rows) {
    os << "{";
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) os << ",";
      os << Json(t.columns[c]).dump() << ":" << cell_jsonl(row[c]);
    }
    os << "}\n";
  }
}

}  // namespace graphforms
