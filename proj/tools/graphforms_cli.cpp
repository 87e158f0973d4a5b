// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Batch front end. Every subcommand reads a graph file (and optionally a
// bundle config whose fields individual flags override), runs one pipeline
// stage and emits tables or JSON, byte identical across reruns.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "graphforms/eigensolution.hpp"
#include "graphforms/eigensolver.hpp"
#include "graphforms/forms.hpp"
#include "graphforms/function_space.hpp"
#include "graphforms/io.hpp"
#include "graphforms/metric_graph.hpp"
#include "graphforms/schnol.hpp"

namespace fs = std::filesystem;
using namespace graphforms;

namespace {

// wraps a pipeline stage so failures name it
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

struct Options {
  std::string graph_file, config_file, solution_file, out_dir;
  std::string format_flag, x0_flag, edges_flag, center_flag, profile_flag;
  std::optional<double> mesh_h, truncate_L, lambda, b, delta, shift;
  std::optional<double> radius, width, constant, ratio_threshold, residual_factor;
  std::optional<int> count, radius_budget;
  std::optional<unsigned> seed;
  bool dry_run = false;
  std::vector<std::string> points;
};

const std::vector<std::string> kConfigKeys = {
    "graph",  "graph_file", "solution_file", "mesh_h",     "truncate_L", "lambda", "seed",
    "format", "mu",         "solve_seed",    "schnol",     "caccioppoli", "spectrum"};

struct Context {
  Options& o;
  Json cfg = Json::object();
  std::shared_ptr<MetricGraph> g;

  explicit Context(Options& opts) : o(opts) {
    if (!o.config_file.empty()) {
      cfg = stage("load", [&] { return load_json_file(o.config_file); });
      require_keys(cfg, "config", kConfigKeys);
    }
  }

  const Json* sub(const char* key) const {
    auto it = cfg.find(key);
    return it == cfg.end() ? nullptr : &*it;
  }

  double num_or(const Json* obj, const char* key, double dflt) const {
    if (!obj || !obj->contains(key)) return dflt;
    const Json& v = (*obj)[key];
    if (!v.is_number()) throw std::invalid_argument(std::string("config key '") + key +
                                                    "' must be a number");
    return v.get<double>();
  }

  double pick(const std::optional<double>& flag, const char* key, double dflt) const {
    return flag ? *flag : num_or(&cfg, key, dflt);
  }

  std::optional<double> pick_opt(const std::optional<double>& flag, const char* key) const {
    if (flag) return flag;
    if (cfg.contains(key)) return num_or(&cfg, key, 0.0);
    return std::nullopt;
  }

  void load_graph() {
    std::optional<double> L = pick_opt(o.truncate_L, "truncate_L");
    g = stage("load", [&]() -> std::shared_ptr<MetricGraph> {
      if (!o.graph_file.empty()) return graph_from_json(load_json_file(o.graph_file), L);
      if (cfg.contains("graph_file"))
        return graph_from_json(load_json_file(cfg["graph_file"].get<std::string>()), L);
      if (cfg.contains("graph")) return graph_from_json(cfg["graph"], L);
      throw std::invalid_argument("no graph given; use --graph or a config with graph/graph_file");
    });
  }

  double mesh_h() const { return pick(o.mesh_h, "mesh_h", 0.05); }

  MeasurePerturbation mu() const {
    if (!cfg.contains("mu")) return {};
    return stage("load", [&] { return mu_from_json(*g, cfg["mu"], "mu"); });
  }

  unsigned seed() const {
    if (o.seed) return *o.seed;
    return static_cast<unsigned>(num_or(&cfg, "seed", 12345.0));
  }

  TableFormat format() const {
    std::string name = !o.format_flag.empty()
                           ? o.format_flag
                           : (cfg.contains("format") ? cfg["format"].get<std::string>() : "csv");
    return table_format_from_string(name);
  }

  std::string format_name() const {
    return format() == TableFormat::Csv ? "csv" : "jsonlines";
  }

  // --out picks a directory; otherwise tables land on stdout
  void emit_table(const Table& t, const std::string& stem) const {
    if (o.out_dir.empty()) {
      write_table(std::cout, t, format());
      return;
    }
    fs::create_directories(o.out_dir);
    std::string ext = format() == TableFormat::Csv ? ".csv" : ".jsonl";
    fs::path path = fs::path(o.out_dir) / (stem + ext);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_table(os, t, format());
    std::cout << "wrote " << path.string() << "\n";
  }

  void emit_json(const Json& j, const std::string& name, bool quiet_stdout = false) const {
    if (o.out_dir.empty()) {
      if (!quiet_stdout) std::cout << j.dump(2) << "\n";
      return;
    }
    fs::create_directories(o.out_dir);
    fs::path path = fs::path(o.out_dir) / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    os << j.dump(2) << "\n";
    std::cout << "wrote " << path.string() << "\n";
  }

  void describe_graph() const {
    std::cout << "graph: vertices=" << g->vertex_count() << " edges=" << g->edge_count();
    if (g->has_truncation())
      std::cout << " truncation_L=" << format_float(g->truncation_length());
    std::cout << "\n";
  }
};

GraphPoint resolve_point(const Context& ctx, const std::string& flag, const Json* obj,
                         const char* key, GraphPoint dflt) {
  if (!flag.empty()) return point_from_string(*ctx.g, flag);
  if (obj && obj->contains(key)) return point_from_json(*ctx.g, (*obj)[key], key);
  return ctx.g->canonical(dflt);
}

SeedSpec seed_spec_from_config(const Context& ctx) {
  SeedSpec s;
  const Json* sc = ctx.sub("solve_seed");
  if (!sc) return s;
  require_keys(*sc, "solve_seed", {"vertex", "value", "derivative", "edge_derivatives"});
  if (sc->contains("vertex")) {
    std::string id = (*sc)["vertex"].get<std::string>();
    s.vertex = ctx.g->find_vertex(id);
    if (s.vertex < 0) throw std::invalid_argument("solve_seed: unknown vertex '" + id + "'");
  }
  auto cplx = [&](const char* key, Complex dflt) {
    if (!sc->contains(key)) return dflt;
    const Json& v = (*sc)[key];
    if (!v.is_array() || v.size() != 2)
      throw std::invalid_argument(std::string("solve_seed.") + key + ": expected [re, im]");
    return Complex(v[0].get<double>(), v[1].get<double>());
  };
  s.value = cplx("value", s.value);
  s.derivative = cplx("derivative", s.derivative);
  if (sc->contains("edge_derivatives")) {
    for (const Json& ed : (*sc)["edge_derivatives"]) {
      require_keys(ed, "solve_seed.edge_derivatives[]", {"edge", "value"});
      std::string id = ed["edge"].get<std::string>();
      int e = ctx.g->find_edge(id);
      if (e < 0) throw std::invalid_argument("solve_seed: unknown edge '" + id + "'");
      s.edge_derivative[e] = Complex(ed["value"][0].get<double>(), ed["value"][1].get<double>());
    }
  }
  return s;
}

int cmd_spectrum(Context& ctx) {
  ctx.load_graph();
  const Json* sc = ctx.sub("spectrum");
  if (sc) require_keys(*sc, "spectrum", {"count", "shift"});
  int count = ctx.o.count ? *ctx.o.count : static_cast<int>(ctx.num_or(sc, "count", 8));
  double shift = ctx.o.shift ? *ctx.o.shift : ctx.num_or(sc, "shift", -1.0);
  auto mesh = stage("mesh", [&] { return std::make_shared<Mesh>(ctx.g, ctx.mesh_h()); });
  if (ctx.o.dry_run) {
    std::cout << "command: spectrum\n";
    ctx.describe_graph();
    std::cout << "mesh_h: " << format_float(ctx.mesh_h()) << "\ndofs: " << mesh->dof_count()
              << "\ncount: " << count << "\nshift: " << format_float(shift)
              << "\nseed: " << ctx.seed() << "\nformat: " << ctx.format_name() << "\n";
    return 0;
  }
  FormMatrices fm = stage("assemble", [&] { return assemble(mesh, ctx.mu()); });
  SpectralResult sr =
      stage("spectrum", [&] { return solve_spectrum(fm, count, shift, ctx.seed()); });
  Table t;
  t.columns = {"n", "lambda", "residual"};
  for (int i = 0; i < sr.eigenvalues.size(); ++i)
    t.add_row({i, sr.eigenvalues[i], sr.residuals[i]});
  ctx.emit_table(t, "spectrum");
  return 0;
}

int cmd_solve(Context& ctx) {
  ctx.load_graph();
  auto lambda = ctx.pick_opt(ctx.o.lambda, "lambda");
  if (!lambda) throw std::invalid_argument("solve needs --lambda (or a config lambda)");
  SeedSpec seed = seed_spec_from_config(ctx);
  if (ctx.o.dry_run) {
    std::cout << "command: solve\n";
    ctx.describe_graph();
    std::cout << "lambda: " << format_float(*lambda) << "\nseed_vertex: "
              << ctx.g->vertex_id(seed.vertex) << "\n";
    return 0;
  }
  ShootResult res = stage("shoot", [&] { return shoot(ctx.g, *lambda, seed); });
  if (!res.feasible()) {
    std::cerr << "solve: no eigensolution at lambda=" << format_float(*lambda)
              << " (matching defect " << format_float(res.matching_residual) << ")\n";
    return 2;
  }
  double ver = stage("verify",
                     [&] { return verify_eigensolution(*ctx.g, *res.solution, *lambda, ctx.mu()); });
  Json sj = solution_to_json(*ctx.g, *res.solution, *lambda);
  Json out = Json::object();
  out["lambda"] = sj["lambda"];
  out["matching_defect"] = res.matching_residual;
  out["verification_residual"] = ver;
  out["edges"] = sj["edges"];
  ctx.emit_json(out, "solution.json");
  if (!ctx.o.out_dir.empty())
    std::cout << "matching_defect: " << format_float(res.matching_residual)
              << "\nverification_residual: " << format_float(ver) << "\n";
  return 0;
}

std::pair<PiecewiseFunction, double> load_solution(Context& ctx) {
  std::string path = ctx.o.solution_file;
  if (path.empty() && ctx.cfg.contains("solution_file"))
    path = ctx.cfg["solution_file"].get<std::string>();
  if (path.empty())
    throw std::invalid_argument("needs --solution (or a config solution_file)");
  return stage("load", [&] { return solution_from_json(ctx.g, load_json_file(path)); });
}

int cmd_schnol(Context& ctx) {
  ctx.load_graph();
  auto [u, file_lambda] = load_solution(ctx);
  double lambda = ctx.o.lambda ? *ctx.o.lambda : file_lambda;
  const Json* sc = ctx.sub("schnol");
  if (sc)
    require_keys(*sc, "schnol",
                 {"x0", "b", "delta", "radius_budget", "ratio_threshold", "residual_factor",
                  "profile"});
  SchnolConfig conf;
  conf.x0 = resolve_point(ctx, ctx.o.x0_flag, sc, "x0", GraphPoint::at_vertex(0));
  conf.b = ctx.o.b ? *ctx.o.b : ctx.num_or(sc, "b", 1.0);
  conf.delta = ctx.o.delta ? *ctx.o.delta : ctx.num_or(sc, "delta", 0.05);
  conf.radius_budget = ctx.o.radius_budget ? *ctx.o.radius_budget
                                           : static_cast<int>(ctx.num_or(sc, "radius_budget", 16));
  conf.ratio_threshold =
      ctx.o.ratio_threshold ? *ctx.o.ratio_threshold : ctx.num_or(sc, "ratio_threshold", 0.05);
  conf.residual_factor =
      ctx.o.residual_factor ? *ctx.o.residual_factor : ctx.num_or(sc, "residual_factor", 10.0);
  std::string profile = !ctx.o.profile_flag.empty()
                            ? ctx.o.profile_flag
                            : (sc && sc->contains("profile") ? (*sc)["profile"].get<std::string>()
                                                             : "linear");
  if (profile == "smooth")
    conf.kind = CutoffProfile::Kind::Smooth;
  else if (profile != "linear")
    throw std::invalid_argument("profile must be linear or smooth");

  auto mesh = stage("mesh", [&] { return std::make_shared<Mesh>(ctx.g, ctx.mesh_h()); });
  if (ctx.o.dry_run) {
    std::cout << "command: schnol\n";
    ctx.describe_graph();
    std::cout << "lambda: " << format_float(lambda) << "\nmesh_h: " << format_float(ctx.mesh_h())
              << "\ndofs: " << mesh->dof_count() << "\nb: " << format_float(conf.b)
              << "\ndelta: " << format_float(conf.delta) << "\nradius_budget: "
              << conf.radius_budget << "\nratio_threshold: " << format_float(conf.ratio_threshold)
              << "\nresidual_factor: " << format_float(conf.residual_factor)
              << "\nprofile: " << profile << "\nformat: " << ctx.format_name() << "\n";
    return 0;
  }
  FormMatrices fm = stage("assemble", [&] { return assemble(mesh, ctx.mu()); });
  SchnolCertificate cert = stage("certify", [&] { return certify(*ctx.g, fm, u, lambda, conf); });
  if (ctx.o.out_dir.empty()) {
    ctx.emit_json(certificate_to_json(cert), "certificate.json");
    return 0;
  }
  ctx.emit_json(certificate_to_json(cert), "certificate.json", true);
  Table t;
  t.columns = {"n", "r", "core_mass", "collar_mass", "ratio", "residual"};
  for (size_t n = 0; n < cert.ratios.size(); ++n)
    t.add_row({static_cast<int>(n), n < cert.radii.size() ? Json(cert.radii[n]) : Json(nullptr),
               cert.core_masses[n], cert.collar_masses[n], cert.ratios[n], cert.residuals[n]});
  ctx.emit_table(t, "per_n");
  std::cout << "verdict: " << (cert.verdict == Verdict::Certified ? "certified" : "inconclusive")
            << "\n";
  return 0;
}

int cmd_caccioppoli(Context& ctx) {
  ctx.load_graph();
  auto [u, file_lambda] = load_solution(ctx);
  double lambda = ctx.o.lambda ? *ctx.o.lambda : file_lambda;
  const Json* cc = ctx.sub("caccioppoli");
  if (cc) require_keys(*cc, "caccioppoli", {"region_edges", "center", "radius", "width", "constant"});

  Region e_set = Region::empty_region(*ctx.g);
  std::string edges = ctx.o.edges_flag;
  if (edges.empty() && cc && cc->contains("region_edges")) {
    for (const Json& id : (*cc)["region_edges"]) edges += (edges.empty() ? "" : ",") + id.get<std::string>();
  }
  std::optional<double> radius = ctx.o.radius;
  if (!radius && cc && cc->contains("radius")) radius = ctx.num_or(cc, "radius", 0.0);
  if (!edges.empty()) {
    std::vector<std::vector<Interval>> per_edge(ctx.g->edge_count());
    size_t pos = 0;
    while (pos <= edges.size()) {
      size_t comma = edges.find(',', pos);
      std::string id = edges.substr(pos, comma == std::string::npos ? comma : comma - pos);
      int e = ctx.g->find_edge(id);
      if (e < 0) throw std::invalid_argument("unknown edge '" + id + "'");
      per_edge[e] = {{0.0, ctx.g->edge_length(e)}};
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    e_set = Region::from_intervals(*ctx.g, per_edge);
  } else if (radius) {
    GraphPoint c = resolve_point(ctx, ctx.o.center_flag, cc, "center", GraphPoint::at_vertex(0));
    e_set = ball(*ctx.g, c, *radius);
  } else {
    throw std::invalid_argument("caccioppoli needs --edges or --radius (with --center)");
  }
  double width = ctx.o.width ? *ctx.o.width : ctx.num_or(cc, "width", 1.0);
  double C = ctx.o.constant ? *ctx.o.constant : ctx.num_or(cc, "constant", 16.0);
  if (ctx.o.dry_run) {
    std::cout << "command: caccioppoli\n";
    ctx.describe_graph();
    std::cout << "lambda: " << format_float(lambda) << "\nregion_measure: "
              << format_float(e_set.measure()) << "\nwidth: " << format_float(width)
              << "\nconstant: " << format_float(C) << "\nformat: " << ctx.format_name() << "\n";
    return 0;
  }
  CaccioppoliReport rep =
      stage("caccioppoli", [&] { return caccioppoli_check(*ctx.g, u, lambda, e_set, width, C); });
  Table t;
  t.columns = {"lambda", "lhs", "rhs", "empirical", "pass"};
  t.add_row({rep.lambda, rep.lhs, rep.rhs, rep.empirical, rep.pass});
  ctx.emit_table(t, "caccioppoli");
  return 0;
}

int cmd_distance(Context& ctx) {
  ctx.load_graph();
  GraphPoint p = stage("load", [&] { return point_from_string(*ctx.g, ctx.o.points[0]); });
  GraphPoint q = stage("load", [&] { return point_from_string(*ctx.g, ctx.o.points[1]); });
  if (ctx.o.dry_run) {
    std::cout << "command: distance\n";
    ctx.describe_graph();
    std::cout << "p: " << point_to_json(*ctx.g, p).dump() << "\nq: "
              << point_to_json(*ctx.g, q).dump() << "\n";
    return 0;
  }
  double rho = stage("distance", [&] { return path_distance(*ctx.g, p, q); });
  std::cout << format_float(rho) << "\n";
  return 0;
}

int cmd_formbound(Context& ctx) {
  ctx.load_graph();
  auto mesh = stage("mesh", [&] { return std::make_shared<Mesh>(ctx.g, ctx.mesh_h()); });
  if (ctx.o.dry_run) {
    std::cout << "command: formbound\n";
    ctx.describe_graph();
    std::cout << "mesh_h: " << format_float(ctx.mesh_h()) << "\ndofs: " << mesh->dof_count()
              << "\npoint_masses: " << ctx.mu().point_masses.size() << "\nformat: "
              << ctx.format_name() << "\n";
    return 0;
  }
  FormMatrices fm = stage("assemble", [&] { return assemble(mesh, ctx.mu()); });
  FormBound fb = stage("formbound", [&] { return estimate_form_bound(fm); });
  Table t;
  t.columns = {"kappa", "c_kappa", "admissible"};
  t.add_row({fb.kappa, fb.c_kappa, fb.admissible});
  ctx.emit_table(t, "formbound");
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--graph", o.graph_file, "graph spec file (JSON)");
  cmd->add_option("--config", o.config_file, "bundle config; flags override its fields");
  cmd->add_option("--mesh-h", o.mesh_h, "target mesh cell size");
  cmd->add_option("--truncate-L", o.truncate_L, "truncation length for infinite edges");
  cmd->add_option("--out", o.out_dir, "output directory (default: stdout)");
  cmd->add_option("--seed", o.seed, "random seed for iterative solvers");
  cmd->add_option("--format", o.format_flag, "table format: csv or jsonlines");
  cmd->add_flag("--dry-run", o.dry_run, "validate inputs and print the resolved configuration");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral certification toolkit for quantum graphs"};
  app.require_subcommand(1);
  Options o;

  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalue table near a shift");
  add_common(spectrum, o);
  spectrum->add_option("--count", o.count, "how many eigenvalues");
  spectrum->add_option("--shift", o.shift, "spectral target");

  CLI::App* solve = app.add_subcommand("solve", "closed-form eigensolution at a given lambda");
  add_common(solve, o);
  solve->add_option("--lambda", o.lambda, "spectral parameter");

  CLI::App* schnol = app.add_subcommand("schnol", "growth-based spectrum certificate");
  add_common(schnol, o);
  schnol->add_option("--solution", o.solution_file, "eigensolution file from solve");
  schnol->add_option("--lambda", o.lambda, "override the solution's lambda");
  schnol->add_option("--x0", o.x0_flag, "center point (vertex id or edge@offset)");
  schnol->add_option("--b", o.b, "radius step");
  schnol->add_option("--delta", o.delta, "subexponential tolerance");
  schnol->add_option("--radius-budget", o.radius_budget, "max radii to evaluate");
  schnol->add_option("--ratio-threshold", o.ratio_threshold, "certification ratio threshold");
  schnol->add_option("--residual-factor", o.residual_factor, "residual threshold factor");
  schnol->add_option("--profile", o.profile_flag, "cutoff profile: linear or smooth");

  CLI::App* cacc = app.add_subcommand("caccioppoli", "energy bound report for one region");
  add_common(cacc, o);
  cacc->add_option("--solution", o.solution_file, "eigensolution file from solve");
  cacc->add_option("--lambda", o.lambda, "override the solution's lambda");
  cacc->add_option("--edges", o.edges_flag, "region as comma-separated edge ids");
  cacc->add_option("--center", o.center_flag, "ball center (with --radius)");
  cacc->add_option("--radius", o.radius, "ball radius");
  cacc->add_option("--b", o.width, "neighborhood width");
  cacc->add_option("--constant", o.constant, "constant C in the bound");

  CLI::App* dist = app.add_subcommand("distance", "path metric between two points");
  add_common(dist, o);
  dist->add_option("points", o.points, "two points (vertex id or edge@offset)")->expected(2);

  CLI::App* formb = app.add_subcommand("formbound", "relative bound of the negative part");
  add_common(formb, o);

  CLI11_PARSE(app, argc, argv);

  try {
    Context ctx(o);
    if (spectrum->parsed()) return cmd_spectrum(ctx);
    if (solve->parsed()) return cmd_solve(ctx);
    if (schnol->parsed()) return cmd_schnol(ctx);
    if (cacc->parsed()) return cmd_caccioppoli(ctx);
    if (dist->parsed()) return cmd_distance(ctx);
    if (formb->parsed()) return cmd_formbound(ctx);
  } catch (const std::invalid_argument& e) {
    std::cerr << "graphforms: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "graphforms: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
