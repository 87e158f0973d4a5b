// Copyright 2026 The graphforms Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "doctest.h"

#include "graphforms/eigensolution.hpp"
#include "graphforms/io.hpp"
#include "oracles.hpp"

using namespace graphforms;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string data_path(const std::string& name) {
  return std::string(GRAPHFORMS_DATA_DIR) + "/" + name;
}

fs::path scratch_dir() {
  fs::path p = fs::temp_directory_path() / "graphforms_cli_scratch";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct RunResult {
  int exit_code = -1;
  std::string out, err;
};

// run the CLI binary with `args`, capturing both streams
RunResult run_cli(const std::string& args) {
  fs::path dir = scratch_dir();
  fs::path so = dir / "stdout.txt", se = dir / "stderr.txt";
  std::string cmd = std::string(GRAPHFORMS_CLI_PATH) + " " + args + " > " + so.string() +
                    " 2> " + se.string();
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (rc >= 0 && rc < 256) ? rc : (rc >> 8) & 0xff;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

void check_throws_mentioning(const std::function<void()>& f, const std::string& needle) {
  try {
    f();
    FAIL_CHECK("expected a failure mentioning '", needle, "'");
  } catch (const std::exception& e) {
    CAPTURE(e.what());
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_SUITE("io_cli") {

TEST_CASE("graph serialization round-trips structurally") {
  auto g = graph_from_json(load_json_file(data_path("spider.json")));
  Json once = graph_to_json(*g);
  auto g2 = graph_from_json(once);
  CHECK(graph_to_json(*g2) == once);
  CHECK(g2->vertex_count() == g->vertex_count());
  CHECK(g2->edge_count() == g->edge_count());
  for (int e = 0; e < g->edge_count(); ++e)
    CHECK(g2->edge_length(e) == g->edge_length(e));
  CHECK(g2->has_truncation());
  CHECK(g2->alpha(g2->find_vertex("hub")) == -1.0);
}

TEST_CASE("malformed graph documents fail with located diagnostics") {
  check_throws_mentioning(
      [] { (void)graph_from_json(Json::parse(R"({"vertices": [], "edge": []})")); }, "graph");
  check_throws_mentioning(
      [] {
        (void)graph_from_json(Json::parse(
            R"({"vertices": [{"id": "a"}], "edges": [{"id": "e", "from": "a", "to": null, "length": 2.0}]})"));
      },
      "lead");
  check_throws_mentioning(
      [] {
        (void)graph_from_json(Json::parse(
            R"({"vertices": [{"id": "a", "alpha": "big"}], "edges": []})"));
      },
      "alpha");
  check_throws_mentioning(
      [] {
        (void)graph_from_json(Json::parse(
            R"({"vertices": [{"id": "a"}, {"id": "a"}], "edges": [{"id": "e", "from": "a", "to": "a", "length": 1.0}]})"));
      },
      "a");
}

TEST_CASE("point parsing: vertex ids and edge@offset") {
  auto g = graph_from_json(load_json_file(data_path("interval.json")));
  GraphPoint v = point_from_string(*g, "a");
  CHECK(v.is_vertex());
  CHECK(v.vertex == g->find_vertex("a"));
  GraphPoint p = point_from_string(*g, "e@0.25");
  CHECK_FALSE(p.is_vertex());
  CHECK(p.offset == 0.25);
  // endpoint offsets snap to the vertex
  CHECK(point_from_string(*g, "e@1.0").is_vertex());
  CHECK_THROWS_AS((void)point_from_string(*g, "nope"), std::invalid_argument);
  CHECK_THROWS_AS((void)point_from_string(*g, "e@zebra"), std::invalid_argument);
  CHECK_THROWS_AS((void)point_from_string(*g, "e@7.5"), std::invalid_argument);

  Json pj = point_to_json(*g, p);
  GraphPoint back = point_from_json(*g, pj, "point");
  CHECK(back.edge == p.edge);
  CHECK(back.offset == p.offset);
}

TEST_CASE("solution files round-trip the exact coefficients") {
  auto g = testkit::unit_interval();
  ShootResult r = shoot(g, kPi * kPi, SeedSpec{});
  REQUIRE(r.feasible());
  Json j = solution_to_json(*g, *r.solution, kPi * kPi);
  auto [back, lambda] = solution_from_json(g, j);
  CHECK(lambda == kPi * kPi);
  for (double t : {0.0, 0.3, 0.77, 1.0}) {
    CHECK(std::abs(back.eval(0, t) - r.solution->eval(0, t)) == 0.0);
  }
  // a document written for a different graph is refused
  auto other = graph_from_json(load_json_file(data_path("parallel.json")));
  check_throws_mentioning([&] { (void)solution_from_json(other, j); }, "edge");
}

TEST_CASE("float formatting survives a text round trip") {
  for (double x : {0.1, 1.0 / 3.0, kPi, 1e300, 2.2250738585072014e-308, -123456789.25, 0.0}) {
    std::string s = format_float(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_float(1.0) == "1");
  CHECK(format_float(-0.5) == "-0.5");
}

TEST_CASE("table writers: golden outputs in both formats") {
  Table t;
  t.columns = {"n", "lambda", "tag"};
  t.add_row({1, 0.5, "plain"});
  t.add_row({2, -1.0 / 3.0, "he,llo\"x"});
  std::ostringstream csv;
  write_table(csv, t, TableFormat::Csv);
  CHECK(csv.str() ==
        "n,lambda,tag\n"
        "1,0.5,plain\n"
        "2,-0.33333333333333331,\"he,llo\"\"x\"\n");
  std::ostringstream jl;
  write_table(jl, t, TableFormat::JsonLines);
  CHECK(jl.str() ==
        "{\"n\":1,\"lambda\":0.5,\"tag\":\"plain\"}\n"
        "{\"n\":2,\"lambda\":-0.33333333333333331,\"tag\":\"he,llo\\\"x\"}\n");
  CHECK(table_format_from_string("csv") == TableFormat::Csv);
  CHECK(table_format_from_string("jsonlines") == TableFormat::JsonLines);
  CHECK_THROWS_AS((void)table_format_from_string("tsv"), std::invalid_argument);
}

TEST_CASE("cli: spectrum table on the unit interval") {
  RunResult r = run_cli("spectrum --graph " + data_path("interval.json") +
                        " --mesh-h 0.02 --count 4");
  REQUIRE(r.exit_code == 0);
  auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"n", "lambda", "residual"});
  CHECK(std::abs(std::strtod(rows[1][1].c_str(), nullptr)) < 1e-8);
  // the h^2 lambda/12 interpolation bias at h = 0.02 reaches 1.3e-3 for 4 pi^2
  CHECK(std::strtod(rows[2][1].c_str(), nullptr) ==
        doctest::Approx(kPi * kPi).epsilon(2e-3));
  CHECK(std::strtod(rows[3][1].c_str(), nullptr) ==
        doctest::Approx(4 * kPi * kPi).epsilon(2e-3));
}

TEST_CASE("cli: distance prints the exact metric value") {
  RunResult r = run_cli("distance v1 v2 --graph " + data_path("parallel.json"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "1\n");
  RunResult deep = run_cli("distance long@1.5 v1 --graph " + data_path("parallel.json"));
  CHECK(deep.out == "1.5\n");
}

TEST_CASE("cli: reruns are byte-identical") {
  std::string args = "spectrum --graph " + data_path("hexcycle.json") +
                     " --mesh-h 0.04 --count 6 --format jsonlines";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());
}

TEST_CASE("cli: malformed input names the problem, bad math names the stage") {
  fs::path bad = scratch_dir() / "bad_graph.json";
  spit(bad, "{\"vertices\": [{\"id\": \"a\"}], \"edges\": 7}");
  RunResult r = run_cli("spectrum --graph " + bad.string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("graphforms:") != std::string::npos);
  CHECK(r.err.find("edges") != std::string::npos);

  RunResult miss = run_cli("solve --graph " + data_path("interval.json") + " --lambda 1");
  CHECK(miss.exit_code == 2);
  CHECK(miss.err.find("solve: no eigensolution at lambda=1") != std::string::npos);
}

TEST_CASE("cli: config bundle drives solve and certification end to end") {
  fs::path dir = scratch_dir();
  fs::path graph = dir / "chain.json";
  spit(graph, R"({"vertices": [{"id": "o"}],
 "edges": [{"id": "right", "from": "o", "to": null, "length": "inf"},
           {"id": "left", "from": "o", "to": null, "length": "inf"}],
 "truncation": {"L": 400}})");
  fs::path cfg = dir / "certify.json";
  spit(cfg, std::string(R"({"graph_file": ")") + graph.string() + R"(",
 "lambda": 1.0,
 "mesh_h": 0.05,
 "schnol": {"b": 0.25}})");

  fs::path outdir = dir / "run1";
  RunResult solved = run_cli("solve --config " + cfg.string() + " --out " + outdir.string());
  REQUIRE(solved.exit_code == 0);
  CHECK(solved.out.find("wrote ") != std::string::npos);
  fs::path solution = outdir / "solution.json";
  REQUIRE(fs::exists(solution));

  RunResult dry = run_cli("schnol --config " + cfg.string() + " --solution " +
                          solution.string() + " --dry-run");
  CHECK(dry.exit_code == 0);
  CHECK(dry.out.find("command: schnol") != std::string::npos);
  CHECK(dry.out.find("b: 0.25") != std::string::npos);

  RunResult cert = run_cli("schnol --config " + cfg.string() + " --solution " +
                           solution.string() + " --out " + outdir.string());
  REQUIRE(cert.exit_code == 0);
  CHECK(cert.out.find("verdict: certified") != std::string::npos);
  REQUIRE(fs::exists(outdir / "certificate.json"));
  REQUIRE(fs::exists(outdir / "per_n.csv"));
  Json certificate = load_json_file((outdir / "certificate.json").string());
  CHECK(certificate["verdict"] == "certified");

  // rerunning writes byte-identical artifacts
  fs::path outdir2 = dir / "run2";
  RunResult again = run_cli("schnol --config " + cfg.string() + " --solution " +
                            solution.string() + " --out " + outdir2.string());
  REQUIRE(again.exit_code == 0);
  CHECK(slurp(outdir / "certificate.json") == slurp(outdir2 / "certificate.json"));
  CHECK(slurp(outdir / "per_n.csv") == slurp(outdir2 / "per_n.csv"));
}

TEST_CASE("cli: formbound and caccioppoli subcommands") {
  fs::path dir = scratch_dir();
  fs::path cfg = dir / "formbound.json";
  spit(cfg, std::string(R"({"graph_file": ")") + data_path("interval.json") + R"(",
 "mesh_h": 0.01,
 "mu": {"point_masses": [{"edge": "e", "t": 0.5, "weight": -1.0}]}})");
  RunResult fb = run_cli("formbound --config " + cfg.string());
  REQUIRE(fb.exit_code == 0);
  auto rows = parse_csv(fb.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"kappa", "c_kappa", "admissible"});
  double kappa = std::strtod(rows[1][0].c_str(), nullptr);
  CHECK(kappa == doctest::Approx(0.328).epsilon(0.01));
  CHECK(kappa < 1.0);
  CHECK(rows[1][2] == "true");

  // solve the ground state of the attractive well, then test the energy bound
  fs::path wellg = dir / "well.json";
  spit(wellg, R"({"vertices": [{"id": "o", "alpha": -1.0}],
 "edges": [{"id": "right", "from": "o", "to": null, "length": "inf"},
           {"id": "left", "from": "o", "to": null, "length": "inf"}],
 "truncation": {"L": 40}})");
  fs::path wellcfg = dir / "well_cfg.json";
  spit(wellcfg, std::string(R"({"graph_file": ")") + wellg.string() + R"(",
 "lambda": -0.25,
 "solve_seed": {"vertex": "o", "value": [1, 0], "derivative": [-0.5, 0]}})");
  fs::path wellout = dir / "well_out";
  RunResult ws = run_cli("solve --config " + wellcfg.string() + " --out " + wellout.string());
  REQUIRE(ws.exit_code == 0);
  RunResult cc = run_cli("caccioppoli --config " + wellcfg.string() + " --solution " +
                         (wellout / "solution.json").string() +
                         " --center o --radius 5 --b 1 --constant 40");
  REQUIRE(cc.exit_code == 0);
  auto crows = parse_csv(cc.out);
  REQUIRE(crows.size() == 2);
  CHECK(crows[0][0] == "lambda");
  CHECK(crows[1].back() == "true");
}

}  // TEST_SUITE
