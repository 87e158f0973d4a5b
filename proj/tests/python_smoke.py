# Copyright 2026 The graphforms Authors - All rights reserved.
# SPDX-License-Identifier: Apache-2.0
"""Smoke test for the python bindings.

Exercises every exported entry point once against values the C++ suites pin
down precisely; plain asserts so it runs with a bare interpreter.
"""

import json
import math
import os
import sys

import graphforms as gf

DATA = os.environ.get("GRAPHFORMS_DATA_DIR", os.path.join(os.path.dirname(__file__), "data"))


def close(a, b, tol):
    return abs(a - b) <= tol


# --- graph loading and the path metric -----------------------------------

interval = gf.Graph.load(os.path.join(DATA, "interval.json"))
assert interval.n_vertices == 2 and interval.n_edges == 1
assert close(interval.total_length, 1.0, 1e-15)
assert close(interval.distance("a", "b"), 1.0, 1e-15)
assert close(interval.distance("e@0.25", "e@0.75"), 0.5, 1e-15)

round_trip = gf.Graph(interval.to_json())
assert round_trip.to_json() == interval.to_json()
assert "2 vertices" in repr(interval)

try:
    interval.distance("nope", "b")
    raise AssertionError("unknown point accepted")
except ValueError:
    pass

# --- exact eigensolution by shooting --------------------------------------

# Degree-1 vertices with alpha = 0 impose a zero slope, so the interval's
# eigenfunctions are cos(k pi t); seed with the default (value 1, slope 0).
lam = math.pi * math.pi
sol = gf.solve(interval, lam, vertex="a")
assert close(sol.lam, lam, 1e-15)
assert close(abs(sol.eval("e", 1.0 / 3.0) - 0.5), 0.0, 1e-9)  # cos(pi/3)
assert close(abs(sol.eval("e", 1.0) + 1.0), 0.0, 1e-9)
assert "lambda=" in repr(sol)

doc = json.loads(sol.to_json())
assert close(doc["lambda"], lam, 1e-12)

try:
    gf.solve(interval, 1.0, vertex="a", value=0.0, derivative=1.0)
    raise AssertionError("infeasible energy accepted")
except ValueError as e:
    assert "matching defect" in str(e)

# --- discrete spectrum ----------------------------------------------------

vals, residuals = gf.spectrum(interval, count=3, mesh_h=0.01)
assert close(vals[0], 0.0, 1e-8)
assert close(vals[1], math.pi * math.pi, 2e-3 * math.pi * math.pi)
assert all(r < 1e-6 for r in residuals)

# --- form bound for a negative point mass ---------------------------------

mu = json.dumps({"point_masses": [{"edge": "e", "t": 0.5, "weight": -1.0}]})
fb = gf.form_bound(interval, mesh_h=0.1, mu=mu)
assert fb["admissible"] is True
assert close(fb["kappa"], 0.32741119887652803, 1e-9)
assert gf.form_bound(interval)["kappa"] == 0.0

# --- certificate pipeline on a truncated line -----------------------------

edges = [{"id": "l", "from": "o", "to": None, "length": "inf"},
         {"id": "r", "from": "o", "to": None, "length": "inf"}]
line = gf.Graph(json.dumps({"vertices": [{"id": "o"}], "edges": edges,
                            "truncation": {"L": 400.0}}))
cos_sol = gf.solve(line, 1.0, vertex="o")
cert = gf.certify(line, cos_sol, mesh_h=0.05, x0="o", b=0.25, radius_budget=8)
assert cert["verdict"] == "certified"
assert cert["points"], "certified verdict must come with a nonempty sequence"
assert cert["points"][-1]["ratio"] < 0.05

growing = gf.solve(line, -0.01, vertex="o",
                   edge_derivatives={"l": 0.1, "r": -0.1})
assert gf.certify(line, growing, mesh_h=0.05, x0="o")["verdict"] == "inconclusive"

# --- energy inequality on a ball ------------------------------------------

rep = gf.caccioppoli(line, cos_sol, center="o", radius=5.0, b=1.0, constant=16.0)
assert rep["pass"] is True
assert rep["lhs"] <= rep["rhs"]

# --- stored solutions round-trip ------------------------------------------

out = os.path.join(os.environ.get("TMPDIR", "/tmp"), "graphforms_smoke_solution.json")
with open(out, "w") as f:
    f.write(cos_sol.to_json())
reloaded = gf.load_solution(line, out)
assert reloaded.eval("l", 2.0) == cos_sol.eval("l", 2.0)
os.remove(out)

print("python smoke: ok")
sys.exit(0)
