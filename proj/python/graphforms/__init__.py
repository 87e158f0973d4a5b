# Copyright 2026 The graphforms Authors - All rights reserved.
# SPDX-License-Identifier: Apache-2.0
"""Numerics for quantum graphs.

Dirichlet forms with measure perturbations, finite-element spectra, exact
eigensolutions by shooting, and growth-based certificates that a candidate
energy belongs to the spectrum.

Graphs and measures cross the boundary as JSON text (same schema as the
``graphforms`` CLI); points are ``"vertex"`` or ``"edge@offset"`` strings.
"""

import json as _json

from ._core import (
    Graph,
    Solution,
    caccioppoli,
    form_bound,
    load_solution,
    solve,
    spectrum,
)
from ._core import certify as _certify_text

__all__ = [
    "Graph",
    "Solution",
    "caccioppoli",
    "certify",
    "form_bound",
    "load_solution",
    "solve",
    "spectrum",
]

__version__ = "0.1.0"


def certify(graph, solution, **kwargs):
    """Run the certificate pipeline; returns the certificate as a dict.

    Keyword arguments mirror the CLI: mesh_h, x0, b, delta, radius_budget,
    ratio_threshold, residual_factor, profile ("linear" or "smooth"), mu.
    """
    return _json.loads(_certify_text(graph, solution, **kwargs))
