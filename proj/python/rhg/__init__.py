"""Harmonic analysis on the reduced Heisenberg group with multidimensional center."""

import json

from ._rhg import (
    RhgError,
    alpha_weight,
    divergence,
    f_alpha_norm_sq,
    gaussian_me,
    inverse,
    multiply,
    schatten,
    suite_names,
)
from ._rhg import run_invariants_json as _run_invariants_json
from ._rhg import run_suite_json as _run_suite_json

__all__ = [
    "RhgError",
    "alpha_weight",
    "divergence",
    "f_alpha_norm_sq",
    "gaussian_me",
    "inverse",
    "multiply",
    "run_invariants",
    "run_suite",
    "schatten",
    "suite_names",
]


def run_suite(name, config=None):
    """Run a named suite; returns the report as a dict."""
    return json.loads(_run_suite_json(name, json.dumps(config or {})))


def run_invariants(config=None):
    return json.loads(_run_invariants_json(json.dumps(config or {})))
