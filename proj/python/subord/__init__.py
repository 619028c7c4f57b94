"""Python access to the subord C++ core.

Scalar results come back as Python numbers; structured ones (regions,
verdicts, reports) as dicts decoded from the JSON the core emits.
"""

import json

from . import _subord
from ._subord import (
    AnalyticFunction,
    BranchError,
    ConvergenceError,
    DomainError,
    NbEvaluator,
    NearBoundaryError,
    SubordError,
    dominant_coefficients,
    dominant_quadrature,
    dominant_series,
    identity_residual,
    lemma1_transform,
)

__all__ = [
    "AnalyticFunction",
    "BranchError",
    "ConvergenceError",
    "DomainError",
    "NbEvaluator",
    "NearBoundaryError",
    "SubordError",
    "dominant_coefficients",
    "dominant_quadrature",
    "dominant_series",
    "extrema_of_re",
    "generate_corpus",
    "identity_residual",
    "lemma1_transform",
    "membership",
    "mobius_image",
    "run_all",
]


def _target(target):
    if isinstance(target, dict):
        return json.dumps(target)
    if isinstance(target, (int, float)):
        return json.dumps({"rho": float(target)})
    A, B = target
    return json.dumps({"A": A, "B": B})


def mobius_image(A, B, r=1.0):
    return json.loads(_subord.mobius_image(A, B, r))


def extrema_of_re(gamma, A, B, angles=720):
    return json.loads(_subord.extrema_of_re(gamma, A, B, angles))


def membership(f, mu, target, alpha=1.0, beta=0.0, angles=180):
    """target: (A, B) for a Moebius class, a number rho for Re J > rho."""
    return json.loads(_subord.membership(f, mu, alpha, beta, _target(target), angles))


def generate_corpus(config=None):
    return json.loads(_subord.generate_corpus(json.dumps(config or {})))


def run_all(config=None):
    """Returns (report, exit_code) for a run with the given config dict."""
    report, code = _subord.run_all(json.dumps(config or {}))
    return json.loads(report), code
