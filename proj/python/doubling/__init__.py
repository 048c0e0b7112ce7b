"""Schrodinger operators with doubling-map potentials.

Thin wrapper around the C++ core; see ``doubling._doubling`` for the full API.
"""

import json as _json

from ._doubling import (
    DigitSequence,
    NumericalError,
    PotentialSpec,
    SamplingFunction,
    ValidationError,
    doubling_map,
    eigenvalues,
    encode,
    estimate_gamma,
    halfline_potentials,
    identity_suite,
    lyapunov_curve,
    participation_ratios,
    periodic_bands,
    wholeline_potentials,
)
from ._doubling import run as _run


def run(config):
    """Run an experiment described by a config dict (CLI ``--config`` schema)."""
    return _run(_json.dumps(config))


__all__ = [
    "DigitSequence",
    "NumericalError",
    "PotentialSpec",
    "SamplingFunction",
    "ValidationError",
    "doubling_map",
    "eigenvalues",
    "encode",
    "estimate_gamma",
    "halfline_potentials",
    "identity_suite",
    "lyapunov_curve",
    "participation_ratios",
    "periodic_bands",
    "run",
    "wholeline_potentials",
]
