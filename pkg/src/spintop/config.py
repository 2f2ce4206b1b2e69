"""Global numerical tolerances."""

from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass


@dataclass
class Tolerances:
    abs_tol: float = 1e-12  # algebraic identities on O(1) inputs
    rel_tol: float = 1e-10
    degenerate: float = 1e-12  # |p.p|, |k.xdot| below this is degenerate
    chart_sin: float = 1e-8  # |sin(theta)| below this is a chart singularity
    grazing: float = 1e-12  # |1 - n.v| below this is grazing
    q_min: float = 1e-6
    surface: float = 1e-6  # off-surface rejection for dynamics
    rates: float = 1e-9  # consistency of triad rates


tolerances = Tolerances()


@contextlib.contextmanager
def override(**changes):
    """Temporarily change global tolerances."""
    saved = dataclasses.asdict(tolerances)
    for key, val in changes.items():
        if not hasattr(tolerances, key):
            raise AttributeError(key)
        setattr(tolerances, key, val)
    try:
        yield tolerances
    finally:
        for key, val in saved.items():
            setattr(tolerances, key, val)
