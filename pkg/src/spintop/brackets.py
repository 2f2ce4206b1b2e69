"""Canonical Poisson brackets on flat phase spaces of four-vector pairs.

A phase point is a flat array ``[x, p, q_1, pi_1, ..., q_N, pi_N]`` of
contravariant components (16 + 8 N entries when ``x`` and ``p`` are
included).  The fundamental brackets are ``{x^mu, p^nu} = eta^{mu nu}`` and
likewise for every ``(q_i, pi_i)``, which is the sign for which
``xdot = {x, H}`` with ``H = c (p.p - m^2)`` gives ``xdot = 2 c p``.

Observables are callables on a list of 4-component blocks; they are
differentiated exactly with vector-mode dual numbers.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from . import dual
from .minkowski import ETA

Observable = Callable[[list], object]


def blocks(z) -> list:
    """Split a flat phase vector into consecutive four-vectors."""
    z = list(z)
    if len(z) % 8:
        raise ValueError("phase vector length must be a multiple of 8")
    return [np.array(z[i : i + 4], dtype=object) if isinstance(z[i], dual.Dual) else np.asarray(z[i : i + 4]) for i in range(0, len(z), 4)]


def grad(f: Observable, z) -> tuple[float, np.ndarray]:
    """Value and gradient of ``f(blocks(z))``."""
    return dual.gradient(lambda zz: f(blocks(zz)), z)


def poisson_from_gradients(gf, gg) -> float:
    """``{F, G}`` from the gradients of ``F`` and ``G``."""
    gf = np.asarray(gf, dtype=float).reshape(-1, 2, 4)
    gg = np.asarray(gg, dtype=float).reshape(-1, 2, 4)
    total = 0.0
    for (fq, fp), (gq, gp) in zip(gf, gg):
        total += fq @ ETA @ gp - fp @ ETA @ gq
    return float(total)


def poisson(f: Observable, g: Observable, z) -> float:
    return poisson_from_gradients(grad(f, z)[1], grad(g, z)[1])


def poisson_matrix(fs: Sequence[Observable], gs: Sequence[Observable], z) -> np.ndarray:
    """Matrix of brackets ``{f_i, g_j}``, gradients computed once each."""
    dfs = [grad(f, z)[1] for f in fs]
    dgs = [grad(g, z)[1] for g in gs]
    return np.array([[poisson_from_gradients(a, b) for b in dgs] for a in dfs])


def component(block: int, index: int) -> Observable:
    """Observable returning one component of one block."""
    return lambda b: b[block][index]
