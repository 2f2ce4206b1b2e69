"""Canonical momenta, spin and the Casimir invariants from a Lagrangian.

All four-vectors are contravariant.  Momenta follow the minus-sign convention
``p_mu = -dL/d xdot^mu`` (and likewise for every internal vector), so that a
free particle has ``p = m xdot / sqrt(xdot.xdot)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dual
from . import minkowski as mk
from .config import tolerances
from .errors import ConfigError, DegenerateError
from .kinematics import EulerGaugeState, _check_configuration, covariant_chart, pq_core
from .model import ModelU
from .spinor import NullTriad


@dataclass
class CanonicalSet:
    """Momentum ``p`` and the internal pairs ``(q_i, pi_i)``."""

    p: np.ndarray
    pairs: list = field(default_factory=list)
    x: np.ndarray | None = None

    def __post_init__(self):
        self.p = mk.vec(self.p)
        self.pairs = [(mk.vec(q), mk.vec(pi)) for q, pi in self.pairs]
        if self.x is not None:
            self.x = mk.vec(self.x)

    @property
    def n_vectors(self) -> int:
        return len(self.pairs)

    def casimir_mass(self) -> float:
        return float(mk.dot(self.p, self.p))


@dataclass(frozen=True)
class SpinData:
    M: mk.Bivector
    J: mk.Bivector
    W: np.ndarray


# --- momenta ------------------------------------------------------------------


def covariant_lagrangian(model: ModelU, m: float, ell: float, triad: NullTriad, xdot, adot, bdot, kdot):
    """``-m sqrt(xdot.xdot) u(sqrt(Q), P)``; velocities may be dual numbers."""
    P, Q = pq_core(xdot, triad.k, triad.a, triad.b, adot, bdot, kdot, ell)
    return -m * dual.sqrt(mk.dot(xdot, xdot)) * model.u(dual.sqrt(Q), P)


def canonical_momenta(model: ModelU, m: float, ell: float, config) -> CanonicalSet:
    """Momenta conjugate to ``x`` and to the triad vectors ``a, b, k``.

    ``config`` is ``(xdot, triad, (adot, bdot, kdot))``.  Derivatives are taken
    in all four ambient components of each velocity.  Pairs are returned in the
    order ``(a, pi_a), (b, pi_b), (k, pi_k)``.
    """
    xdot, triad, (adot, bdot, kdot) = config
    xdot, adot, bdot, kdot = (mk.vec(v) for v in (xdot, adot, bdot, kdot))
    _check_configuration(xdot, triad, adot, bdot, kdot)
    z = np.concatenate((xdot, adot, bdot, kdot))

    def lag(v):
        return covariant_lagrangian(model, m, ell, triad, v[0:4], v[4:8], v[8:12], v[12:16])

    _, g = dual.gradient(lag, z)
    mom = -(g.reshape(4, 4) @ mk.ETA)  # raise the index of -dL/dv_mu
    return CanonicalSet(mom[0], [(triad.a, mom[1]), (triad.b, mom[2]), (triad.k, mom[3])])


def canonical_momenta_euler(model: ModelU, m: float, ell: float, s: EulerGaugeState) -> CanonicalSet:
    """:func:`canonical_momenta` at the covariant image of an Euler-gauge state."""
    xdot, triad, rates = covariant_chart(s)
    cs = canonical_momenta(model, m, ell, (xdot, triad, rates))
    cs.x = np.concatenate(([0.0], s.position))
    return cs


# --- spin ---------------------------------------------------------------------


def angular_momentum(cs: CanonicalSet, include_orbital: bool = True) -> mk.Bivector:
    """``M = sum_i q_i ^ pi_i`` plus ``x ^ p`` when ``x`` is known."""
    M = mk.Bivector(np.zeros(6))
    for q, pi in cs.pairs:
        M = M + mk.Bivector.wedge(q, pi)
    if include_orbital and cs.x is not None:
        M = M + mk.Bivector.wedge(cs.x, cs.p)
    return M


def _require_massive(p) -> float:
    pp = float(mk.dot(p, p))
    if abs(pp) < tolerances.degenerate * max(1.0, float(np.abs(p).max()) ** 2):
        raise DegenerateError("p.p vanishes; spin projection undefined")
    return pp


def project_spin(M: mk.Bivector, p) -> mk.Bivector:
    """``J^{mu nu} = h^mu_a h^nu_b M^{ab}`` with ``h = 1 - p p / p.p``."""
    p = mk.vec(p)
    pp = _require_massive(p)
    h = np.eye(4) - np.outer(p, mk.lower(p)) / pp
    return mk.Bivector.from_matrix(h @ M.matrix() @ h.T)


def spin_tensor_summed(cs: CanonicalSet) -> mk.Bivector:
    """``J`` from the sum over pairs of
    ``p^2 (q ^ pi) + (p.pi)(p ^ q) + (p.q)(pi ^ p)``, divided by ``p^2``."""
    pp = _require_massive(cs.p)
    p = cs.p
    total = np.zeros(6)
    for q, pi in cs.pairs:
        total += (
            pp * mk.Bivector.wedge(q, pi).components
            + mk.dot(p, pi) * mk.Bivector.wedge(p, q).components
            + mk.dot(p, q) * mk.Bivector.wedge(pi, p).components
        )
    return mk.Bivector(total / pp)


def pauli_lubanski(M: mk.Bivector, p) -> np.ndarray:
    """``W^mu = -1/2 eps^{mu a b c} M_{ab} p_c``."""
    return -0.5 * np.einsum("mabc,ab,c->m", mk.EPS_UPPER, M.lowered(), mk.lower(p))


def spin_tensor(cs: CanonicalSet) -> SpinData:
    """Spin data; ``J`` by projection of ``M`` (the orbital part drops out)."""
    M = angular_momentum(cs)
    J = project_spin(M, cs.p)
    return SpinData(M, J, pauli_lubanski(M, cs.p))


def spin_square(J: mk.Bivector) -> float:
    """``J^{mu nu} J_{mu nu}``."""
    return float(np.sum(J.matrix() * J.lowered()))


def _det3(r0, r1, r2):
    return (
        r0[0] * (r1[1] * r2[2] - r1[2] * r2[1])
        - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
    )


def detsum_ww(p, pairs):
    """``W.W`` as minus the sum over ``i, j`` of 3x3 determinants of scalar
    products of ``(p, q_i, pi_i)`` against ``(p, q_j, pi_j)``.

    Works on dual-number components (used for bracket gradients).
    """
    total = 0.0
    for qi, pii in pairs:
        for qj, pij in pairs:
            rows = [
                [mk.dot(p, p), mk.dot(p, qj), mk.dot(p, pij)],
                [mk.dot(qi, p), mk.dot(qi, qj), mk.dot(qi, pij)],
                [mk.dot(pii, p), mk.dot(pii, qj), mk.dot(pii, pij)],
            ]
            total = total - _det3(*rows)
    return total


def casimir_spin_detsum(cs: CanonicalSet) -> float:
    return float(detsum_ww(cs.p, cs.pairs))


def casimir_values(cs: CanonicalSet, m: float, ell: float) -> tuple[float, float]:
    """``(p.p / m^2, W.W / (-m^4 l^2 / 4))``, comparable with the closed forms."""
    return cs.casimir_mass() / m**2, casimir_spin_detsum(cs) / (-0.25 * m**4 * ell**2)


# --- counting -----------------------------------------------------------------


def dof_count(n_v: int, n_i: int, n_ii: int, casimir_constraints: int = 2) -> tuple[float, float, float]:
    """Physical degrees of freedom counted two ways.

    Configuration count ``3 + 4 N_v - (N_I + N_II / 2)`` against the phase-space
    count ``[8 (1 + N_v) - 2 (c + N_I) - N_II] / 2``, where ``c`` first-class
    constraints come from the Casimirs: two when mass and spin are fixed
    separately, one when a single relation ties them.  Returns
    ``(lagrangian, hamiltonian, lagrangian - hamiltonian)``.
    """
    for name, v in (("N_v", n_v), ("N_I", n_i), ("N_II", n_ii)):
        if int(v) != v or v < 0:
            raise ConfigError(f"{name} must be a non-negative integer, got {v!r}")
    if n_ii % 2:
        raise ConfigError(f"N_II must be even (second-class constraints pair up), got {n_ii}")
    if casimir_constraints not in (1, 2):
        raise ConfigError("casimir_constraints must be 1 or 2")
    lag = 3 + 4 * n_v - (n_i + n_ii // 2)
    ham2 = 8 * (1 + n_v) - 2 * (casimir_constraints + n_i) - n_ii
    ham = ham2 // 2 if ham2 % 2 == 0 else ham2 / 2
    return lag, ham, lag - ham
