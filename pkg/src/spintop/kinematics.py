"""Gauge-invariant rotation scalars of a worldline carrying a null flag.

Two routes to the dimensionless invariants ``P`` and ``Q``:

* covariant, from ``xdot`` and a triad with its rates (any gauge, any
  parametrisation);
* the Euler gauge ``xdot = (1, v)``, ``a = (0, i)``, ``b = (0, j)``,
  ``k = (1, n)``, where ``(i, j, n = i x j)`` is a rigid frame given by Euler
  angles.

The Euler frame is ``i = R e_y``, ``j = -R e_x``, ``n = R e_z`` with
``R = Rz(phi) Ry(theta) Rz(psi)``.  This is the orientation for which
``j'.n = theta' cos psi + phi' sin theta sin psi``,
``n'.i = -theta' sin psi + phi' sin theta cos psi`` and
``i'.j = psi' + phi' cos theta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dual
from . import minkowski as mk
from .config import tolerances
from .errors import ChartError, ConstraintError, DegenerateError, DomainError
from .spinor import NullTriad


@dataclass(frozen=True)
class InvariantPair:
    P: float
    Q: float
    I0: float

    @property
    def x(self) -> float:
        return float(np.sqrt(self.Q))

    @property
    def y(self) -> float:
        return self.P


@dataclass(frozen=True)
class EulerGaugeState:
    """Position, velocity, Euler angles and their rates (coordinate time)."""

    position: np.ndarray
    velocity: np.ndarray
    angles: np.ndarray  # theta, phi, psi
    rates: np.ndarray  # theta', phi', psi'

    def __post_init__(self):
        for name in ("position", "velocity", "angles", "rates"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (3,):
                raise ValueError(f"{name} needs 3 components")
            object.__setattr__(self, name, arr)

    @classmethod
    def from_q(cls, q, qdot) -> "EulerGaugeState":
        q = np.asarray(q, dtype=float)
        qdot = np.asarray(qdot, dtype=float)
        return cls(q[:3], qdot[:3], q[3:], qdot[3:])

    @property
    def q(self) -> np.ndarray:
        return np.concatenate((self.position, self.angles))

    @property
    def qdot(self) -> np.ndarray:
        return np.concatenate((self.velocity, self.rates))

    def to_dict(self) -> dict:
        return {"q": self.q.tolist(), "qdot": self.qdot.tolist()}


def _arr(v) -> np.ndarray:
    """Array view that keeps extended precision but promotes ints to float."""
    v = np.asarray(v)
    return v if v.dtype.kind == "f" else v.astype(float)


def rotation(theta, phi, psi) -> np.ndarray:
    ct, st = np.cos(theta), np.sin(theta)
    cf, sf = np.cos(phi), np.sin(phi)
    cp, sp = np.cos(psi), np.sin(psi)
    rz_phi = np.array([[cf, -sf, 0.0], [sf, cf, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[ct, 0.0, st], [0.0, 1.0, 0.0], [-st, 0.0, ct]])
    rz_psi = np.array([[cp, -sp, 0.0], [sp, cp, 0.0], [0.0, 0.0, 1.0]])
    return rz_phi @ ry @ rz_psi


def euler_frame(angles) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rigid frame ``(i, j, n)`` with ``n = i x j``."""
    R = rotation(*angles)
    return R[:, 1], -R[:, 0], R[:, 2]


def angular_velocity(angles, rates) -> np.ndarray:
    """Space-frame angular velocity; ``rates`` may be a batch of shape (..., 3)."""
    theta, phi, _ = angles
    rates = _arr(rates)
    n = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    e_node = np.array([-np.sin(phi), np.cos(phi), 0.0])
    e_z = np.array([0.0, 0.0, 1.0])
    return (
        rates[..., 0, None] * e_node
        + rates[..., 1, None] * e_z
        + rates[..., 2, None] * n
    )


def check_chart(angles) -> None:
    if abs(np.sin(angles[0])) < tolerances.chart_sin:
        raise ChartError("Euler chart singular at sin(theta) = 0; re-chart the state")


def euler_pq(angles, velocity, rates, ell: float):
    """Vectorised ``(P, Q)`` in the Euler gauge.

    ``velocity`` and ``rates`` may carry a leading batch axis.
    """
    velocity = _arr(velocity)
    v2 = np.sum(velocity * velocity, axis=-1)
    if np.any(v2 >= 1.0):
        raise ChartError("superluminal velocity |v| >= 1")
    _, _, n = euler_frame(angles)
    w = angular_velocity(angles, rates)
    g = 1.0 - velocity @ n
    if np.any(np.abs(g) < tolerances.grazing):
        raise ChartError("grazing state: 1 - n.v vanishes")
    wn = w @ n
    P = ell / np.sqrt(1.0 - v2) * (wn - np.sum(w * velocity, axis=-1)) / g
    Q = ell**2 * (np.sum(w * w, axis=-1) - wn * wn) / g**2
    return P, Q


def euler_invariants(s: EulerGaugeState, ell: float) -> InvariantPair:
    check_chart(s.angles)
    P, Q = euler_pq(s.angles, s.velocity, s.rates, ell)
    return InvariantPair(float(P), float(max(Q, 0.0)), float(1.0 - s.velocity @ s.velocity))


def covariant_chart(s: EulerGaugeState):
    """Four-vectors of the Euler gauge: ``(xdot, triad, (adot, bdot, kdot))``."""
    check_chart(s.angles)
    i, j, n = euler_frame(s.angles)
    w = angular_velocity(s.angles, s.rates)
    z = np.zeros(1)
    xdot = np.concatenate(([1.0], s.velocity))
    triad = NullTriad(np.concatenate(([1.0], n)), np.concatenate((z, i)), np.concatenate((z, j)))
    rates = tuple(np.concatenate((z, np.cross(w, e))) for e in (i, j, n))
    return xdot, triad, rates


def pq_core(xdot, k, a, b, adot, bdot, kdot, ell):
    """Unchecked covariant ``(P, Q)``; accepts dual-number components."""
    kx = mk.dot(k, xdot)
    num = mk.dot(a, bdot) * kx + mk.dot(k, adot) * mk.dot(b, xdot) + mk.dot(b, kdot) * mk.dot(a, xdot)
    P = ell / dual.sqrt(mk.dot(xdot, xdot)) * num / kx
    Q = -(ell**2) * mk.dot(kdot, kdot) / (kx * kx)
    return P, Q


def rate_residuals(triad: NullTriad, adot, bdot, kdot) -> dict[str, float]:
    """Time derivatives of the six triad relations (zero for consistent rates)."""
    k, a, b = triad.k, triad.a, triad.b
    return {
        "d(kk)": 2 * mk.dot(k, kdot),
        "d(ak)": mk.dot(adot, k) + mk.dot(a, kdot),
        "d(bk)": mk.dot(bdot, k) + mk.dot(b, kdot),
        "d(ab)": mk.dot(adot, b) + mk.dot(a, bdot),
        "d(aa)": 2 * mk.dot(a, adot),
        "d(bb)": 2 * mk.dot(b, bdot),
    }


def _check_configuration(xdot, triad, adot, bdot, kdot):
    xx = mk.dot(xdot, xdot)
    if not xx > 0:
        raise DomainError(f"tangent must be timelike (xdot.xdot = {xx:g})")
    kx = mk.dot(triad.k, xdot)
    if abs(kx) < tolerances.degenerate:
        raise DegenerateError("k.xdot vanishes")
    scale = max(
        1.0,
        *(float(np.abs(v).max()) for v in (adot, bdot, kdot)),
        *(float(np.abs(v).max()) for v in (triad.k, triad.a, triad.b)),
    ) ** 2
    worst = max(abs(r) for r in rate_residuals(triad, adot, bdot, kdot).values())
    if worst > tolerances.rates * scale:
        raise ConstraintError(f"triad rates inconsistent with the triad relations ({worst:.3g})")


def covariant_invariants(xdot, triad: NullTriad, adot, bdot, kdot, ell: float) -> InvariantPair:
    xdot, adot, bdot, kdot = (mk.vec(v) for v in (xdot, adot, bdot, kdot))
    _check_configuration(xdot, triad, adot, bdot, kdot)
    P, Q = pq_core(xdot, triad.k, triad.a, triad.b, adot, bdot, kdot, ell)
    return InvariantPair(float(P), float(max(Q, 0.0)), float(mk.dot(xdot, xdot)))


def basic_gauge_invariants(xdot, triad: NullTriad, adot, bdot, kdot):
    """``(I0, I1, I2, I3)``: line element, two tilts and the phase rate."""
    k, a, b = triad.k, triad.a, triad.b
    kx = mk.dot(k, xdot)
    I1 = mk.dot(k, adot) / kx
    I2 = mk.dot(k, bdot) / kx
    I3 = mk.dot(a, bdot) - I2 * mk.dot(a, xdot) + I1 * mk.dot(b, xdot)
    return mk.dot(xdot, xdot), I1, I2, I3


def covariant_angular_velocity(xdot, triad: NullTriad, adot, bdot, kdot) -> np.ndarray:
    """``Omega = [(a.bdot) k + (k.adot) b + (b.kdot) a] / (k.xdot)``."""
    k, a, b = triad.k, triad.a, triad.b
    return (mk.dot(a, bdot) * k + mk.dot(k, adot) * b + mk.dot(b, kdot) * a) / mk.dot(k, xdot)


def gauge_transform_rates(triad: NullTriad, rates, lam, mu, nu, lam_dot=0.0, mu_dot=0.0, nu_dot=0.0):
    """Rates of the transformed triad ``(lam k, a + mu k, b + nu k)``."""
    adot, bdot, kdot = rates
    return (
        adot + mu_dot * triad.k + mu * kdot,
        bdot + nu_dot * triad.k + nu * kdot,
        lam_dot * triad.k + lam * kdot,
    )
