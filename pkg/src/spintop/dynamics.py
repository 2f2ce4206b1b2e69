"""Constrained Hamiltonian motion of a worldline carrying one null vector.

Phase space: position ``x``, momentum ``p``, a null vector ``k`` and its
momentum ``pi``.  The constraint surface is

    p.p = m^2,  k.k = 0,  k.pi = 0,  pi.pi = -m^2 l^2 / 4,  p.pi = 0,  k.p = m

with ``k^0 > 0``.  The first-class Hamiltonian
``H_r = c_t (p.p - m^2) + c_phi m^2 (pi.pi + m^2 l^2 / 4)`` carries two
arbitrary gauge functions; the Dirac bracket built from ``kk, k pi, p pi, kp``
turns it into

    xdot  = -1/2 l^2 m^3 c_phi k + 2 c_t p,    pdot = 0,
    kdot  = 2 m^2 c_phi pi,                    pidot = 1/2 l^2 m^3 c_phi (p - m k).

The centre ``x - pi/m`` (projected orthogonally to ``p``) never moves, and
``|pi|/m = l/2``, so every choice of ``c_phi`` traces a helix on one tube of
radius ``l/2`` about the momentum axis.  Different ``c_phi`` give different
worldlines from the same initial data.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import brackets
from . import minkowski as mk
from .errors import (
    ClockReversalWarning,
    ConfigError,
    ConstraintError,
    ProjectionError,
    StepUnderflowError,
)
from .noether import detsum_ww

CONSTRAINT_NAMES = ("pp", "kk", "kpi", "pipi", "ppi", "kp")
OFF_SURFACE_TOL = 1e-6


# --- phase points -------------------------------------------------------------


@dataclass(frozen=True)
class PhasePoint:
    x: np.ndarray
    p: np.ndarray
    k: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        for name in ("x", "p", "k", "pi"):
            object.__setattr__(self, name, mk.vec(getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.concatenate((self.x, self.p, self.k, self.pi))

    @classmethod
    def from_array(cls, z) -> "PhasePoint":
        z = np.asarray(z, dtype=float)
        return cls(z[0:4], z[4:8], z[8:12], z[12:16])

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "p": self.p.tolist(), "k": self.k.tolist(), "pi": self.pi.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "PhasePoint":
        return cls(d.get("x", [0.0, 0.0, 0.0, 0.0]), d["p"], d["k"], d["pi"])


def constraint_residuals(pt: PhasePoint, m: float, ell: float) -> dict[str, float]:
    """Raw values of the six surface functions (zero on the surface)."""
    p, k, pi = pt.p, pt.k, pt.pi
    return {
        "pp": float(mk.dot(p, p) - m * m),
        "kk": float(mk.dot(k, k)),
        "kpi": float(mk.dot(k, pi)),
        "pipi": float(mk.dot(pi, pi) + 0.25 * m * m * ell * ell),
        "ppi": float(mk.dot(p, pi)),
        "kp": float(mk.dot(k, p) - m),
    }


def constraint_scales(pt: PhasePoint, m: float, ell: float) -> np.ndarray:
    """Natural magnitude of each surface function, for relative checks."""
    nk = float(np.linalg.norm(pt.k))
    npi = max(float(np.linalg.norm(pt.pi)), 0.5 * m * ell)
    np_ = max(float(np.linalg.norm(pt.p)), m)
    return np.array([np_ * np_, nk * nk, nk * npi, npi * npi, np_ * npi, nk * np_])


def surface_defect(pt: PhasePoint, m: float, ell: float) -> float:
    """Largest scaled residual; ``inf`` when ``k`` is not future-pointing."""
    if not pt.k[0] > 0:
        return math.inf
    r = np.array(list(constraint_residuals(pt, m, ell).values()))
    return float(np.max(np.abs(r) / constraint_scales(pt, m, ell)))


def _check_surface(pt: PhasePoint, m: float, ell: float, tol: float) -> None:
    d = surface_defect(pt, m, ell)
    if d > tol:
        raise ConstraintError(f"phase point off the constraint surface (scaled residual {d:.3g})")


def _boost(beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    b2 = float(beta @ beta)
    if b2 >= 1.0:
        raise ValueError("boost speed must be below 1")
    g = 1.0 / math.sqrt(1.0 - b2)
    L = np.eye(4)
    L[0, 0] = g
    L[0, 1:] = L[1:, 0] = g * beta
    if b2 > 0:
        L[1:, 1:] += (g - 1.0) * np.outer(beta, beta) / b2
    return L


def random_surface_point(m: float, ell: float, rng: np.random.Generator, boost_max: float = 0.6, x_scale: float = 1.0) -> PhasePoint:
    """Random point on the constraint surface.

    Built in the rest frame of ``p`` (``k = (1, n)``, ``pi`` orthogonal to ``n``
    with ``|pi| = m l / 2``) and then boosted.
    """
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    t = np.cross(n, rng.normal(size=3))
    t *= 0.5 * m * ell / np.linalg.norm(t)
    d = rng.normal(size=3)
    beta = d / np.linalg.norm(d) * boost_max * rng.uniform() ** (1 / 3)
    L = _boost(beta)
    p = L @ np.array([m, 0.0, 0.0, 0.0])
    k = L @ np.concatenate(([1.0], n))
    pi = L @ np.concatenate(([0.0], t))
    x = x_scale * rng.normal(size=4)
    return PhasePoint(x, p, k, pi)


# --- gauge functions ----------------------------------------------------------


class GaugeFunction:
    """A function of the worldline parameter ``tau``."""

    def __call__(self, tau: float) -> float:
        raise NotImplementedError

    def derivative(self, tau: float) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __mul__(self, other: "GaugeFunction | float") -> "GaugeFunction":
        if not isinstance(other, GaugeFunction):
            other = Constant(float(other))
        return Product(self, other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, GaugeFunction) and self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(repr(self.to_dict()))


@dataclass(eq=False)
class Constant(GaugeFunction):
    c: float

    def __call__(self, tau):
        return self.c

    def derivative(self, tau):
        return 0.0

    def to_dict(self):
        return {"const": self.c}


@dataclass(eq=False)
class Polynomial(GaugeFunction):
    """``sum_n coeffs[n] tau^n``."""

    coeffs: Sequence[float]

    def __call__(self, tau):
        return float(np.polynomial.polynomial.polyval(tau, self.coeffs))

    def derivative(self, tau):
        d = np.polynomial.polynomial.polyder(np.asarray(self.coeffs, dtype=float))
        return float(np.polynomial.polynomial.polyval(tau, d)) if len(d) else 0.0

    def to_dict(self):
        return {"polynomial": list(map(float, self.coeffs))}


@dataclass(eq=False)
class Sinusoid(GaugeFunction):
    """``offset + amplitude sin(frequency tau + phase)``."""

    amplitude: float
    frequency: float
    phase: float = 0.0
    offset: float = 0.0

    def __call__(self, tau):
        return self.offset + self.amplitude * math.sin(self.frequency * tau + self.phase)

    def derivative(self, tau):
        return self.amplitude * self.frequency * math.cos(self.frequency * tau + self.phase)

    def to_dict(self):
        return {
            "sinusoid": {
                "amplitude": self.amplitude,
                "frequency": self.frequency,
                "phase": self.phase,
                "offset": self.offset,
            }
        }


@dataclass(eq=False)
class Product(GaugeFunction):
    f: GaugeFunction
    g: GaugeFunction

    def __call__(self, tau):
        return self.f(tau) * self.g(tau)

    def derivative(self, tau):
        return self.f.derivative(tau) * self.g(tau) + self.f(tau) * self.g.derivative(tau)

    def to_dict(self):
        return {"product": [self.f.to_dict(), self.g.to_dict()]}


def gauge_from_spec(spec) -> GaugeFunction:
    """Build a gauge function from a number or a one-key dict."""
    if isinstance(spec, GaugeFunction):
        return spec
    if isinstance(spec, (int, float)):
        return Constant(float(spec))
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(f"gauge function spec must be a number or a one-key object, got {spec!r}")
    (kind, val), = spec.items()
    if kind == "const":
        return Constant(float(val))
    if kind == "polynomial":
        return Polynomial([float(c) for c in val])
    if kind == "sinusoid":
        return Sinusoid(**{k: float(v) for k, v in val.items()})
    if kind == "product":
        return Product(gauge_from_spec(val[0]), gauge_from_spec(val[1]))
    raise ConfigError(f"unknown gauge function kind {kind!r}")


@dataclass(frozen=True)
class GaugeFunctions:
    c_t: GaugeFunction
    c_phi: GaugeFunction

    @classmethod
    def constant(cls, c_t: float, c_phi: float) -> "GaugeFunctions":
        return cls(Constant(c_t), Constant(c_phi))

    @classmethod
    def from_dict(cls, d: dict) -> "GaugeFunctions":
        return cls(gauge_from_spec(d["c_t"]), gauge_from_spec(d["c_phi"]))

    def to_dict(self) -> dict:
        return {"c_t": self.c_t.to_dict(), "c_phi": self.c_phi.to_dict()}

    def scaled(self, f: GaugeFunction) -> "GaugeFunctions":
        """Both multipliers times ``f`` (a reparametrisation of the worldline)."""
        return GaugeFunctions(Product(self.c_t, f), Product(self.c_phi, f))


# --- equations of motion ------------------------------------------------------


def _flow(x, p, k, pi, c_t, c_phi, m, ell):
    a = 0.5 * ell * ell * m**3 * c_phi
    xdot = -a * k + 2.0 * c_t * p
    kdot = 2.0 * m * m * c_phi * pi
    pidot = a * (p - m * k)
    return xdot, np.zeros(4), kdot, pidot


def hamiltonian_rhs(pt: PhasePoint, c_t: float, c_phi: float, m: float, ell: float) -> PhasePoint:
    """Phase velocity at ``pt`` (returned as a :class:`PhasePoint` of rates)."""
    _check_surface(pt, m, ell, OFF_SURFACE_TOL)
    return PhasePoint(*_flow(pt.x, pt.p, pt.k, pt.pi, c_t, c_phi, m, ell))


def _ode(tau, y, g: GaugeFunctions, m, ell):
    """Rates of ``[x, p, k, pi, phi, phase]``."""
    c_t, c_phi = g.c_t(tau), g.c_phi(tau)
    x, p, k, pi = y[0:4], y[4:8], y[8:12], y[12:16]
    xdot, pdot, kdot, pidot = _flow(x, p, k, pi, c_t, c_phi, m, ell)
    kpi = mk.dot(kdot, pi)
    phidot = 2.0 * kpi / (m * ell)
    phase = kpi + mk.dot(xdot, p)
    return np.concatenate((xdot, pdot, kdot, pidot, [phidot, phase]))


# --- brackets -----------------------------------------------------------------


def _kk(b):
    return mk.dot(b[2], b[2])


def _kpi(b):
    return mk.dot(b[2], b[3])


def _ppi(b):
    return mk.dot(b[1], b[3])


def _kp(b):
    return mk.dot(b[2], b[1])


SECOND_CLASS = {"kk": _kk, "kpi": _kpi, "ppi": _ppi, "kp": _kp}


def reduced_hamiltonian(c_t: float, c_phi: float, m: float, ell: float) -> Callable:
    """``H_r`` as an observable on ``[x, p, k, pi]`` blocks."""

    def H(b):
        p, pi = b[1], b[3]
        return c_t * (mk.dot(p, p) - m * m) + c_phi * m * m * (mk.dot(pi, pi) + 0.25 * m * m * ell * ell)

    return H


def poisson_bracket(U: Callable, V: Callable, pt: PhasePoint) -> float:
    """Canonical bracket on ``(x, p), (k, pi)``; observables take four blocks."""
    return brackets.poisson(U, V, pt.as_array())


def dirac_bracket(U: Callable, V: Callable, pt: PhasePoint, m: float, ell: float | None = None) -> float:
    """Bracket corrected by the second-class set ``kk, k pi, p pi, kp``.

    With ``A`` the Poisson matrix of ``(kk, k pi, p pi, kp)``, the correction
    is ``{U, chi} A^{-1} {chi, V}``; on the surface ``A^{-1}`` has the closed
    form used here.
    """
    if ell is not None:
        _check_surface(pt, m, ell, OFF_SURFACE_TOL)
    z = pt.as_array()
    gu = brackets.grad(U, z)[1]
    gv = brackets.grad(V, z)[1]
    g = {name: brackets.grad(f, z)[1] for name, f in SECOND_CLASS.items()}
    pb = brackets.poisson_from_gradients
    u = {n: pb(gu, gc) for n, gc in g.items()}
    v = {n: pb(gc, gv) for n, gc in g.items()}
    correction = (
        (u["kk"] * v["kpi"] - u["kpi"] * v["kk"]) / 2.0
        + (u["ppi"] * v["kk"] - u["kk"] * v["ppi"]) / (2.0 * m)
        + (u["kpi"] * v["kp"] - u["kp"] * v["kpi"]) / m
    )
    return pb(gu, gv) - correction


def dirac_flow(pt: PhasePoint, c_t: float, c_phi: float, m: float, ell: float) -> PhasePoint:
    """Phase velocity ``{z, H_r}_DB`` component by component."""
    H = reduced_hamiltonian(c_t, c_phi, m, ell)
    rates = [dirac_bracket(brackets.component(blk, i), H, pt, m, ell) for blk in range(4) for i in range(4)]
    return PhasePoint.from_array(rates)


def basic_scalars(n_v: int) -> dict[str, Callable]:
    """Observables ``q_i q_j, p q_i, p pi_i, q_i pi_j, pi_i pi_j`` on
    ``[x, p, q_1, pi_1, ...]`` blocks."""
    out = {}
    q = lambda b, i: b[2 + 2 * i]  # noqa: E731
    P = lambda b, i: b[3 + 2 * i]  # noqa: E731
    for i in range(n_v):
        out[f"pq{i+1}"] = lambda b, i=i: mk.dot(b[1], q(b, i))
        out[f"ppi{i+1}"] = lambda b, i=i: mk.dot(b[1], P(b, i))
        for j in range(n_v):
            out[f"q{i+1}pi{j+1}"] = lambda b, i=i, j=j: mk.dot(q(b, i), P(b, j))
            if j >= i:
                out[f"q{i+1}q{j+1}"] = lambda b, i=i, j=j: mk.dot(q(b, i), q(b, j))
                out[f"pi{i+1}pi{j+1}"] = lambda b, i=i, j=j: mk.dot(P(b, i), P(b, j))
    return out


def psi1(m: float) -> Callable:
    return lambda b: mk.dot(b[1], b[1]) - m * m


def psi2(m: float, ell: float) -> Callable:
    """``W.W + m^4 l^2 / 4`` with ``W.W`` from the determinant sum."""

    def f(b):
        pairs = [(b[i], b[i + 1]) for i in range(2, len(b), 2)]
        return detsum_ww(b[1], pairs) + 0.25 * m**4 * ell**2

    return f


@dataclass(frozen=True)
class FirstClassReport:
    psi1_max: float
    psi2_max: float
    per_scalar: dict


def poisson_first_class_check(n_v: int, seed: int, n_points: int = 100, m: float = 1.0, ell: float = 1.0) -> FirstClassReport:
    """Largest ``|{psi_1, s}|`` and ``|{psi_2, s}|`` over basic scalars ``s``.

    Points are random (not on any constraint surface), so a zero result holds
    identically in phase space.
    """
    if n_v not in (1, 2):
        raise ConfigError("n_v must be 1 or 2")
    rng = np.random.default_rng(seed)
    scalars = basic_scalars(n_v)
    f1, f2 = psi1(m), psi2(m, ell)
    per = {name: [0.0, 0.0] for name in scalars}
    for _ in range(n_points):
        z = rng.normal(size=8 * (1 + n_v))
        g1 = brackets.grad(f1, z)[1]
        g2 = brackets.grad(f2, z)[1]
        for name, s in scalars.items():
            gs = brackets.grad(s, z)[1]
            per[name][0] = max(per[name][0], abs(brackets.poisson_from_gradients(g1, gs)))
            per[name][1] = max(per[name][1], abs(brackets.poisson_from_gradients(g2, gs)))
    return FirstClassReport(
        max(v[0] for v in per.values()),
        max(v[1] for v in per.values()),
        {k: tuple(v) for k, v in per.items()},
    )


# --- projection ---------------------------------------------------------------


def project_to_surface(pt: PhasePoint, m: float, ell: float, tol: float = 1e-14, max_iter: int = 10) -> PhasePoint:
    """Minimum-norm Newton correction of ``(k, pi)`` onto the five conditions
    ``kk = 0, k pi = 0, pi pi = -m^2 l^2/4, p pi = 0, k p = m`` with ``p`` fixed."""
    p, k, pi = pt.p, pt.k.copy(), pt.pi.copy()
    eta = mk.ETA
    lp = eta @ p
    nk, npi, np_ = (float(np.linalg.norm(v)) for v in (k, pi, p))
    npi = max(npi, 0.5 * m * ell)
    scale = np.array([nk * nk, nk * npi, npi * npi, np_ * npi, nk * np_])
    for _ in range(max_iter + 1):
        r = np.array([
            mk.dot(k, k),
            mk.dot(k, pi),
            mk.dot(pi, pi) + 0.25 * m * m * ell * ell,
            mk.dot(p, pi),
            mk.dot(k, p) - m,
        ])
        if np.all(np.abs(r) <= tol * scale):
            return PhasePoint(pt.x, p, k, pi)
        lk, lpi = eta @ k, eta @ pi
        z4 = np.zeros(4)
        J = np.array([
            np.concatenate((2 * lk, z4)),
            np.concatenate((lpi, lk)),
            np.concatenate((z4, 2 * lpi)),
            np.concatenate((z4, lp)),
            np.concatenate((lp, z4)),
        ])
        try:
            step = -J.T @ np.linalg.solve(J @ J.T, r)
        except np.linalg.LinAlgError as exc:
            raise ProjectionError("constraint Jacobian singular") from exc
        k = k + step[:4]
        pi = pi + step[4:]
    raise ProjectionError(f"projection did not converge in {max_iter} iterations (residual {np.abs(r).max():.3g})")


# --- integration --------------------------------------------------------------

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _dp_step(f, tau, y, h, k1):
    ks = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], ks))
        ks.append(f(tau + _C[i] * h, yi))
    y5 = y + h * sum(b * kj for b, kj in zip(_B5, ks))
    err = h * sum(e * kj for e, kj in zip(_E, ks))
    return y5, err, ks[-1]


@dataclass
class Trajectory:
    """Samples of a run: ``tau`` and the flat state ``[x, p, k, pi, phi, phase]``."""

    tau: np.ndarray
    states: np.ndarray
    residuals: np.ndarray  # (n, 6) raw surface functions after projection
    gauge: GaugeFunctions
    m: float
    ell: float
    meta: dict = field(default_factory=dict)

    def point(self, i: int) -> PhasePoint:
        return PhasePoint.from_array(self.states[i, :16])

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0:4]

    @property
    def p(self) -> np.ndarray:
        return self.states[:, 4:8]

    @property
    def k(self) -> np.ndarray:
        return self.states[:, 8:12]

    @property
    def pi(self) -> np.ndarray:
        return self.states[:, 12:16]

    @property
    def phi(self) -> np.ndarray:
        return self.states[:, 16]

    @property
    def phase(self) -> np.ndarray:
        return self.states[:, 17]

    def velocity(self) -> np.ndarray:
        """``xdot`` at every sample, from the equations of motion."""
        return np.array([_ode(t, y, self.gauge, self.m, self.ell)[0:4] for t, y in zip(self.tau, self.states)])

    def drift_rate(self) -> float:
        """Largest scaled constraint residual per unit of elapsed ``tau``."""
        span = max(float(self.tau[-1] - self.tau[0]), 1.0)
        worst = 0.0
        for i in range(len(self.tau)):
            s = constraint_scales(self.point(i), self.m, self.ell)
            worst = max(worst, float(np.max(np.abs(self.residuals[i]) / s)))
        return worst / span


def integrate(
    pt0: PhasePoint,
    g: GaugeFunctions,
    m: float,
    ell: float,
    span: tuple[float, float],
    rtol: float = 1e-10,
    atol: float = 1e-12,
    n_samples: int = 401,
    max_step: float | None = None,
    h_min: float = 1e-12,
) -> Trajectory:
    """Dormand-Prince 5(4) with projection of ``(k, pi)`` after each accepted step.

    The run lands exactly on ``n_samples`` equally spaced values of ``tau``.
    ``t`` and ``phi`` start at zero; the phase integral starts at zero.
    """
    _check_surface(pt0, m, ell, 1e-10)
    t0, t1 = map(float, span)
    if not t1 > t0:
        raise ConfigError("span must be increasing")
    if n_samples < 2:
        raise ConfigError("need at least two samples")
    grid = np.linspace(t0, t1, n_samples)
    max_step = (t1 - t0) / 8 if max_step is None else max_step

    def f(tau, y):
        return _ode(tau, y, g, m, ell)

    y = np.concatenate((pt0.as_array(), [0.0, 0.0]))
    states = [y.copy()]
    res = [list(constraint_residuals(pt0, m, ell).values())]
    tau = t0
    k1 = f(tau, y)
    h = min(max_step, 1e-2 * (t1 - t0))
    n_acc = n_rej = 0
    for target in grid[1:]:
        while tau < target:
            last = h >= target - tau
            step = target - tau if last else h
            if step < h_min * max(1.0, abs(tau)):
                raise StepUnderflowError(f"step {step:.3g} below the minimum at tau = {tau:.6g}")
            y_new, err, _ = _dp_step(f, tau, y, step, k1)
            sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            e = float(np.sqrt(np.mean((err / sc) ** 2)))
            factor = 5.0 if e == 0 else min(5.0, max(0.2, 0.9 * e**-0.2))
            if e <= 1.0:
                tau = target if last else tau + step
                proj = project_to_surface(PhasePoint.from_array(y_new[:16]), m, ell)
                y = np.concatenate((proj.as_array(), y_new[16:]))
                k1 = f(tau, y)
                n_acc += 1
                h = min(max_step, max(h, step * factor) if last else step * factor)
            else:
                n_rej += 1
                h = step * factor
        states.append(y.copy())
        res.append(list(constraint_residuals(PhasePoint.from_array(y[:16]), m, ell).values()))
    meta = {"method": "dormand-prince 5(4) + projection", "rtol": rtol, "atol": atol, "accepted": n_acc, "rejected": n_rej}
    return Trajectory(grid, np.array(states), np.array(res), g, m, ell, meta)


# --- observables --------------------------------------------------------------


@dataclass
class Observables:
    tau: np.ndarray
    t: np.ndarray
    phi: np.ndarray
    t_rate: np.ndarray
    phi_rate: np.ndarray
    tanh_psi: np.ndarray
    psi: np.ndarray
    radius: np.ndarray  # nan where absent
    axis_distance: np.ndarray
    phase: np.ndarray


def cm_time(tr: Trajectory) -> np.ndarray:
    """``t = p.(x - x_0) / m``; proper time of the centre-of-momentum frame."""
    d = tr.x - tr.x[0]
    return np.array([mk.dot(pv, dv) for pv, dv in zip(tr.p, d)]) / tr.m


def axis_distance(tr: Trajectory, origin=None) -> np.ndarray:
    """Distance, in the centre-of-momentum frame, from the line through
    ``x_0 - pi_0 / m`` along ``p``."""
    c = (tr.x[0] - tr.pi[0] / tr.m) if origin is None else np.asarray(origin, dtype=float)
    out = []
    for x, p in zip(tr.x, tr.p):
        d = mk.project_orthogonal(x - c, p)
        out.append(math.sqrt(max(0.0, -float(mk.dot(d, d)))))
    return np.array(out)


def curvature_radius(xdot, xddot, p) -> float:
    """Radius of curvature of the path orthogonal to ``p``; ``nan`` without
    transverse motion."""
    a = mk.project_orthogonal(xdot, p)
    b = mk.project_orthogonal(xddot, p)
    aa, ab, bb = mk.dot(a, a), mk.dot(a, b), mk.dot(b, b)
    det = aa * bb - ab * ab
    if aa == 0.0 or det == 0.0:
        return math.nan
    val = -(aa**3) / det
    return math.sqrt(val) if val > 0 else math.nan


def _acceleration(tau, y, g: GaugeFunctions, m, ell):
    """Analytic ``xddot`` including the gauge-function derivatives."""
    p, k, pi = y[4:8], y[8:12], y[12:16]
    c_phi, dc_phi, dc_t = g.c_phi(tau), g.c_phi.derivative(tau), g.c_t.derivative(tau)
    kdot = 2.0 * m * m * c_phi * pi
    return -0.5 * ell * ell * m**3 * (dc_phi * k + c_phi * kdot) + 2.0 * dc_t * p


def observables(tr: Trajectory, warn: bool = True) -> Observables:
    m, ell = tr.m, tr.ell
    t_rate, phi_rate, radius = [], [], []
    for tau, y in zip(tr.tau, tr.states):
        r = _ode(tau, y, tr.gauge, m, ell)
        xdot = r[0:4]
        t_rate.append(mk.dot(xdot, y[4:8]) / m)
        phi_rate.append(r[16])
        radius.append(curvature_radius(xdot, _acceleration(tau, y, tr.gauge, m, ell), y[4:8]))
    t_rate, phi_rate = np.array(t_rate), np.array(phi_rate)
    if warn and np.any(t_rate <= 0):
        warnings.warn("x.p <= 0 on part of the run: the centre-of-momentum clock runs backward", ClockReversalWarning, stacklevel=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        tanh_psi = np.where(phi_rate == 0, 0.0, 0.5 * ell * np.abs(phi_rate / t_rate))
        psi = np.where(tanh_psi < 1, np.arctanh(np.minimum(tanh_psi, 1.0)), np.inf)
    return Observables(
        tau=tr.tau,
        t=cm_time(tr),
        phi=tr.phi.copy(),
        t_rate=t_rate,
        phi_rate=phi_rate,
        tanh_psi=tanh_psi,
        psi=psi,
        radius=np.array(radius),
        axis_distance=axis_distance(tr),
        phase=tr.phase.copy(),
    )


CSV_COLUMNS = (
    ["tau", "t"]
    + [f"x{i}" for i in range(4)]
    + [f"p{i}" for i in range(4)]
    + [f"k{i}" for i in range(4)]
    + [f"pi{i}" for i in range(4)]
    + [f"res_{n}" for n in CONSTRAINT_NAMES]
    + ["psi", "R_c", "axis_distance", "phi", "tanh_psi"]
)


def trajectory_rows(tr: Trajectory, obs: Observables | None = None) -> list[list[float]]:
    obs = observables(tr, warn=False) if obs is None else obs
    rows = []
    for i in range(len(tr.tau)):
        rows.append(
            [tr.tau[i], obs.t[i], *tr.states[i, :16], *tr.residuals[i], obs.psi[i], obs.radius[i], obs.axis_distance[i], obs.phi[i], obs.tanh_psi[i]]
        )
    return rows


# --- tubes --------------------------------------------------------------------


def _t_interpolant(tr: Trajectory):
    """Position as a function of centre-of-momentum time."""
    t = cm_time(tr)
    xdot = tr.velocity()
    t_rate = np.array([mk.dot(v, p) for v, p in zip(xdot, tr.p)]) / tr.m
    if np.any(t_rate <= 0):
        return None
    return t, CubicHermiteSpline(t, tr.x, xdot / t_rate[:, None], axis=0)


def worldline_separation(a: Trajectory, b: Trajectory) -> float:
    """Largest spatial distance (orthogonal to ``p``) between the two
    worldlines at equal centre-of-momentum time, over their common time range.

    Falls back to equal ``tau`` when either clock runs backward.
    """
    ia, ib = _t_interpolant(a), _t_interpolant(b)
    p = a.p[0]
    if ia is None or ib is None:
        n = min(len(a.tau), len(b.tau))
        diffs = a.x[:n] - b.x[:n]
    else:
        ta, fa = ia
        tb, fb = ib
        lo, hi = max(ta[0], tb[0]), min(ta[-1], tb[-1])
        ts = np.concatenate((ta[(ta >= lo) & (ta <= hi)], tb[(tb >= lo) & (tb <= hi)]))
        diffs = fa(ts) - fb(ts)
    worst = 0.0
    for d in diffs:
        dp = mk.project_orthogonal(d, p)
        worst = max(worst, math.sqrt(max(0.0, -float(mk.dot(dp, dp)))))
    return worst


@dataclass
class TubeReport:
    axis_distances: list  # per trajectory: array of distances
    radius: float
    axis_distance_max_dev: float
    separation: float
    distinct_worldlines: bool
    casimir_mass_max_dev: list  # per trajectory: max |p.p/m^2 - 1|
    threshold: float

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "axis_distance_max_dev": self.axis_distance_max_dev,
            "separation": self.separation,
            "distinct_worldlines": self.distinct_worldlines,
            "casimir_mass_max_dev": self.casimir_mass_max_dev,
            "threshold": self.threshold,
        }


def tube_sample(
    pt0: PhasePoint,
    gauges: Sequence[GaugeFunctions],
    m: float,
    ell: float,
    span: tuple[float, float],
    max_workers: int | None = None,
    **kwargs,
) -> tuple[list[Trajectory], TubeReport]:
    """One trajectory per gauge from the same initial point, and the tube report.

    All gauges must share ``c_t``.  Worldlines count as distinct when their
    separation exceeds ``1e3`` times the integration tolerance (in units of
    ``l``).
    """
    gauges = list(gauges)
    if not gauges:
        raise ConfigError("tube needs at least one gauge")
    if any(gg.c_t != gauges[0].c_t for gg in gauges[1:]):
        raise ConfigError("all tube members must share c_t")
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        trs = list(pool.map(lambda gg: integrate(pt0, gg, m, ell, span, **kwargs), gauges))
    axis = [axis_distance(tr) for tr in trs]
    radius = 0.5 * ell
    dev = max(float(np.max(np.abs(a - radius))) for a in axis)
    sep = max((worldline_separation(a, b) for i, a in enumerate(trs) for b in trs[i + 1 :]), default=0.0)
    tol = max(kwargs.get("rtol", 1e-10), kwargs.get("atol", 1e-12))
    threshold = 1e3 * tol * ell
    cm = [float(max(abs(mk.dot(p, p) / m**2 - 1.0) for p in tr.p)) for tr in trs]
    return trs, TubeReport(axis, radius, dev, sep, sep > threshold, cm, threshold)


# --- zitterbewegung presets ---------------------------------------------------


def zitter_presets(pt0: PhasePoint, m: float, ell: float, which: str, c_phi, span, **kwargs) -> tuple[Trajectory, np.ndarray]:
    """Experimental: the two gauges ``c_t = 0`` (A) and ``c_t = m^2 l^2 c_phi`` (B).

    Returns the trajectory and ``xdot.xdot`` at every sample; preset A moves
    along the null vector ``k``.
    """
    c_phi = gauge_from_spec(c_phi)
    if which == "A":
        g = GaugeFunctions(Constant(0.0), c_phi)
    elif which == "B":
        g = GaugeFunctions(Product(Constant(m * m * ell * ell), c_phi), c_phi)
    else:
        raise ConfigError(f"unknown preset {which!r}; expected 'A' or 'B'")
    tr = integrate(pt0, g, m, ell, span, **kwargs)
    tr.meta["experimental"] = True
    tr.meta["preset"] = which
    v = tr.velocity()
    return tr, np.array([mk.dot(a, a) for a in v])
