"""Reduced Lagrangian in the Euler gauge and its velocity Hessian.

The Hessian ``d^2 L / d qdot^i d qdot^j`` is taken by central second
differences with one Richardson step (``h`` and ``h/2``), and its rank is
decided from singular values, never from the determinant alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import tolerances
from .errors import ChartError, DegenerateError, DomainError, StepPolicyError
from .kinematics import EulerGaugeState, check_chart, euler_pq
from .linalg import jacobi_svd, rank_from_singular_values
from .model import ModelU, closed_form_hessian_factor, jacobian_cmcj, jacobian_relation_prefactor

ReducedState = EulerGaugeState

DEFAULT_TAU_RANK = 1e-7


@dataclass(frozen=True)
class StepPolicy:
    """Per-coordinate step ``h_i = base * max(1, |qdot_i|)``.

    ``max_disagreement`` bounds ``max|D(h/2) - D(h)| / max|H|`` between the
    two Richardson levels.
    """

    base: float = 1e-4
    max_disagreement: float = 1e-5

    def steps(self, qdot) -> np.ndarray:
        return self.base * np.maximum(1.0, np.abs(np.asarray(qdot, dtype=float)))


@dataclass
class HessianReport:
    matrix: np.ndarray
    det: float
    singular_values: np.ndarray
    rank: int
    threshold: float
    disagreement: float = 0.0
    state: EulerGaugeState | None = None
    model: ModelU | None = field(default=None, repr=False)

    def rank_at(self, tau: float) -> int:
        return rank_from_singular_values(self.singular_values, tau)

    def normalized_det(self) -> float:
        return self.det / self.singular_values[0] ** len(self.singular_values)

    def to_dict(self) -> dict:
        return {
            "state": None if self.state is None else self.state.to_dict(),
            "model": None if self.model is None else self.model.to_dict(),
            "det": self.det,
            "singular_values": [float(s) for s in self.singular_values],
            "rank": self.rank,
            "threshold": self.threshold,
        }


def _xy_batch(ell, angles, qdot):
    P, Q = euler_pq(angles, qdot[..., :3], qdot[..., 3:], ell)
    # Q is a squared norm; clip roundoff below zero
    return np.sqrt(np.maximum(Q, 0.0)), P


def lagrangian_batch(model: ModelU, m: float, ell: float, q, qdot, dtype=np.float64) -> np.ndarray:
    """``L = -m sqrt(1 - v^2) u(sqrt(Q), P)`` for a batch of velocities at fixed ``q``.

    ``dtype=np.longdouble`` evaluates in extended precision.
    """
    q = np.asarray(q, dtype=dtype)
    qdot = np.atleast_2d(np.asarray(qdot, dtype=dtype))
    check_chart(q[3:])
    x, y = _xy_batch(ell, q[3:], qdot)
    gamma_inv = np.sqrt(1.0 - np.sum(qdot[:, :3] ** 2, axis=1))
    return -m * gamma_inv * model.value(x, y)


def reduced_lagrangian(model: ModelU, m: float, ell: float, s: EulerGaugeState) -> float:
    return float(lagrangian_batch(model, m, ell, s.q, s.qdot)[0])


def _stencil(qdot, h):
    """Velocity points of the central second-difference stencil."""
    n = len(qdot)
    pts = [qdot]
    for i in range(n):
        for sgn in (1.0, -1.0):
            p = qdot.copy()
            p[i] += sgn * h[i]
            pts.append(p)
    for i in range(n):
        for j in range(i + 1, n):
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                p = qdot.copy()
                p[i] += si * h[i]
                p[j] += sj * h[j]
                pts.append(p)
    return np.array(pts)


def _assemble(vals, h):
    n = len(h)
    H = np.empty((n, n), dtype=vals.dtype)
    f0 = vals[0]
    for i in range(n):
        H[i, i] = (vals[1 + 2 * i] - 2.0 * f0 + vals[2 + 2 * i]) / h[i] ** 2
    idx = 1 + 2 * n
    for i in range(n):
        for j in range(i + 1, n):
            fpp, fpm, fmp, fmm = vals[idx : idx + 4]
            idx += 4
            H[i, j] = H[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j])
    return H


def hessian_matrix(
    model: ModelU,
    m: float,
    ell: float,
    s: EulerGaugeState,
    policy: StepPolicy | None = None,
    tau_rank: float = DEFAULT_TAU_RANK,
) -> HessianReport:
    policy = policy or StepPolicy()
    ext = np.longdouble
    qdot = s.qdot.astype(ext)
    h = policy.steps(s.qdot).astype(ext)
    x0, _ = _xy_batch(ell, s.angles, qdot[None, :])
    if x0[0] ** 2 <= tolerances.q_min:
        raise DomainError(f"Q = {x0[0]**2:.3g} below q_min; sqrt(Q) is not smooth there")
    coarse = _stencil(qdot, h)
    fine = _stencil(qdot, h / 2)
    # roundoff of a second difference is ~eps|L|/h^2; extended precision keeps it
    # far below the rank thresholds
    vals = lagrangian_batch(model, m, ell, s.q, np.vstack((coarse, fine)), dtype=ext)
    Hc = _assemble(vals[: len(coarse)], h).astype(float)
    Hf = _assemble(vals[len(coarse) :], h / 2).astype(float)
    H = (4.0 * Hf - Hc) / 3.0
    H = 0.5 * (H + H.T)
    scale = np.abs(H).max()
    disagreement = float(np.abs(Hf - Hc).max() / scale) if scale > 0 else 0.0
    if disagreement > policy.max_disagreement:
        raise StepPolicyError(f"Richardson levels disagree by {disagreement:.3g} (relative)")
    _, sv, _ = jacobi_svd(H)
    return HessianReport(
        matrix=H,
        det=float(np.linalg.det(H)),
        singular_values=sv,
        rank=rank_from_singular_values(sv, tau_rank),
        threshold=tau_rank,
        disagreement=disagreement,
        state=s,
        model=model,
    )


def state_xy(s: EulerGaugeState, ell: float) -> tuple[float, float]:
    x, y = _xy_batch(ell, s.angles, s.qdot[None, :])
    return float(x[0]), float(y[0])


@dataclass
class ProbeResult:
    spread: float
    ratios: np.ndarray
    dets: np.ndarray
    factors: np.ndarray

    @property
    def kinematic_factor(self) -> float:
        return float(np.mean(self.ratios))


def proportionality_probe(models, m: float, ell: float, s: EulerGaugeState, policy: StepPolicy | None = None, factor_tol: float = 1e-10) -> ProbeResult:
    """Ratios ``det H / factor(u)`` across models at one kinematic state.

    A model-independent ratio is the kinematical factor of the state.
    """
    models = list(models)
    if len(models) < 3:
        raise ValueError("need at least three models")
    x, y = state_xy(s, ell)
    factors = np.array([float(closed_form_hessian_factor(mu, x, y)) for mu in models])
    if np.any(np.abs(factors) < factor_tol):
        raise DegenerateError("a model has a vanishing Hessian factor at this state")
    dets = np.array([hessian_matrix(mu, m, ell, s, policy).det for mu in models])
    ratios = dets / factors
    spread = max(abs(ri - rj) / abs(ri) for ri in ratios for rj in ratios)
    return ProbeResult(float(spread), ratios, dets, factors)


def jacobian_relation_deviation(model: ModelU, m: float, ell: float, s: EulerGaugeState, kinematic_factor: float, policy: StepPolicy | None = None) -> float:
    """Relative mismatch of ``det H`` against the Jacobian form of the same determinant."""
    x, y = state_xy(s, ell)
    predicted = kinematic_factor * jacobian_relation_prefactor(model, x, y) * jacobian_cmcj(model, x, y)
    det = hessian_matrix(model, m, ell, s, policy).det
    return abs(det - predicted) / abs(det)


def random_states(
    n: int,
    seed: int,
    model: ModelU | None = None,
    ell: float = 1.0,
    v_max: float = 0.5,
    rate_max: float = 1.0,
    theta_margin: float = 0.3,
    x_min: float = 0.05,
    x_max: float | None = None,
    y_max: float | None = None,
    max_tries: int = 100_000,
):
    """Seeded random Euler-gauge states valid for ``model``.

    Rejects states with ``sqrt(Q)`` outside ``[x_min, x_max]``, ``|P| > y_max``
    or ``(x, y)`` outside the model domain.
    """
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"only {len(out)} of {n} valid states after {max_tries} draws")
        pos = rng.normal(size=3)
        d = rng.normal(size=3)
        v = d / np.linalg.norm(d) * v_max * rng.uniform() ** (1 / 3)
        angles = np.array([rng.uniform(theta_margin, np.pi - theta_margin), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)])
        rates = rng.uniform(-rate_max, rate_max, size=3)
        s = EulerGaugeState(pos, v, angles, rates)
        try:
            x, y = state_xy(s, ell)
        except (ChartError, DomainError):
            continue
        if x < x_min or (x_max is not None and x > x_max) or (y_max is not None and abs(y) > y_max):
            continue
        if model is not None and not bool(np.all(model.in_domain(x, y))):
            continue
        out.append(s)
    return out
