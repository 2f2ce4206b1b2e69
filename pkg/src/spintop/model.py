"""The Lagrangian family ``L = -m sqrt(xdot.xdot) u(x, y)`` with ``x = sqrt(Q)``, ``y = P``.

Each family returns its value and all partials up to second order as a
:class:`Jet`.  Closed-form families differentiate themselves with nested dual
numbers; the Legendre branch is defined through its transform ``omega(xi, eta)``
and evaluated at ``(x, y)`` by Newton inversion of ``(omega_xi, omega_eta)``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from . import dual
from .dual import Dual
from .errors import ConfigError, DegenerateError, DomainError


class Jet(NamedTuple):
    u: np.ndarray
    ux: np.ndarray
    uy: np.ndarray
    uxx: np.ndarray
    uxy: np.ndarray
    uyy: np.ndarray


class ModelU:
    """Base class: a smooth ``u(x, y)`` on a declared domain."""

    family = "abstract"

    def u(self, x, y):
        """Closed form, generic over floats, arrays and dual numbers."""
        raise NotImplementedError

    def in_domain(self, x, y):
        return np.asarray(x) >= 0

    def value(self, x, y):
        self._require(x, y)
        return self.u(x, y)

    def jet(self, x, y) -> Jet:
        self._require(x, y)
        return Jet(*dual.second_partials(self.u, x, y))

    def lift(self, X, Y):
        """Evaluate ``u`` on first-order duals through the jet (chain rule)."""
        xr, yr = dual.real(X), dual.real(Y)
        j = self.jet(xr, yr)
        dx = X.dual if isinstance(X, Dual) else 0.0
        dy = Y.dual if isinstance(Y, Dual) else 0.0
        if not isinstance(X, Dual) and not isinstance(Y, Dual):
            return j.u
        return Dual(j.u, j.ux * dx + j.uy * dy)

    def domain_box(self):
        """Sampling box ``((x_lo, x_hi), (y_lo, y_hi))`` inside the domain."""
        return (0.01, 2.0), (-1.0, 1.0)

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _require(self, x, y):
        ok = np.asarray(self.in_domain(dual.real(x), dual.real(y)))
        if not np.all(ok):
            raise DomainError(f"({np.asarray(dual.real(x))!r}, {np.asarray(dual.real(y))!r}) outside the domain of the {self.family} model")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_dict()['params']})"


class GenericModel(ModelU):
    """Bivariate polynomial ``sum c_ij x^i y^j``."""

    family = "generic"

    def __init__(self, terms):
        if isinstance(terms, dict):
            terms = [(i, j, c) for (i, j), c in terms.items()]
        self.terms = tuple((int(i), int(j), float(c)) for i, j, c in terms)
        if any(i < 0 or j < 0 for i, j, _ in self.terms):
            raise ConfigError("polynomial exponents must be non-negative")

    def u(self, x, y):
        out = 0.0
        for i, j, c in self.terms:
            out = out + c * (x**i) * (y**j)
        return out

    def to_dict(self):
        return {"family": self.family, "params": {"terms": [list(t) for t in self.terms]}}


def quadratic_model(a: float = 1.0, b: float = 1.0, c: float = 1.0) -> GenericModel:
    """``c + a x^2/2 + b y^2/2``; the default is the reference regular model."""
    return GenericModel([(0, 0, c), (2, 0, a / 2), (0, 2, b / 2)])


class DevelopableModel(ModelU):
    """``u = sign sqrt(1 - x^2 sin^2(kappa)/4 + x cos(kappa)) + y sin(kappa)/2``.

    Solves both fundamental conditions with ``u_xy = u_yy = 0``.
    """

    family = "developable"

    def __init__(self, kappa: float = 1.0, sign: int = 1):
        if sign not in (1, -1):
            raise ConfigError("sign must be +1 or -1")
        self.kappa = float(kappa)
        self.sign = sign
        self._s = math.sin(self.kappa)
        self._c = math.cos(self.kappa)

    def radicand(self, x):
        return 1.0 - x * x * (self._s**2 / 4.0) + x * self._c

    def u(self, x, y):
        return self.sign * dual.sqrt(self.radicand(x)) + y * (self._s / 2.0)

    def in_domain(self, x, y):
        x = np.asarray(x)
        return (x >= 0) & (self.radicand(x) > 0)

    def x_max(self) -> float:
        s2 = self._s**2
        if s2 < 1e-15:
            return math.inf if self._c > 0 else 1.0
        return 2.0 * (self._c + 1.0) / s2

    def domain_box(self):
        return (0.01, min(3.0, 0.9 * self.x_max())), (-2.0, 2.0)

    def to_dict(self):
        return {"family": self.family, "params": {"kappa": self.kappa, "sign": self.sign}}


class RotatorModel(DevelopableModel):
    """``u = sign sqrt(1 + x)``: the ``sin(kappa) = 0`` member, no phase dependence."""

    family = "rotator"

    def __init__(self, sign: int = 1):
        super().__init__(0.0, sign)

    def u(self, x, y):
        return self.sign * dual.sqrt(1.0 + x) + 0.0 * y

    def to_dict(self):
        return {"family": self.family, "params": {"sign": self.sign}}


def legendre_omega_fn(xi, eta, epsilon: int = 1, sign: int = 1):
    """``omega = sign [sqrt(xi^2+eta^2) + eps xi sqrt(1-4 eta^2)] / (2 eta^2)``."""
    r = dual.sqrt(xi * xi + eta * eta)
    w = dual.sqrt(1.0 - 4.0 * eta * eta)
    direct = (r + epsilon * xi * w) / (2.0 * eta * eta)
    if not isinstance(dual.real(xi), np.ndarray) and epsilon * dual.real(xi) > 0:
        return sign * direct
    # rationalised numerator: r^2 - xi^2 w^2 = eta^2 (1 + 4 xi^2), free of the
    # cancellation that the direct form suffers when eps xi < 0 and eta is small
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (1.0 + 4.0 * xi * xi) / (2.0 * (r - epsilon * xi * w))
    if not isinstance(dual.real(xi), np.ndarray):
        return sign * ratio
    return sign * dual.where(epsilon * dual.real(xi) > 0, direct, ratio)


def _check_legendre(xi, eta):
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(eta == 0) or np.any(1.0 - 4.0 * eta * eta < 0):
        raise DomainError("Legendre branch needs 0 < |eta| <= 1/2")


def legendre_omega(xi, eta, epsilon: int = 1, sign: int = 1):
    """``(omega, omega_xi, omega_eta)`` of the Legendre-branch solution."""
    _check_legendre(xi, eta)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    r = np.hypot(xi, eta)
    w = np.sqrt(1.0 - 4.0 * eta * eta)
    e2 = eta * eta
    om = sign * (r + epsilon * xi * w) / (2.0 * e2)
    om_xi = sign * (xi / r + epsilon * w) / (2.0 * e2)
    with np.errstate(divide="ignore", invalid="ignore"):
        om_eta = sign * (eta / r - 4.0 * epsilon * xi * eta / w) / (2.0 * e2) - 2.0 * om / eta
    return om[()], om_xi[()], om_eta[()]


def legendre_residuals(xi, eta, epsilon: int = 1, sign: int = 1):
    """Residuals of the two transformed fundamental conditions.

    ``omega^2 - (xi^2+eta^2) omega_xi^2 - 1`` and
    ``4 (xi^2+eta^2)(omega - xi omega_xi)^2 - 1``.
    """
    om, om_xi, _ = legendre_omega(xi, eta, epsilon, sign)
    r2 = np.asarray(xi) ** 2 + np.asarray(eta) ** 2
    return om**2 - r2 * om_xi**2 - 1.0, 4.0 * r2 * (om - xi * om_xi) ** 2 - 1.0


class LegendreModel(ModelU):
    """Non-developable solution of the fundamental conditions, given by its transform.

    ``u(x, y) = x xi + y eta - omega(xi, eta)`` with ``x = omega_xi`` and
    ``y = omega_eta``; ``u_x = xi``, ``u_y = eta`` and the second partials are
    the inverse Hessian of ``omega``.
    """

    family = "legendre"
    ETA_MAX = 0.499
    N_CANDIDATES = 8

    def __init__(self, epsilon: int = 1, sign: int = -1):
        if epsilon not in (1, -1) or sign not in (1, -1):
            raise ConfigError("epsilon and sign must be +1 or -1")
        self.epsilon = epsilon
        self.sign = sign
        self._tree = None

    def omega(self, xi, eta):
        return legendre_omega_fn(xi, eta, self.epsilon, self.sign)

    def omega_jet(self, xi, eta) -> Jet:
        return Jet(*dual.second_partials(self.omega, xi, eta))

    def _table(self):
        if self._tree is None:
            xi = np.linspace(-6.0, 6.0, 481)
            mag = np.unique(np.concatenate((np.geomspace(0.02, self.ETA_MAX, 60), np.linspace(0.3, self.ETA_MAX, 60))))
            eta = np.concatenate((-mag[::-1], mag))
            XI, ETA = np.meshgrid(xi, eta)
            XI, ETA = XI.ravel(), ETA.ravel()
            _, ox, oy = legendre_omega(XI, ETA, self.epsilon, self.sign)
            keep = np.isfinite(ox) & np.isfinite(oy) & (ox > 0)
            self._grid = np.column_stack((XI[keep], ETA[keep]))
            # y grows without bound as |eta| -> 1/2; compress it for the search
            self._tree = cKDTree(np.column_stack((ox[keep], np.arcsinh(oy[keep]))))
        return self._tree

    def _guess(self, x, y, rank: int = 0):
        """Grid preimage of the ``rank``-th nearest tabulated image point."""
        pts = np.column_stack((np.ravel(x), np.arcsinh(np.ravel(y)))).astype(float)
        _, idx = self._table().query(pts, k=rank + 1)
        idx = idx.reshape(len(np.ravel(x)), -1)[:, rank]
        return self._grid[idx, 0].reshape(np.shape(x)), self._grid[idx, 1].reshape(np.shape(x))

    def invert(self, x, y, guess=None, tol: float | None = None, max_iter: int = 60):
        """Solve ``(omega_xi, omega_eta) = (x, y)`` for ``(xi, eta)``.

        Returns ``(xi, eta, converged)``.  Without a guess, the first point is
        seeded from a tabulated grid and its root seeds the rest, so a batch of
        nearby points lands on one sheet of the inverse.  Works in the
        floating dtype of the inputs (``np.longdouble`` included).
        """
        dtype = np.result_type(np.asarray(x), np.asarray(y), np.float64)
        x = np.atleast_1d(np.asarray(x, dtype=dtype))
        y = np.atleast_1d(np.asarray(y, dtype=dtype))
        shape = np.broadcast(x, y).shape
        x = np.broadcast_to(x, shape).copy()
        y = np.broadcast_to(y, shape).copy()
        if tol is None:
            # u is stationary in (xi, eta) at the root, so its error is quadratic in
            # the residual; a final polishing step sits on the roundoff floor anyway
            tol = 1e-13
        if guess is None:
            for rank in range(self.N_CANDIDATES):
                gx, ge = self._guess(x.flat[:1], y.flat[:1], rank)
                xi0, eta0, ok0 = self._newton(x.flat[:1], y.flat[:1], gx.astype(dtype), ge.astype(dtype), tol, max_iter)
                if ok0[0]:
                    break
            guess = (xi0[0], eta0[0])
        xi = np.broadcast_to(np.asarray(guess[0], dtype=dtype), shape).copy()
        eta = np.broadcast_to(np.asarray(guess[1], dtype=dtype), shape).copy()
        xi, eta, ok = self._newton(x, y, xi, eta, tol, max_iter)
        # the map is not injective: a near image point can lie on a far sheet
        for rank in range(self.N_CANDIDATES):
            if np.all(ok):
                break
            bad = ~ok
            gx, ge = self._guess(x[bad], y[bad], rank)
            xi_b, eta_b, ok_b = self._newton(x[bad], y[bad], gx.astype(dtype), ge.astype(dtype), tol, max_iter)
            xi[bad], eta[bad], ok[bad] = xi_b, eta_b, ok_b
        return xi, eta, ok

    def _newton(self, x, y, xi, eta, tol, max_iter):
        xi = np.array(xi)
        eta = np.array(eta)
        scale = 1.0 + np.abs(x) + np.abs(y)
        ok = np.zeros(x.shape, dtype=bool)
        polished = False
        for _ in range(max_iter):
            j = self.omega_jet(xi, eta)
            fx, fy = j.ux - x, j.uy - y
            res = np.hypot(fx, fy)
            ok = res <= tol * scale
            if polished:
                break
            polished = bool(np.all(ok))
            det = j.uxx * j.uyy - j.uxy**2
            with np.errstate(divide="ignore", invalid="ignore"):
                dxi = -(j.uyy * fx - j.uxy * fy) / det
                deta = -(-j.uxy * fx + j.uxx * fy) / det
            dxi = np.where(~np.isfinite(dxi), 0.0, dxi)
            deta = np.where(~np.isfinite(deta), 0.0, deta)
            # damp steps that would leave 0 < |eta| < ETA_MAX or flip the sign of eta
            t = np.ones_like(xi)
            for _ in range(30):
                new_eta = eta + t * deta
                bad = (np.abs(new_eta) >= self.ETA_MAX + 1e-3) | (new_eta * eta <= 0)
                if not np.any(bad):
                    break
                t = np.where(bad, t / 2, t)
            xi = xi + t * dxi
            eta = eta + t * deta
        else:
            j = self.omega_jet(xi, eta)
            ok = np.hypot(j.ux - x, j.uy - y) <= tol * scale
        return xi, eta, ok & np.isfinite(xi) & np.isfinite(eta)

    def in_domain(self, x, y):
        x = np.asarray(x)
        if not np.all(x > 0):
            return x > 0
        _, _, ok = self.invert(x, y)
        return ok.reshape(np.broadcast(x, np.asarray(y)).shape)

    def jet(self, x, y, guess=None) -> Jet:
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        xr = np.broadcast_to(np.asarray(x), shape)
        yr = np.broadcast_to(np.asarray(y), shape)
        if np.any(xr <= 0):
            raise DomainError("x must be positive")
        xi, eta, ok = self.invert(xr, yr, guess)
        xi, eta, ok = xi.reshape(shape), eta.reshape(shape), ok.reshape(shape)
        if not np.all(ok):
            raise DomainError("point outside the image of the Legendre branch")
        oj = self.omega_jet(xi, eta)
        det = oj.uxx * oj.uyy - oj.uxy**2
        if np.any(np.abs(det) < 1e-14 * np.abs(oj.uxx * oj.uyy).max()):
            raise DegenerateError("omega Hessian singular: transform not invertible here")
        u = xr * xi + yr * eta - oj.u
        return Jet(u[()], xi[()], eta[()], (oj.uyy / det)[()], (-oj.uxy / det)[()], (oj.uxx / det)[()])

    def u(self, x, y):
        if isinstance(x, Dual) or isinstance(y, Dual):
            return self.lift(x, y)
        return self.jet(x, y).u

    def value(self, x, y):
        return self.jet(x, y).u

    def domain_box(self):
        """Box in ``(xi, |eta|)`` used for residual sampling."""
        return (-1.0, 1.0), (0.25, self.ETA_MAX)

    def to_dict(self):
        return {"family": self.family, "params": {"epsilon": self.epsilon, "sign": self.sign}}


FAMILIES = {
    "generic": GenericModel,
    "developable": DevelopableModel,
    "rotator": RotatorModel,
    "legendre": LegendreModel,
}


def model_from_dict(spec: dict) -> ModelU:
    """Build a model from ``{"family": ..., "params": {...}}``."""
    try:
        family = spec["family"]
        params = dict(spec.get("params", {}))
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"bad model spec {spec!r}") from exc
    if family not in FAMILIES:
        raise ConfigError(f"unknown model family {family!r}")
    try:
        return FAMILIES[family](**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {family}: {exc}") from exc


# --- closed forms on (x, y) --------------------------------------------------


def _jet(model: ModelU, x, y) -> Jet:
    if np.any(np.asarray(x) <= 0):
        raise DomainError("x = sqrt(Q) must be positive")
    return model.jet(x, y)


def _cm(u, ux, uy, x, y):
    return (u - y * uy - x * ux) ** 2 - x * x * (ux * ux + uy * uy)


def _cj(u, ux, uy, x, y):
    return 4.0 * (u - y * uy) ** 2 * (ux * ux + uy * uy)


def casimir_mass(model: ModelU, x, y):
    """``C_M = p.p/m^2 = (u - y u_y - x u_x)^2 - x^2 (u_x^2 + u_y^2)``."""
    j = _jet(model, x, y)
    return _cm(j.u, j.ux, j.uy, x, y)


def casimir_spin(model: ModelU, x, y):
    """``C_J = W.W / (-m^4 l^2/4) = 4 (u - y u_y)^2 (u_x^2 + u_y^2)``."""
    j = _jet(model, x, y)
    return _cj(j.u, j.ux, j.uy, x, y)


def e_c(model: ModelU, x, y):
    j = _jet(model, x, y)
    return (j.u - y * j.uy) * (y * j.ux - x * j.uy) / x + j.uy * (x * j.ux + y * j.uy)


def jacobian_cmcj(model: ModelU, x, y) -> float:
    """``det d(C_M, C_J)/d(x, y)`` by forward-mode differentiation of the closed forms."""
    x = float(x)
    y = float(y)
    j = _jet(model, x, y)
    X = Dual(x, np.array([1.0, 0.0]))
    Y = Dual(y, np.array([0.0, 1.0]))
    U = Dual(float(j.u), np.array([j.ux, j.uy], dtype=float))
    UX = Dual(float(j.ux), np.array([j.uxx, j.uxy], dtype=float))
    UY = Dual(float(j.uy), np.array([j.uxy, j.uyy], dtype=float))
    gm = _cm(U, UX, UY, X, Y).dual
    gj = _cj(U, UX, UY, X, Y).dual
    return float(gm[0] * gj[1] - gm[1] * gj[0])


def closed_form_hessian_factor(model: ModelU, x, y):
    """Model-dependent factor of the reduced-Lagrangian Hessian determinant."""
    if np.any(np.asarray(x) < 1e-12):
        raise DegenerateError("x too small for the Hessian factor")
    j = _jet(model, x, y)
    A = j.u - y * j.uy
    return A * (x * j.uy**2 + A * j.ux) / x * (
        (j.ux**2 + j.uy**2) * j.uyy + A * (j.uxx * j.uyy - j.uxy**2)
    )


def jacobian_relation_prefactor(model: ModelU, x, y):
    """``[(u - y u_y) u_x + x u_y^2] / (16 x^2 E_C)`` linking det H to the Jacobian."""
    j = _jet(model, x, y)
    return ((j.u - y * j.uy) * j.ux + x * j.uy**2) / (16.0 * x * x * e_c(model, x, y))


# --- sampling -----------------------------------------------------------------


def sample_points(model: ModelU, n_samples: int, seed: int) -> np.ndarray:
    """Scrambled Halton points in the model's sampling box, shape ``(n, 2)``.

    For the Legendre branch the points are ``(xi, eta)`` with ``eta`` of
    either sign.
    """
    (x0, x1), (y0, y1) = model.domain_box()
    pts = qmc.Halton(d=3, scramble=True, seed=seed).random(n_samples)
    out = np.column_stack((x0 + (x1 - x0) * pts[:, 0], y0 + (y1 - y0) * pts[:, 1]))
    if isinstance(model, LegendreModel):
        out[:, 1] *= np.where(pts[:, 2] < 0.5, -1.0, 1.0)
    return out


def fundamental_residuals(model: ModelU, n_samples: int = 1000, seed: int = 0) -> tuple[float, float]:
    """Largest deviations of the two fundamental conditions over sampled points."""
    pts = sample_points(model, n_samples, seed)
    if isinstance(model, LegendreModel):
        r1, r2 = legendre_residuals(pts[:, 0], pts[:, 1], model.epsilon, model.sign)
    else:
        ok = np.asarray(model.in_domain(pts[:, 0], pts[:, 1]))
        pts = pts[ok]
        r1 = casimir_mass(model, pts[:, 0], pts[:, 1]) - 1.0
        r2 = casimir_spin(model, pts[:, 0], pts[:, 1]) - 1.0
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))
