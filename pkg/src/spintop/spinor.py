"""Spinors as null flags: the triad ``(k, a, b)`` and its symmetries.

Conventions
-----------
* ``sigma^0`` is the identity and ``sigma^1..3`` are the Pauli matrices, so
  ``k^mu = u^+ sigma^mu u``.
* The flag is completed from the complex 3-vector
  ``Z^j = u^T (i sigma^2) sigma^j u`` (which is null and orthogonal to the
  spatial part of ``k``): ``a = (0, Im Z)/|u|^2`` and ``b = (0, Re Z)/|u|^2``.
  This fixes the phase so that the Cartan-Whittaker combinations of
  ``F = k ^ a`` equal the spinor quadratics with no extra factor.
  With ``eps^{0123} = +1`` this satisfies both forms of the flag bivector,
  ``k^a^ == k^mu a^nu - k^nu a^mu == eps^{mu nu alpha beta} k_alpha b_beta``.
* Multiplying ``u`` by ``exp(i chi)`` rotates ``(a, b)`` by ``2 chi`` in the
  sense of :func:`phase_rotate`.
* Riemann sphere: the spatial direction ``(0, 0, 1)`` is the north pole.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import minkowski as mk
from .errors import DomainError

SIGMA = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_EPS2 = np.array([[0, 1], [-1, 0]], dtype=complex)  # i sigma^2


def as_spinor(u) -> np.ndarray:
    u = np.asarray(u, dtype=complex).reshape(-1)
    if u.shape != (2,):
        raise ValueError("a spinor has two complex components")
    if not np.any(u):
        raise DomainError("zero spinor has no flag")
    return u


@dataclass(frozen=True)
class NullTriad:
    """Null direction ``k`` with two orthonormal spacelike vectors ``a, b``."""

    k: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("k", "a", "b"):
            object.__setattr__(self, name, mk.vec(getattr(self, name)))

    def residuals(self) -> dict[str, float]:
        """Deviations of the six defining relations (zero for a valid triad)."""
        k, a, b = self.k, self.a, self.b
        return {
            "kk": mk.dot(k, k),
            "ak": mk.dot(a, k),
            "bk": mk.dot(b, k),
            "ab": mk.dot(a, b),
            "aa+1": mk.dot(a, a) + 1.0,
            "bb+1": mk.dot(b, b) + 1.0,
        }

    def max_residual(self) -> float:
        return max(abs(v) for v in self.residuals().values())

    def is_valid(self, tol: float = 1e-10) -> bool:
        return self.max_residual() <= tol and self.k[0] > 0

    def bivector(self) -> mk.Bivector:
        return mk.Bivector.wedge(self.k, self.a)


def k_from_spinor(u) -> np.ndarray:
    """Flagpole ``k^mu = u^+ sigma^mu u``; future-pointing and null."""
    u = as_spinor(u)
    return np.array([np.real(np.conj(u) @ s @ u) for s in SIGMA])


def flag_vector(u) -> np.ndarray:
    """Complex 3-vector ``Z^j = u^T (i sigma^2) sigma^j u``."""
    u = as_spinor(u)
    return np.array([u @ _EPS2 @ s @ u for s in SIGMA[1:]])


def flag_from_spinor(u) -> NullTriad:
    """Canonical triad (``a^0 = b^0 = 0``) of the null flag of ``u``."""
    u = as_spinor(u)
    norm2 = float(np.vdot(u, u).real)
    z = flag_vector(u) / norm2
    k = k_from_spinor(u)
    a = np.concatenate(([0.0], z.imag))
    b = np.concatenate(([0.0], z.real))
    return NullTriad(k, a, b)


def cartan_whittaker_relations(u, F: mk.Bivector | None = None, second_sign: int = 1):
    """Left and right sides of the complex Cartan-Whittaker relations.

    Left: ``(iF^01 - F^23, iF^02 - F^31, iF^03 - F^12)``.  Right:
    ``((u0)^2 - (u1)^2, i[(u0)^2 + s (u1)^2], -2 u0 u1)`` with ``s`` =
    ``second_sign``.  For the flag of ``u`` both sides agree when ``s = +1``.
    With ``s = -1`` the second component only agrees when ``u1 = 0``.
    """
    u = as_spinor(u)
    if F is None:
        F = flag_from_spinor(u).bivector()
    Fm = F.matrix()
    lhs = np.array(
        [
            1j * Fm[0, 1] - Fm[2, 3],
            1j * Fm[0, 2] - Fm[3, 1],
            1j * Fm[0, 3] - Fm[1, 2],
        ]
    )
    u0, u1 = u
    rhs = np.array([u0**2 - u1**2, 1j * (u0**2 + second_sign * u1**2), -2 * u0 * u1])
    return lhs, rhs


def null_bivector_check(F: mk.Bivector) -> tuple[float, float]:
    """Both Lorentz invariants of ``F``; a null bivector returns ``(0, 0)``."""
    return mk.bivector_invariants(F)


def gauge_transform(t: NullTriad, lam: float, mu: float, nu: float) -> NullTriad:
    """``k -> lam k, a -> a + mu k, b -> b + nu k`` (``lam > 0``)."""
    if not lam > 0:
        raise DomainError(f"gauge scale must be positive, got {lam!r}")
    return NullTriad(lam * t.k, t.a + mu * t.k, t.b + nu * t.k)


def phase_rotate(t: NullTriad, psi: float) -> NullTriad:
    """Rotate ``(a, b)`` through ``psi`` about ``k``."""
    c, s = np.cos(psi), np.sin(psi)
    return NullTriad(t.k, c * t.a + s * t.b, -s * t.a + c * t.b)


@dataclass
class SphereData:
    """Plot data for the two parabolic pencils of circles on the unit sphere."""

    k_image: np.ndarray
    rows: list = field(default_factory=list)  # (family, lambda, x, y, z)

    def family(self, tag: str, lam: float | None = None) -> np.ndarray:
        pts = [r[2:] for r in self.rows if r[0] == tag and (lam is None or r[1] == lam)]
        return np.array(pts)

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family", "lambda", "x", "y", "z"])
        w.writerow(["k", "", *(f"{c:.17g}" for c in self.k_image)])
        for tag, lam, x, y, z in self.rows:
            w.writerow([tag, f"{lam:.17g}", f"{x:.17g}", f"{y:.17g}", f"{z:.17g}"])
        return buf.getvalue() if fh is None else ""


def celestial_circle(s, n_points: int = 64) -> np.ndarray:
    """Null directions orthogonal to the spacelike vector ``s``.

    A null direction ``(1, n)`` is orthogonal to ``s`` iff ``n.s_vec = s^0``;
    on the unit sphere that is a circle cut by a plane.
    """
    s = mk.vec(s)
    sv = s[1:]
    norm = np.linalg.norm(sv)
    d = s[0] / norm
    if abs(d) > 1.0:
        raise DomainError("vector is timelike; its orthogonal null cone is empty")
    axis = sv / norm
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    r = np.sqrt(max(0.0, 1.0 - d * d))
    t = np.linspace(0.0, 2 * np.pi, n_points, endpoint=False)
    return d * axis + r * (np.outer(np.cos(t), e1) + np.outer(np.sin(t), e2))


def riemann_sphere_data(t: NullTriad, lambdas, n_points: int = 64) -> SphereData:
    """Image of ``k`` and circles of the directions ``a + lam k``, ``b + lam k``.

    Every circle passes through the image of ``k`` (``k`` is null and
    orthogonal to both families), giving two pencils tangent there.
    """
    kv = t.k[1:]
    data = SphereData(kv / np.linalg.norm(kv))
    for tag, base in (("a", t.a), ("b", t.b)):
        for lam in lambdas:
            for p in celestial_circle(base + lam * t.k, n_points):
                data.rows.append((tag, float(lam), *map(float, p)))
    return data
