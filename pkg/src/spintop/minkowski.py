"""Four-vector algebra in signature (+,-,-,-).

Four-vectors are plain length-4 sequences of contravariant components
(numpy arrays in practice; lists of :class:`~spintop.dual.Dual` also work
with :func:`dot`).  The Levi-Civita symbol uses ``eps^{0123} = +1`` with
indices raised and lowered by the metric, so ``eps_{0123} = -1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import tolerances
from .errors import DegenerateError

ETA = np.diag([1.0, -1.0, -1.0, -1.0])

# (mu, nu) index pairs of the six stored bivector components
BIVECTOR_INDEX = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))


def _levi_civita() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(
            1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j]
        )
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


EPS_UPPER = _levi_civita()
EPS_LOWER = -EPS_UPPER  # det(eta) = -1


def dot(u, v):
    """Minkowski product ``u0 v0 - u1 v1 - u2 v2 - u3 v3``."""
    return u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]


def lower(v) -> np.ndarray:
    return ETA @ np.asarray(v, dtype=float)


def vec(*components) -> np.ndarray:
    if len(components) == 1:
        components = components[0]
    out = np.asarray(components, dtype=float)
    if out.shape != (4,):
        raise ValueError(f"four-vector needs 4 components, got shape {out.shape}")
    return out


def classify(v, tol: float | None = None) -> str:
    """'timelike', 'null' or 'spacelike'."""
    tol = tolerances.abs_tol if tol is None else tol
    n = dot(v, v)
    if n > tol:
        return "timelike"
    if n < -tol:
        return "spacelike"
    return "null"


def project_orthogonal(v, p) -> np.ndarray:
    """Component of ``v`` orthogonal to the non-null vector ``p``."""
    p = np.asarray(p, dtype=float)
    pp = dot(p, p)
    if abs(pp) < tolerances.degenerate:
        raise DegenerateError(f"cannot project orthogonally to null vector (p.p={pp:g})")
    v = np.asarray(v, dtype=float)
    return v - p * (dot(p, v) / pp)


def gram_matrix(*vectors) -> np.ndarray:
    n = len(vectors)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = dot(vectors[i], vectors[j])
    return g


def gram_det4(a, b, k, w) -> float:
    """Determinant of the Gram matrix of four vectors.

    For a null triad ``(k, a, b)`` and any ``w`` this equals ``-(k.w)**2``.
    """
    return float(np.linalg.det(gram_matrix(a, b, k, w)))


@dataclass(frozen=True)
class Bivector:
    """Antisymmetric tensor ``F^{mu nu}`` stored as its six independent components.

    Component order follows :data:`BIVECTOR_INDEX`: 01, 02, 03, 23, 31, 12.
    """

    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.shape != (6,):
            raise ValueError("a bivector has exactly six components")
        object.__setattr__(self, "components", c)

    @classmethod
    def from_matrix(cls, F, atol: float = 1e-12) -> "Bivector":
        F = np.asarray(F, dtype=float)
        scale = max(1.0, float(np.abs(F).max(initial=0.0)))
        if np.abs(F + F.T).max() > atol * scale:
            raise ValueError("matrix is not antisymmetric")
        return cls(np.array([F[i, j] for i, j in BIVECTOR_INDEX]))

    @classmethod
    def wedge(cls, u, v) -> "Bivector":
        """``u^mu v^nu - u^nu v^mu``."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return cls(np.array([u[i] * v[j] - u[j] * v[i] for i, j in BIVECTOR_INDEX]))

    def matrix(self) -> np.ndarray:
        """Contravariant 4x4 matrix ``F^{mu nu}``."""
        F = np.zeros((4, 4))
        for c, (i, j) in zip(self.components, BIVECTOR_INDEX):
            F[i, j] = c
            F[j, i] = -c
        return F

    def lowered(self) -> np.ndarray:
        """Covariant matrix ``F_{mu nu}``."""
        return ETA @ self.matrix() @ ETA

    def __add__(self, other: "Bivector") -> "Bivector":
        return Bivector(self.components + other.components)

    def __sub__(self, other: "Bivector") -> "Bivector":
        return Bivector(self.components - other.components)

    def __neg__(self) -> "Bivector":
        return Bivector(-self.components)

    def __mul__(self, s: float) -> "Bivector":
        return Bivector(self.components * s)

    __rmul__ = __mul__


def bivector_dual(F: Bivector) -> Bivector:
    """Hodge dual ``(*F)^{mu nu} = 1/2 eps^{mu nu alpha beta} F_{alpha beta}``.

    In Lorentzian signature ``*(*F) = -F``.
    """
    D = 0.5 * np.einsum("mnab,ab->mn", EPS_UPPER, F.lowered())
    return Bivector.from_matrix(D)


def bivector_invariants(F: Bivector) -> tuple[float, float]:
    """``(F_{mu nu} F^{mu nu}, eps^{a b m n} F_{ab} F_{mn})``."""
    up = F.matrix()
    lo = F.lowered()
    first = float(np.sum(lo * up))
    second = float(np.einsum("abmn,ab,mn->", EPS_UPPER, lo, lo))
    return first, second
