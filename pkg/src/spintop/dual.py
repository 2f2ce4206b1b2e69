"""Forward-mode automatic differentiation with (nestable) dual numbers.

A :class:`Dual` carries a real part and an infinitesimal part.  The
infinitesimal part may be a float (one direction), a numpy array (many
directions at once, "vector mode"), or another :class:`Dual` (nesting, used
for exact second derivatives).  Real parts may themselves be numpy arrays,
which lets a single pass differentiate a batch of points.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

__all__ = [
    "Dual",
    "sqrt",
    "sin",
    "cos",
    "real",
    "derivative",
    "gradient",
    "second_partials",
]


class Dual:
    """Dual number ``real + dual*eps`` with ``eps**2 == 0``."""

    __slots__ = ("real", "dual")
    # let numpy defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, real, dual=0.0):
        self.real = real
        self.dual = dual

    def __repr__(self) -> str:
        return f"Dual({self.real!r}, {self.dual!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.real + other.real, self.dual + other.dual)
        return Dual(self.real + other, self.dual)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.real - other.real, self.dual - other.dual)
        return Dual(self.real - other, self.dual)

    def __rsub__(self, other):
        return Dual(other - self.real, -self.dual)

    def __neg__(self):
        return Dual(-self.real, -self.dual)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(
                self.real * other.real,
                self.real * other.dual + self.dual * other.real,
            )
        return Dual(self.real * other, self.dual * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.real
            return Dual(
                self.real * inv,
                (self.dual * other.real - self.real * other.dual) * (inv * inv),
            )
        return Dual(self.real / other, self.dual / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.real
        return Dual(other * inv, -other * self.dual * (inv * inv))

    def __pow__(self, n):
        if isinstance(n, Dual):
            raise TypeError("Dual exponents are not supported")
        if n == 0:
            return Dual(self.real**0, self.dual * 0.0)
        if n == 1:
            return self
        if n == 2:
            return self * self
        if isinstance(n, int) and n > 0:
            out = self
            for _ in range(n - 1):
                out = out * self
            return out
        return Dual(self.real**n, n * self.real ** (n - 1) * self.dual)

    # comparisons look at the real part only (branch selection)
    def __lt__(self, other):
        return real(self) < real(other)

    def __le__(self, other):
        return real(self) <= real(other)

    def __gt__(self, other):
        return real(self) > real(other)

    def __ge__(self, other):
        return real(self) >= real(other)

    def __abs__(self):
        return -self if real(self) < 0 else self


def real(v):
    """Strip every level of infinitesimal parts."""
    while isinstance(v, Dual):
        v = v.real
    return v


def sqrt(v):
    if isinstance(v, Dual):
        r = sqrt(v.real)
        return Dual(r, v.dual / (2.0 * r))
    if isinstance(v, (np.ndarray, np.generic)):
        return np.sqrt(v)
    return math.sqrt(v)


def sin(v):
    if isinstance(v, Dual):
        return Dual(sin(v.real), cos(v.real) * v.dual)
    return np.sin(v) if isinstance(v, (np.ndarray, np.generic)) else math.sin(v)


def cos(v):
    if isinstance(v, Dual):
        return Dual(cos(v.real), -sin(v.real) * v.dual)
    return np.cos(v) if isinstance(v, (np.ndarray, np.generic)) else math.cos(v)


def where(cond, a, b):
    """Elementwise ``np.where`` through (possibly nested) dual numbers."""
    if isinstance(a, Dual) or isinstance(b, Dual):
        a = a if isinstance(a, Dual) else Dual(a, 0.0 * real(b))
        b = b if isinstance(b, Dual) else Dual(b, 0.0 * real(a))
        return Dual(where(cond, a.real, b.real), where(cond, a.dual, b.dual))
    return np.where(cond, a, b)


def derivative(f: Callable, x0: float) -> float:
    """Exact first derivative of a scalar function."""
    return f(Dual(x0, 1.0)).dual


def gradient(f: Callable, z) -> tuple[float, np.ndarray]:
    """Value and gradient of ``f`` at ``z`` in a single vector-mode pass.

    ``f`` receives a list of :class:`Dual` whose infinitesimal parts are the
    unit vectors of ``R^n``.
    """
    z = np.asarray(z, dtype=float)
    n = z.size
    eye = np.eye(n)
    out = f([Dual(z[i], eye[i]) for i in range(n)])
    if not isinstance(out, Dual):
        return float(out), np.zeros(n)
    return float(out.real), np.asarray(out.dual, dtype=float) + np.zeros(n)


def second_partials(f: Callable, x, y):
    """(f, f_x, f_y, f_xx, f_xy, f_yy) of a bivariate function via nested duals.

    ``x`` and ``y`` may be arrays; every output then has their shape.
    """

    def seed(a, b):
        # a: direction along inner eps, b: direction along outer eps
        return lambda v: Dual(Dual(v, a), Dual(b, 0.0))

    zero = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)[()]
    fx_x = _nested(f(seed(1.0, 1.0)(x), seed(0.0, 0.0)(y)), zero)
    fy_y = _nested(f(seed(0.0, 0.0)(x), seed(1.0, 1.0)(y)), zero)
    fx_y = _nested(f(seed(1.0, 0.0)(x), seed(0.0, 1.0)(y)), zero)
    val = fx_x.real.real
    return (
        val,
        fx_x.real.dual,
        fy_y.real.dual,
        fx_x.dual.dual,
        fx_y.dual.dual,
        fy_y.dual.dual,
    )


def _nested(out, zero):
    if not isinstance(out, Dual):
        out = Dual(out, 0.0)
    re, du = out.real, out.dual
    if not isinstance(re, Dual):
        re = Dual(re, 0.0)
    if not isinstance(du, Dual):
        du = Dual(du, 0.0)
    return Dual(
        Dual(re.real + zero, re.dual + zero), Dual(du.real + zero, du.dual + zero)
    )
