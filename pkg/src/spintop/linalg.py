"""Small dense linear algebra: one-sided Jacobi SVD and rank decisions."""

from __future__ import annotations

import numpy as np


def jacobi_svd(A, tol: float = 1e-15, max_sweeps: int = 60):
    """Singular value decomposition by one-sided (Hestenes) Jacobi rotations.

    Columns of a working copy of ``A`` are rotated pairwise until mutually
    orthogonal; their norms are the singular values.  Returns ``(U, s, Vt)``
    with ``s`` descending and ``A = U @ diag(s) @ Vt``.  Accurate to working
    precision relative to each singular value for well-scaled inputs, which is
    what rank decisions on 6x6 Hessians need.
    """
    W = np.array(A, dtype=float, copy=True)
    m, n = W.shape
    V = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = W[:, i] @ W[:, i]
                beta = W[:, j] @ W[:, j]
                gamma = W[:, i] @ W[:, j]
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                with np.errstate(over="ignore"):
                    zeta = (beta - alpha) / (2.0 * gamma)
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                wi = W[:, i].copy()
                W[:, i] = c * wi - s * W[:, j]
                W[:, j] = s * wi + c * W[:, j]
                vi = V[:, i].copy()
                V[:, i] = c * vi - s * V[:, j]
                V[:, j] = s * vi + c * V[:, j]
        if not rotated:
            break
    sv = np.linalg.norm(W, axis=0)
    order = np.argsort(sv)[::-1]
    sv = sv[order]
    W = W[:, order]
    V = V[:, order]
    U = np.zeros((m, n))
    nz = sv > 0
    U[:, nz] = W[:, nz] / sv[nz]
    return U, sv, V.T


def rank_from_singular_values(sv, tau: float) -> int:
    """Number of singular values above ``tau * max(sv)``."""
    sv = np.asarray(sv, dtype=float)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tau * sv.max()))
