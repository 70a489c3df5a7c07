"""Symmetric eigenvalue and tridiagonal kernels implemented in-repo.

The discretized drift operators are symmetric tridiagonal, so their low
eigenvalues come from Sturm-sequence bisection; the cyclic Jacobi sweep is
kept for dense symmetric matrices and as an independent cross-check of the
bisection path.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericError


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """All eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.

    Sweeps rotate away every off-diagonal entry above a shrinking threshold
    until the off-diagonal Frobenius mass falls below tol times the matrix
    scale.  Quadratic convergence makes a few sweeps enough at these sizes.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise NumericError(f"matrix must be square, got shape {a.shape}")
    if n == 0:
        return np.array([])
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise NumericError("matrix is not symmetric")
    scale = max(np.abs(a).max(), 1.0)
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, (a**2).sum() - (np.diag(a) ** 2).sum()))
        if off <= tol * scale:
            return np.sort(np.diag(a))
        threshold = off / (n * n)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= threshold:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
    raise NumericError(
        f"Jacobi sweep did not converge in {max_sweeps} sweeps "
        f"(n={n}, residual off-diagonal mass {off:.3e})"
    )


def _sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the tridiagonal matrix strictly below x."""
    count = 0
    q = 1.0
    tiny = 1e-300
    for i in range(diag.size):
        if q == 0.0:
            q = tiny
        e2 = off[i - 1] ** 2 if i > 0 else 0.0
        q = diag[i] - x - e2 / q
        if q < 0.0:
            count += 1
    return count


def tridiagonal_eigenvalues(
    diag: np.ndarray,
    off: np.ndarray,
    k: int,
    tol: float = 1e-12,
    max_bisections: int = 200,
) -> np.ndarray:
    """The k smallest eigenvalues of a symmetric tridiagonal matrix.

    Bisection on Sturm-sequence counts; robust for clustered spectra and
    O(n) per count evaluation.
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = diag.size
    if off.size != n - 1:
        raise NumericError(f"off-diagonal has size {off.size}, expected {n - 1}")
    if not 1 <= k <= n:
        raise NumericError(f"requested {k} eigenvalues from an order-{n} matrix")
    # Gershgorin bounds
    radius = np.zeros(n)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo = float(np.min(diag - radius))
    hi = float(np.max(diag + radius))
    span = max(hi - lo, 1.0)
    out = np.empty(k)
    for j in range(k):
        a, b = lo, hi
        for _ in range(max_bisections):
            mid = 0.5 * (a + b)
            if _sturm_count(diag, off, mid) >= j + 1:
                b = mid
            else:
                a = mid
            if b - a <= tol * span:
                break
        else:
            raise NumericError(
                f"bisection for eigenvalue {j} stalled at interval width {b - a:.3e}"
            )
        out[j] = 0.5 * (a + b)
    return out


def thomas_solve(diag: np.ndarray, off: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the symmetric tridiagonal system (diag, off) x = rhs."""
    n = diag.size
    c = np.empty(max(n - 1, 1))
    d = np.empty(n)
    denom = diag[0]
    if denom == 0.0:
        raise NumericError("zero pivot in tridiagonal solve")
    if n > 1:
        c[0] = off[0] / denom
    d[0] = rhs[0] / denom
    for i in range(1, n):
        denom = diag[i] - off[i - 1] * c[i - 1]
        if denom == 0.0:
            raise NumericError(f"zero pivot in tridiagonal solve at row {i}")
        if i < n - 1:
            c[i] = off[i] / denom
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom
    x = np.empty(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x
