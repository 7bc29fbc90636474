"""Symmetric tridiagonal eigenproblems by Sturm-count bisection.

The matrix is given by its diagonal ``d`` (length n) and off-diagonal ``e``
(length n-1). Eigenvalues are located by bisection on the Sturm count (the
number of negative pivots of the LDL^T factorisation of ``T - x``) and
eigenvectors by inverse iteration with a partially pivoted tridiagonal solve.
"""

import numpy as np
from numba import njit

_TINY = 1e-300


@njit(cache=True)
def sturm_count(d, e2, x):
    """Number of eigenvalues strictly below ``x``; ``e2`` holds ``e**2``."""
    n = d.shape[0]
    count = 0
    q = d[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = _TINY
        q = d[i] - x - e2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def _gershgorin(d, e):
    n = d.shape[0]
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        lo = min(lo, d[i] - r)
        hi = max(hi, d[i] + r)
    return lo, hi


@njit(cache=True)
def _bisect_indices(d, e, k_lo, k_hi):
    e2 = e * e
    lo0, hi0 = _gershgorin(d, e)
    span = max(abs(lo0), abs(hi0))
    # widen the start bracket absolutely, then bisect to relative precision
    tol = 4.0 * 2.2e-16 * span + _TINY
    out = np.empty(k_hi - k_lo)
    for j in range(k_hi - k_lo):
        k = k_lo + j
        lo = lo0 - tol
        hi = hi0 + tol
        # shrink using previously found eigenvalue
        if j > 0:
            lo = max(lo, out[j - 1] - tol)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= 4.4e-16 * abs(mid) + 1e-30 * span + _TINY:
                break
            if mid == lo or mid == hi:
                break
            if sturm_count(d, e2, mid) > k:
                hi = mid
            else:
                lo = mid
        out[j] = 0.5 * (lo + hi)
    return out


def eigvals_index(d, e, k_lo: int, k_hi: int) -> np.ndarray:
    """Eigenvalues with ascending indices ``k_lo <= k < k_hi``."""
    d = np.ascontiguousarray(d, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    n = d.shape[0]
    if e.shape[0] != n - 1:
        raise ValueError("off-diagonal must have length n - 1")
    if not 0 <= k_lo <= k_hi <= n:
        raise ValueError("index range outside the matrix size")
    return _bisect_indices(d, e, k_lo, k_hi)


def count_below(d, e, x: float) -> int:
    """Number of eigenvalues strictly less than ``x``."""
    d = np.ascontiguousarray(d, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    return int(sturm_count(d, e * e, float(x)))


@njit(cache=True)
def _solve_shifted(d, e, lam, b):
    """Solve (T - lam) x = b by Gaussian elimination with partial pivoting."""
    n = d.shape[0]
    dd = d - lam
    dl = e.copy()
    du = e.copy()
    du2 = np.zeros(max(n - 2, 0))
    x = b.copy()
    for i in range(n - 1):
        if abs(dd[i]) >= abs(dl[i]):
            if dd[i] == 0.0:
                dd[i] = _TINY
            m = dl[i] / dd[i]
            dd[i + 1] -= m * du[i]
            x[i + 1] -= m * x[i]
        else:
            # swap rows i and i+1 before eliminating
            m = dd[i] / dl[i]
            dd[i] = dl[i]
            tmp = dd[i + 1]
            dd[i + 1] = du[i] - m * tmp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -m * du2[i]
            du[i] = tmp
            xi = x[i]
            x[i] = x[i + 1]
            x[i + 1] = xi - m * x[i + 1]
    if dd[n - 1] == 0.0:
        dd[n - 1] = _TINY
    x[n - 1] /= dd[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i]
    return x


def inverse_iteration(d, e, lam: float, iters: int = 3, seed: int = 0) -> np.ndarray:
    """Unit eigenvector for the eigenvalue ``lam`` (sign: first large entry > 0)."""
    d = np.ascontiguousarray(d, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    n = d.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.uniform(0.5, 1.0, n)
    # nudge the shift off the exact eigenvalue to keep the solve finite
    scale = max(1.0, abs(lam))
    shift = lam + 1e-13 * scale
    for _ in range(iters):
        v = _solve_shifted(d, e, shift, v)
        v /= np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) > 1e-3 * np.abs(v).max()))
    if v[k] < 0:
        v = -v
    return v
