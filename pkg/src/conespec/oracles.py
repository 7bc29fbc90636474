"""Brute-force spectra used to validate catalog entries.

Neither routine knows the closed forms: the 2-sphere is discretised in the
polar angle for each azimuthal order and Richardson-extrapolated, the flat
torus is handled by a dense Fourier spectral Laplacian.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .tridiag import eigvals_index


def _sphere_order_matrix(m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrised polar-angle operator for azimuthal order m on n cell centres.

    Discretises -(sin t f')' / sin t + m^2 / sin^2 t f with zero flux at the
    poles (the sin t weight vanishes there).
    """
    h = math.pi / n
    t = (np.arange(n) + 0.5) * h
    edges = np.sin(np.arange(1, n) * h) / h
    mass = np.sin(t) * h
    diag = np.zeros(n)
    diag[:-1] += edges
    diag[1:] += edges
    diag += m * m / np.sin(t) * h
    s = 1.0 / np.sqrt(mass)
    return diag * s * s, -edges * s[:-1] * s[1:]


def sphere_order_eigenvalues(m: int, count: int, sizes=(400, 800, 1600, 3200)) -> np.ndarray:
    """First ``count`` eigenvalues for azimuthal order m, extrapolated in h^2."""
    vals = []
    for n in sizes:
        d, e = _sphere_order_matrix(m, n)
        vals.append(eigvals_index(d, e, 0, count))
    table = [np.asarray(v) for v in vals]
    hs = [1.0 / n ** 2 for n in sizes]
    # Neville extrapolation to h = 0
    for level in range(1, len(table)):
        table = [(hs[i] * table[i + 1] - hs[i + level] * table[i]) / (hs[i] - hs[i + level])
                 for i in range(len(table) - 1)]
    return table[0]


def cluster(values, tol: float) -> list[tuple[float, int]]:
    """Group sorted values closer than ``tol`` (relative) into (mean, count)."""
    out: list[list] = []
    for v in sorted(values):
        if out and abs(v - out[-1][0] / out[-1][1]) <= tol * max(1.0, abs(v)):
            out[-1][0] += v
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return [(float(s / c), c) for s, c in out]


def sphere2_function_spectrum(top: float, tol: float = 1e-6) -> list[tuple[float, int]]:
    """Nonzero Laplace eigenvalues of functions on the unit 2-sphere up to ``top``."""
    values = []
    m = 0
    while True:
        count = int(math.sqrt(top)) + 2
        ev = sphere_order_eigenvalues(m, count)
        kept = [x for x in ev if x <= top * (1.0 + tol)]
        if not kept:
            break
        # orders m > 0 come in pairs (cos and sin in the azimuth)
        values += kept * (1 if m == 0 else 2)
        m += 1
    return [(v, c) for v, c in cluster(values, tol) if v > tol]


def _fourier_second_derivative(n: int, side: float) -> np.ndarray:
    """Dense spectral -d^2/dx^2 on n equispaced periodic points (n odd)."""
    eye = np.eye(n)
    k = np.fft.fftfreq(n, d=side / (2.0 * math.pi * n))
    return np.real(np.fft.ifft((k ** 2)[:, None] * np.fft.fft(eye, axis=0), axis=0))


def torus_function_spectrum(dim: int, top: float, side: float = 2.0 * math.pi,
                            points: int = 9, tol: float = 1e-8) -> list[tuple[float, int]]:
    """Nonzero Laplace eigenvalues on the flat torus (R / side Z)^dim up to ``top``.

    Builds the Kronecker-sum Laplacian from dense 1D spectral matrices and
    diagonalises it. ``points`` (odd) must resolve every frequency below ``top``.
    """
    if points % 2 == 0:
        raise ValueError("points must be odd")
    kmax = (points - 1) // 2
    if (2.0 * math.pi / side) ** 2 * kmax ** 2 < top:
        raise ValueError("grid too coarse for the requested top")
    d2 = _fourier_second_derivative(points, side)
    eye = np.eye(points)
    lap = np.zeros((points ** dim, points ** dim))
    for axis in range(dim):
        factors = [d2 if j == axis else eye for j in range(dim)]
        term = factors[0]
        for f in factors[1:]:
            term = np.kron(term, f)
        lap += term
    ev = np.linalg.eigvalsh(0.5 * (lap + lap.T))
    kept = [x for x in ev if tol < x <= top * (1.0 + tol)]
    return cluster(kept, 1e-7)


def lattice_reference(dim: int, top: float) -> list[tuple[float, int]]:
    """Independent lattice count of |k|^2 <= top for k in Z^dim minus 0."""
    r = int(math.isqrt(int(top)))
    counts: dict[int, int] = {}
    for k in itertools.product(range(-r, r + 1), repeat=dim):
        s = sum(x * x for x in k)
        if 0 < s <= top:
            counts[s] = counts.get(s, 0) + 1
    return [(float(s), c) for s, c in sorted(counts.items())]
