"""Eigenvalues of -u'' + c/r^2 u = lambda u on an interval.

Two independent routes:

* ``shoot_eigenvalues`` builds the solution satisfying the left condition
  from Bessel functions, brackets every eigenvalue with the oscillation
  (Pruefer angle) count and refines with a sign-changing boundary mismatch.
* ``fd_eigenvalues`` discretises the problem on a grid uniform in log r and
  extrapolates in the mesh width.

Writing c = gamma (gamma + 1) and mu = |gamma + 1/2|, the Frobenius
solutions at r = 0 are F ~ r^(1/2 + mu) and H ~ r^(1/2 - mu), with a log
term in H when mu is an integer.
Boundary functionals at a small left radius are evaluated termwise on their
power series so that a Robin condition which annihilates a leading power does
not cancel catastrophically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from numba import njit
from scipy.optimize import brentq

from .bessel import ik_scaled, jy
from .channel_model import CapCondition
from .tridiag import eigvals_index

EULER_GAMMA = 0.5772156649015329
INTEGER_ORDER_TOL = 1e-8
DEFAULT_GRIDS = (500, 1000, 2000, 4000)

BranchKind = Literal["minimal", "r_minus_gamma"]

# left/right condition codes shared with the kernels
_DIRICHLET = 0
_ROBIN = 1
_MINIMAL = 2
_R_MINUS_GAMMA = 3


class BracketError(RuntimeError):
    """No eigenvalue bracket found inside the scanned range."""

    def __init__(self, msg: str, scanned: tuple[float, float]):
        super().__init__(f"{msg} (scanned lambda in [{scanned[0]:.6g}, {scanned[1]:.6g}])")
        self.scanned = scanned


class ExtrapolationWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class BranchSelection:
    exponent_choice: BranchKind = "minimal"

    def __post_init__(self):
        if self.exponent_choice not in ("minimal", "r_minus_gamma"):
            raise ValueError(f"unknown branch {self.exponent_choice!r}")


@dataclass(frozen=True)
class RadialProblem:
    """One radial eigenproblem.

    ``gamma`` pins which root of gamma (gamma + 1) = potential_coeff is meant.
    It matters for the r^(-gamma) branch and keeps Robin conditions of the
    form kappa = -gamma exact. When omitted, gamma >= -1/2 is assumed.
    """

    potential_coeff: float
    interval: tuple[float, float]
    left_condition: CapCondition | BranchSelection
    right_condition: CapCondition
    count: int = 5
    gamma: float | None = None

    def __post_init__(self):
        a, b = (float(x) for x in self.interval)
        object.__setattr__(self, "interval", (a, b))
        c = float(self.potential_coeff)
        if not c >= -0.25 - 1e-12:
            raise ValueError("potential_coeff must be >= -1/4")
        if not (a >= 0.0 and b > a and math.isfinite(b)):
            raise ValueError(f"bad interval {self.interval}")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError("count must be a positive integer")
        if self.gamma is not None:
            g = float(self.gamma)
            if abs(g * (g + 1.0) - c) > 1e-10 * max(1.0, abs(c)):
                raise ValueError("gamma does not match potential_coeff")
        if a == 0.0:
            if not isinstance(self.left_condition, BranchSelection):
                raise ValueError("a = 0 needs a BranchSelection on the left")
            if self.left_condition.exponent_choice == "r_minus_gamma":
                if not abs(self.resolved_gamma) < 0.5:
                    raise ValueError("r_minus_gamma branch needs |gamma| < 1/2")
        elif not isinstance(self.left_condition, CapCondition):
            raise ValueError("a > 0 needs a CapCondition on the left")
        if not isinstance(self.right_condition, CapCondition):
            raise ValueError("right condition must be a CapCondition")

    @classmethod
    def for_channel(cls, gamma: float, interval, left, right, count: int = 5) -> "RadialProblem":
        gamma = float(gamma)
        return cls(gamma * (gamma + 1.0), interval, left, right, count, gamma)

    @property
    def resolved_gamma(self) -> float:
        if self.gamma is not None:
            return float(self.gamma)
        return math.sqrt(max(self.potential_coeff + 0.25, 0.0)) - 0.5

    def scaled(self, s: float) -> "RadialProblem":
        """Same problem on s * interval (Robin kappa is scale free)."""
        a, b = self.interval
        return RadialProblem(self.potential_coeff, (s * a, s * b), self.left_condition,
                             self.right_condition, self.count, self.gamma)


def _order_data(p: RadialProblem):
    """(eF, eH, mu, nint): exponents of F and H, Bessel order, integer order or -1."""
    g = p.resolved_gamma
    if g >= -0.5:
        e_f, e_h = g + 1.0, -g
    else:
        e_f, e_h = -g, g + 1.0
    mu = abs(g + 0.5)
    n = round(mu)
    nint = int(n) if abs(mu - n) < INTEGER_ORDER_TOL else -1
    if nint >= 0:
        mu = float(nint)
    return e_f, e_h, mu, nint


def _encode(p: RadialProblem):
    a, b = p.interval
    left = p.left_condition
    if isinstance(left, BranchSelection):
        lk = _MINIMAL if left.exponent_choice == "minimal" else _R_MINUS_GAMMA
        lkap = 0.0
    elif left.kind == "dirichlet":
        lk, lkap = _DIRICHLET, 0.0
    else:
        lk, lkap = _ROBIN, left.robin_kappa
    right = p.right_condition
    if right.kind == "dirichlet":
        rk, rkap = _DIRICHLET, 0.0
    else:
        rk, rkap = _ROBIN, right.robin_kappa
    e_f, e_h, mu, nint = _order_data(p)
    return (e_f, e_h, mu, nint, a, b, lk, lkap, rk, rkap)


# ---------------------------------------------------------------- kernels

@njit(cache=True)
def _pseries(e, s, z, r, kind, kap):
    """r^e sum T_j r^(2j)-type series with T_j = T_{j-1} z / (j (j + s)).

    Returns value, derivative and boundary functional (value for Dirichlet,
    u' - kap/r u for Robin) with the exponent factors applied termwise.
    """
    t = 1.0
    s0 = 1.0
    s1 = e
    s2 = e - kap
    t1 = 0.0
    for j in range(1, 400):
        t = t * z / (j * (j + s))
        if j == 1:
            t1 = t
        s0 += t
        s1 += (e + 2.0 * j) * t
        s2 += ((e - kap) + 2.0 * j) * t
        if t == 0.0 or (j >= 2 and abs(t) <= 1e-17 * abs(t1)):
            break
    re = r ** e
    val = re * s0
    der = re / r * s1
    bc = val if kind == 0 else re / r * s2
    return val, der, bc


@njit(cache=True)
def _series_fh(e_f, e_h, mu, nint, lam, r, kind, kap):
    """Frobenius solutions F and H at r: (F, F', B F, H, H', B H)."""
    z = -lam * r * r / 4.0
    fv, fd, fb = _pseries(e_f, mu, z, r, kind, kap)
    if nint < 0:
        hv, hd, hb = _pseries(e_h, -mu, z, r, kind, kap)
        return fv, fd, fb, hv, hd, hb
    lr = math.log(r)
    if nint == 0:
        # H = log(r) F - r^(1/2) sum_j H_j z^j / (j!)^2
        v = 1.0
        harm = 0.0
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        v1 = 0.0
        for j in range(1, 400):
            v = v * z / (j * j)
            harm += 1.0 / j
            if j == 1:
                v1 = v
            term = -harm * v
            s0 += term
            s1 += (e_h + 2.0 * j) * term
            s2 += ((e_h - kap) + 2.0 * j) * term
            if v == 0.0 or (j >= 2 and abs(v) <= 1e-17 * abs(v1)):
                break
        re = r ** e_h
        hv = lr * fv + re * s0
        hd = fv / r + lr * fd + re / r * s1
        hb = hv if kind == 0 else fv / r + lr * fb + re / r * s2
        return fv, fd, fb, hv, hd, hb
    n = nint
    # finite part r^eH sum_{j<n} c_j (lam r^2/4)^j
    t = 1.0
    s0 = 1.0
    s1 = e_h
    s2 = e_h - kap
    for j in range(1, n):
        t = t * (-z) / (j * (n - j))
        s0 += t
        s1 += (e_h + 2.0 * j) * t
        s2 += ((e_h - kap) + 2.0 * j) * t
    re = r ** e_h
    hv = re * s0
    hd = re / r * s1
    hb = re / r * s2
    # log part L log(r) F and analytic part P
    fact_n = math.gamma(n + 1.0)
    fact_n1 = math.gamma(float(n))
    ql = (lam / 4.0) ** n
    big_l = -2.0 * ql / (fact_n * fact_n1)
    hv += big_l * lr * fv
    hd += big_l * (fv / r + lr * fd)
    hb += big_l * (fv / r + lr * fb)
    u = 1.0 / fact_n
    h_k = 0.0
    h_nk = 0.0
    for m in range(1, n + 1):
        h_nk += 1.0 / m
    p0 = 0.0
    p1 = 0.0
    p2 = 0.0
    q1 = 0.0
    for k in range(0, 400):
        if k > 0:
            u = u * z / (k * (n + k))
            h_k += 1.0 / k
            h_nk += 1.0 / (n + k)
        q = u * (h_k + h_nk - 2.0 * EULER_GAMMA)
        if k == 1:
            q1 = abs(u)
        p0 += q
        p1 += (e_f + 2.0 * k) * q
        p2 += ((e_f - kap) + 2.0 * k) * q
        if u == 0.0 or (k >= 2 and abs(u) <= 1e-17 * q1):
            break
    pref = ql / fact_n1
    rf = r ** e_f
    hv += pref * rf * p0
    hd += pref * rf / r * p1
    hb += pref * rf / r * p2
    if kind == 0:
        hb = hv
    return fv, fd, fb, hv, hd, hb


@njit(cache=True)
def _bessel_vals(mu, lam, r):
    """sqrt(r) J, sqrt(r) Y (lam > 0) or scaled sqrt(r) I, sqrt(r) K (lam < 0).

    Returns (F, F', G, G'); for lam < 0 the F pair carries e^(-k r) and the
    G pair e^(k r).
    """
    k = math.sqrt(abs(lam))
    x = k * r
    sr = math.sqrt(r)
    if lam > 0.0:
        j, y, jp, yp, _ = jy(mu, x)
    else:
        j, y, jp, yp = ik_scaled(mu, x)
    f = sr * j
    fp = j / (2.0 * sr) + sr * k * jp
    g = sr * y
    gp = y / (2.0 * sr) + sr * k * yp
    return f, fp, g, gp


@njit(cache=True)
def _bc(v, d, r, kind, kap):
    return v if kind == 0 else d - kap / r * v


@njit(cache=True)
def _left_functionals(e_f, e_h, mu, nint, lam, a, kind, kap):
    """Left boundary functional on the Bessel basis (scaled like the basis at a)."""
    k = math.sqrt(abs(lam))
    if lam * a * a >= 1.0 or lam * a * a <= -1.0:
        f, fp, g, gp = _bessel_vals(mu, lam, a)
        return _bc(f, fp, a, kind, kap), _bc(g, gp, a, kind, kap)
    _, _, bf, _, _, bh = _series_fh(e_f, e_h, mu, nint, lam, a, kind, kap)
    lk2 = math.log(k / 2.0)
    # sqrt(r) J_mu = F (k/2)^mu / Gamma(mu + 1), same for I
    cf = math.exp(mu * lk2 - math.lgamma(mu + 1.0))
    b_first = cf * bf
    if lam > 0.0:
        if nint < 0:
            b_second = (math.cos(mu * math.pi) / math.sin(mu * math.pi)) * b_first \
                - math.exp(math.lgamma(mu) - mu * lk2) / math.pi * bh
        elif nint == 0:
            b_second = 2.0 / math.pi * (bh + (lk2 + EULER_GAMMA) * bf)
        else:
            n = nint
            ql = (lam / 4.0) ** n
            corr = 2.0 * ql / (math.gamma(n + 1.0) * math.gamma(float(n))) * lk2
            b_second = -math.exp(math.lgamma(float(n)) - n * lk2) / math.pi * (bh - corr * bf)
        return b_first, b_second
    if nint < 0:
        b_second = 0.5 * math.exp(math.lgamma(mu) - mu * lk2) * bh \
            - math.pi / (2.0 * math.sin(mu * math.pi)) * b_first
    elif nint == 0:
        b_second = -bh - (lk2 + EULER_GAMMA) * bf
    else:
        n = nint
        ql = (lam / 4.0) ** n
        corr = 2.0 * ql / (math.gamma(n + 1.0) * math.gamma(float(n))) * lk2
        b_second = 0.5 * math.exp(math.lgamma(float(n)) - n * lk2) * (bh - corr * bf)
    # rescale to the e^-ka / e^ka convention of the basis
    return b_first * math.exp(-k * a), b_second * math.exp(k * a)


@njit(cache=True)
def _left_setup(e_f, e_h, mu, nint, lam, a, lk, lkap):
    """Coefficients (cf, cg, sign) so that phi = sign (cf G - cg F)."""
    if lk >= _MINIMAL:
        return 0.0, 0.0, 1.0
    sigma = 1.0 if lk == _DIRICHLET else -1.0
    if lam == 0.0:
        _, _, bf, _, _, bh = _series_fh(e_f, e_h, mu, nint, 0.0, a, lk, lkap)
        w = 1.0 if nint == 0 else e_h - e_f
    else:
        bf, bh = _left_functionals(e_f, e_h, mu, nint, lam, a, lk, lkap)
        w = 2.0 / math.pi if lam > 0.0 else -1.0
    return bf, bh, sigma / w


@njit(cache=True)
def _phi(e_f, e_h, mu, nint, lam, a, lk, cf, cg, sw, r):
    """Left solution (value, derivative) at r up to a positive factor.

    The factor is 1 for lam >= 0 and exp(k (r - a)) for lam < 0.
    """
    if lam == 0.0:
        fv, fd, _, hv, hd, _ = _series_fh(e_f, e_h, mu, nint, 0.0, r, 0, 0.0)
        if lk == _MINIMAL:
            return fv, fd
        if lk == _R_MINUS_GAMMA:
            return hv, hd
        return sw * (cf * hv - cg * fv), sw * (cf * hd - cg * fd)
    f, fp, g, gp = _bessel_vals(mu, lam, r)
    if lam > 0.0:
        if lk == _MINIMAL:
            return f, fp
        if lk == _R_MINUS_GAMMA:
            c = math.cos(mu * math.pi)
            s = math.sin(mu * math.pi)
            return c * f - s * g, c * fp - s * gp
        return sw * (cf * g - cg * f), sw * (cf * gp - cg * fp)
    k = math.sqrt(-lam)
    if lk == _MINIMAL:
        return f, fp
    if lk == _R_MINUS_GAMMA:
        s = 2.0 / math.pi * math.sin(mu * math.pi) * math.exp(-2.0 * k * r)
        return f + s * g, fp + s * gp
    damp = math.exp(-2.0 * k * (r - a))
    return sw * (cf * damp * g - cg * f), sw * (cf * damp * gp - cg * fp)


@njit(cache=True)
def _right_angle(rk, rkap, b):
    if rk == _DIRICHLET:
        return math.pi
    return math.atan2(1.0, rkap / b)


@njit(cache=True)
def _count_and_mismatch(e_f, e_h, mu, nint, a, b, lk, lkap, rk, rkap, lam):
    """Number of eigenvalues strictly below lam and the boundary mismatch at lam."""
    cf, cg, sw = _left_setup(e_f, e_h, mu, nint, lam, a, lk, lkap)
    k = math.sqrt(abs(lam))
    # the left solution is positive just inside the left end by construction
    prev = 1.0
    if lk >= _MINIMAL:
        r = min(b, 1.0 / max(k, 1e-300)) * 1e-6
    else:
        r = a
    zeros = 0
    while r < b:
        step = 0.05
        if lam > 0.0:
            step = min(step, 0.25 / (k * r))
        r = r * math.exp(step)
        if r >= b:
            break
        v, _ = _phi(e_f, e_h, mu, nint, lam, a, lk, cf, cg, sw, r)
        if v != 0.0:
            cur = 1.0 if v > 0.0 else -1.0
            if cur != prev:
                zeros += 1
                prev = cur
    vb, db = _phi(e_f, e_h, mu, nint, lam, a, lk, cf, cg, sw, b)
    if vb != 0.0:
        cur = 1.0 if vb > 0.0 else -1.0
        if cur != prev:
            zeros += 1
    ang = math.atan2(vb, db)
    if ang <= 0.0:
        ang += math.pi
    beta = _right_angle(rk, rkap, b)
    count = zeros + (1 if ang > beta else 0)
    mismatch = (vb * math.cos(beta) - db * math.sin(beta)) / math.hypot(vb, db)
    return count, mismatch


@njit(cache=True)
def _phi_many(e_f, e_h, mu, nint, a, lk, lkap, lam, rs):
    cf, cg, sw = _left_setup(e_f, e_h, mu, nint, lam, a, lk, lkap)
    k = math.sqrt(abs(lam)) if lam < 0.0 else 0.0
    base = a if lk < _MINIMAL else 0.0
    out = np.empty(rs.shape[0])
    dout = np.empty(rs.shape[0])
    for i in range(rs.shape[0]):
        v, d = _phi(e_f, e_h, mu, nint, lam, a, lk, cf, cg, sw, rs[i])
        s = math.exp(k * (rs[i] - base))
        out[i] = v * s
        dout[i] = d * s
    return out, dout


# ---------------------------------------------------------------- shooting

class _Shooter:
    def __init__(self, p: RadialProblem):
        self.p = p
        self.args = _encode(p)
        self.samples: dict[float, int] = {}

    def count(self, lam: float) -> int:
        n = self.samples.get(lam)
        if n is None:
            n, _ = _count_and_mismatch(*self.args, float(lam))
            n = int(n)
            self.samples[lam] = n
        return n

    def mismatch(self, lam: float) -> float:
        return _count_and_mismatch(*self.args, float(lam))[1]

    def lower_bound(self) -> float:
        if self.count(0.0) == 0:
            return 0.0
        lam = -1.0
        for _ in range(80):
            if self.count(lam) == 0:
                return lam
            lam *= 4.0
        raise BracketError("no lower bound for the spectrum", (lam, 0.0))

    def upper_bound(self, lo: float, target: int) -> float:
        a, b = self.p.interval
        lam = ((target + 1) * math.pi / (b - a)) ** 2 + 1.0
        for _ in range(200):
            if self.count(lam) >= target:
                return lam
            lam *= 2.0
        raise BracketError(f"fewer than {target} eigenvalues found", (lo, lam))

    def bracket(self, n: int) -> tuple[float, float]:
        """Interval with exactly n eigenvalues below its left end and n+1 below its right."""
        for _ in range(400):
            pts = sorted(self.samples.items())
            lo = max(l for l, c in pts if c <= n)
            hi = min(l for l, c in pts if c >= n + 1)
            if self.samples[lo] == n and self.samples[hi] == n + 1:
                return lo, hi
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                return lo, hi
            self.count(mid)
        raise BracketError(f"could not isolate eigenvalue {n}", (lo, hi))

    def bisect_count(self, n: int, lo: float, hi: float) -> float:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= 1e-14 * max(abs(lo), abs(hi)) or mid in (lo, hi):
                break
            if self.count(mid) > n:
                hi = mid
            else:
                lo = mid
        return hi


def shoot_eigenvalues(p: RadialProblem) -> list[float]:
    """The first ``p.count`` eigenvalues, strictly increasing."""
    sh = _Shooter(p)
    lo = sh.lower_bound()
    sh.upper_bound(lo, p.count)
    out = []
    for n in range(p.count):
        lo_n, hi_n = sh.bracket(n)
        m_lo = sh.mismatch(lo_n)
        m_hi = sh.mismatch(hi_n)
        if m_lo * m_hi < 0.0:
            scale = max(abs(lo_n), abs(hi_n), 1e-300)
            lam = brentq(sh.mismatch, lo_n, hi_n, xtol=1e-15 * scale, rtol=1e-15, maxiter=400)
        elif min(abs(m_lo), abs(m_hi)) <= 1e-12:
            # root sits on a bracket end up to rounding (e.g. an exact zero mode)
            lam = lo_n if abs(m_lo) <= abs(m_hi) else hi_n
        else:
            lam = sh.bisect_count(n, lo_n, hi_n)
        out.append(float(lam))
    for x, y in zip(out, out[1:]):
        if not y > x:
            raise BracketError("eigenvalues not strictly increasing", (out[0], out[-1]))
    return out


def eigenvalue_count(p: RadialProblem, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam`` (oscillation count)."""
    return int(_count_and_mismatch(*_encode(p), float(lam))[0])


def eigenfunction(p: RadialProblem, lam: float, r) -> tuple[np.ndarray, np.ndarray]:
    """Left solution and derivative at ``r`` (unnormalised, positive near the left end)."""
    e_f, e_h, mu, nint, a, b, lk, lkap, rk, rkap = _encode(p)
    rs = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(rs <= 0.0):
        raise ValueError("eigenfunction needs r > 0")
    return _phi_many(e_f, e_h, mu, nint, a, lk, lkap, float(lam), rs)


def eigenfunction_norm(p: RadialProblem, lam: float, rtol: float = 1e-10) -> float:
    """L2 norm of the unnormalised left solution on the interval."""
    from .quadrature import integrate_log_panels

    a, b = p.interval
    if a > 0.0:
        return math.sqrt(integrate_log_panels(lambda r: eigenfunction(p, lam, r)[0] ** 2,
                                              a, b, rtol=rtol, oscillation=math.sqrt(abs(lam))))
    e_f, e_h, *_ = _order_data(p)
    expo = e_f if p.left_condition.exponent_choice == "minimal" else e_h
    delta = min(b, 1.0 / max(math.sqrt(abs(lam)), 1e-300)) * 1e-6
    v = eigenfunction(p, lam, delta)[0][0]
    # near 0 the solution is v (r/delta)^expo to relative O(lam delta^2)
    tail = v * v * delta / (2.0 * expo + 1.0)
    body = integrate_log_panels(lambda r: eigenfunction(p, lam, r)[0] ** 2, delta, b,
                                rtol=rtol, oscillation=math.sqrt(abs(lam)))
    return math.sqrt(tail + body)


# ---------------------------------------------------------------- finite differences

def _fd_matrix(gd: float, a: float, b: float, n: int, left_kappa, right_kappa):
    """Symmetric tridiagonal (d, e) for the form int |u' + gd u/r|^2 on a log grid.

    Writing D = r^-gd d/dr r^gd, the channel form with Robin caps equals
    int |D u|^2 + (gd + kl) u(a)^2/a - (gd + kr) u(b)^2/b, and the discrete D
    annihilates r^-gd exactly. ``*_kappa`` is None for Dirichlet.
    """
    r = np.geomspace(a, b, n + 1)
    r[0], r[-1] = a, b
    dr = np.diff(r)
    pw = r ** gd
    mid = np.sqrt(r[:-1] * r[1:])
    w = 1.0 / (dr * mid ** (2.0 * gd))
    diag = np.zeros(n + 1)
    diag[:-1] += w * pw[:-1] ** 2
    diag[1:] += w * pw[1:] ** 2
    off = -w * pw[:-1] * pw[1:]
    mass = np.zeros(n + 1)
    mass[:-1] += 0.5 * dr
    mass[1:] += 0.5 * dr
    if left_kappa is not None:
        diag[0] += (gd + left_kappa) / a
    if right_kappa is not None:
        diag[n] -= (gd + right_kappa) / b
    lo = 0 if left_kappa is not None else 1
    hi = n if right_kappa is not None else n - 1
    diag = diag[lo:hi + 1]
    m = mass[lo:hi + 1]
    off = off[lo:hi]
    sq = np.sqrt(m)
    return diag / m, off / (sq[:-1] * sq[1:])


def _richardson(values: Sequence[np.ndarray], sizes: Sequence[int]):
    """Neville extrapolation in h^2 = 1/n^2; returns (best, error, converged)."""
    hs = [1.0 / (n * n) for n in sizes]
    table = [np.asarray(v, dtype=float) for v in values]
    prev_best = table[-1]
    diffs = []
    level = table
    best = table[-1]
    for order in range(1, len(table)):
        nxt = []
        for i in range(len(level) - 1):
            h_far, h_near = hs[i], hs[i + order]
            nxt.append((h_far * level[i + 1] - h_near * level[i]) / (h_far - h_near))
        prev_best = best
        best = nxt[-1]
        diffs.append(np.abs(best - prev_best))
        level = nxt
    err = diffs[-1] if diffs else np.full_like(best, np.inf)
    converged = len(diffs) < 2 or bool(np.all(diffs[-1] <= diffs[-2] + 1e-15 * np.abs(best)))
    return best, err, converged


def _branch_kappa(e: float, s: float, lam: float, delta: float) -> float:
    """r u'/u at delta for the branch r^e sum T_j (T_j = T_{j-1} z/(j(j+s)))."""
    z = -lam * delta * delta / 4.0
    t, s0, s1 = 1.0, 1.0, 0.0
    for j in range(1, 60):
        t *= z / (j * (j + s))
        s0 += t
        s1 += 2 * j * t
        if abs(t) < 1e-18:
            break
    return e + s1 / s0


def _fd_solve(gd: float, a: float, b: float, sizes, left_kappa, right_kappa, k_lo, k_hi):
    vals = []
    for n in sizes:
        d, e = _fd_matrix(gd, a, b, n, left_kappa, right_kappa)
        vals.append(eigvals_index(d, e, k_lo, k_hi))
    return _richardson(vals, sizes)


def _cap_kappa(cap: CapCondition):
    return None if cap.kind == "dirichlet" else cap.robin_kappa


def _form_gamma(g: float, left_kappa) -> float:
    """Factorisation parameter: annihilate the power the left condition keeps."""
    if left_kappa is not None and left_kappa == g + 1.0:
        return -1.0 - g
    return g


def fd_eigenvalues(p: RadialProblem, grid_sizes: Sequence[int] = DEFAULT_GRIDS,
                   delta: float | None = None) -> list[tuple[float, float]]:
    """Finite-difference eigenvalues with Richardson error estimates.

    For a = 0 the interval is truncated at ``delta`` (default 1e-6 b) with the
    selected branch's logarithmic derivative, iterated to self-consistency in
    lambda, and the truncation effect is added to the error estimate by
    repeating at 100 delta.
    """
    sizes = [int(n) for n in grid_sizes]
    if not sizes or any(n < 4 for n in sizes) or sorted(set(sizes)) != sizes:
        raise ValueError("grid_sizes must be increasing integers >= 4")
    a, b = p.interval
    g = p.resolved_gamma
    right_kappa = _cap_kappa(p.right_condition)
    if a > 0.0:
        left_kappa = _cap_kappa(p.left_condition)
        best, err, ok = _fd_solve(_form_gamma(g, left_kappa), a, b, sizes, left_kappa,
                                  right_kappa, 0, p.count)
        if not ok:
            warnings.warn("finite-difference extrapolation not converging", ExtrapolationWarning,
                          stacklevel=2)
        return [(float(x), float(y)) for x, y in zip(best, err)]

    e_f, e_h, mu, _ = _order_data(p)
    minimal = p.left_condition.exponent_choice == "minimal"
    expo, sgn = (e_f, mu) if minimal else (e_h, -mu)
    # D annihilates the kept branch: r^-gd = r^expo
    gd = -expo
    delta = delta if delta is not None else 1e-6 * b
    out = []
    all_ok = True
    for k in range(p.count):
        results = []
        for dl in (delta, 100.0 * delta):
            lam = 0.0
            for _ in range(8):
                kap = _branch_kappa(expo, sgn, lam, dl)
                best, err, ok = _fd_solve(gd, dl, b, sizes, kap, right_kappa, k, k + 1)
                new = float(best[0])
                done = abs(new - lam) <= 1e-13 * max(1.0, abs(new))
                lam = new
                if done:
                    break
            all_ok &= ok
            results.append((lam, float(err[0])))
        (lam0, err0), (lam1, _) = results
        out.append((lam0, err0 + abs(lam0 - lam1)))
    if not all_ok:
        warnings.warn("finite-difference extrapolation not converging", ExtrapolationWarning,
                      stacklevel=2)
    return out
