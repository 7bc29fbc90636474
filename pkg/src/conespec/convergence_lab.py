"""Eps sweeps, rate fits, trace-decay fits and a Hardy-inequality checker."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .channel_model import CapCondition, Geometry, compute_w_decision, same_gamma
from .radial_solver import RadialProblem, eigenfunction, eigenfunction_norm, shoot_eigenvalues
from .spectra import SpectrumReport, eps_spectrum, limit_spectrum

log = logging.getLogger(__name__)

DEFAULT_EPS = tuple(10.0 ** (-k / 2) for k in range(2, 17))
R2_MIN = 0.99
DECAY_TOL = 0.1
SWEEP_COLUMNS = ("eps", "N", "lambda", "gamma")


@dataclass(frozen=True)
class SweepTable:
    eps_list: tuple[float, ...]
    count: int
    reports: tuple[SpectrumReport, ...]
    limit: SpectrumReport

    def value(self, eps: float, n: int) -> float:
        """lambda_N(eps), with N counted from 1 and multiplicity included."""
        return self.reports[self.eps_list.index(eps)].expanded()[n - 1]

    def column(self, n: int) -> list[float]:
        return [r.expanded()[n - 1] for r in self.reports]

    def label_column(self, n: int) -> list[float]:
        return [r.labels()[n - 1] for r in self.reports]

    def limit_value(self, n: int) -> float:
        return self.limit.expanded()[n - 1]

    def limit_label(self, n: int) -> float:
        return self.limit.labels()[n - 1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for eps, rep in zip(self.eps_list, self.reports):
            for n, (lam, g) in enumerate(zip(rep.expanded()[:self.count], rep.labels()), start=1):
                w.writerow([repr(eps), n, repr(lam), repr(g)])
        lim = self.limit
        for n, (lam, g) in enumerate(zip(lim.expanded()[:self.count], lim.labels()), start=1):
            w.writerow(["limit", n, repr(lam), "" if math.isnan(g) else repr(g)])
        return buf.getvalue()


def sweep(geom: Geometry, eps_list: Sequence[float] = DEFAULT_EPS, count: int = 5,
          threads: int = 1) -> SweepTable:
    eps_list = tuple(float(e) for e in eps_list)
    if not eps_list:
        raise ValueError("eps_list is empty")
    if any(not 0.0 < e < 1.0 for e in eps_list):
        raise ValueError("every eps must lie in (0, 1)")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    reports = tuple(eps_spectrum(geom, e, count, threads) for e in eps_list)
    limit = limit_spectrum(geom, compute_w_decision(geom), count, threads)
    return SweepTable(eps_list, count, reports, limit)


# ---------------------------------------------------------------- rate fits

FAMILIES = ("eps_power", "inv_log", "eps_power_log")


@dataclass(frozen=True)
class RateFit:
    n: int
    limit_lambda: float
    family: str | None
    exponent: float
    log_exponent: float
    coefficient: float
    r_squared: float
    status: str  # fitted | converged | non_monotone | noise_floor | poor_fit

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "limit_lambda", "family", "exponent",
                                              "log_exponent", "coefficient", "r_squared", "status")}


def _lstsq(cols: list[np.ndarray], y: np.ndarray) -> tuple[np.ndarray, float]:
    a = np.column_stack([np.ones_like(y)] + cols)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return coef, r2


def fit_family(family: str, eps: np.ndarray, err: np.ndarray) -> tuple[float, float, float, float]:
    """(exponent, log_exponent, coefficient, R^2) for err ~ c eps^alpha |log eps|^-beta.

    ``eps_power`` fits alpha (beta = 0), ``inv_log`` fits beta (alpha = 0) and
    ``eps_power_log`` fits both. The fit is linear least squares on log err.
    """
    x = np.log(eps)
    ll = np.log(np.abs(np.log(eps)))
    y = np.log(err)
    if family == "eps_power":
        (c, alpha), r2 = _lstsq([x], y)
        return float(alpha), 0.0, math.exp(c), r2
    if family == "inv_log":
        (c, mbeta), r2 = _lstsq([ll], y)
        return 0.0, float(-mbeta), math.exp(c), r2
    if family == "eps_power_log":
        (c, alpha, mbeta), r2 = _lstsq([x, ll], y)
        return float(alpha), float(-mbeta), math.exp(c), r2
    raise ValueError(f"unknown rate family {family!r}")


def fit_rate(n: int, limit_lambda: float, eps: Sequence[float], values: Sequence[float]) -> RateFit:
    """Fit |value - limit| against the rate families (order by decreasing eps)."""
    if len(eps) < 4:
        raise ValueError("rate fits need at least 4 eps points")
    order = np.argsort(-np.asarray(eps, dtype=float), kind="stable")
    e = np.asarray(eps, dtype=float)[order]
    err = np.abs(np.asarray(values, dtype=float)[order] - limit_lambda)
    floor = 1e-10 * max(1.0, abs(limit_lambda))
    if np.all(err <= floor):
        return RateFit(n, limit_lambda, None, 0.0, 0.0, 0.0, 1.0, "converged")
    if np.any(err <= floor):
        return RateFit(n, limit_lambda, None, math.nan, math.nan, math.nan, math.nan, "noise_floor")
    if np.any(err[1:] > err[:-1] * (1.0 + 1e-9)):
        return RateFit(n, limit_lambda, None, math.nan, math.nan, math.nan, math.nan, "non_monotone")
    # a zero limit is tried against the logarithmic rate first
    families = (("inv_log", "eps_power", "eps_power_log") if limit_lambda == 0.0
                else ("eps_power", "inv_log", "eps_power_log"))
    fits = []
    for fam in families:
        alpha, beta, c, r2 = fit_family(fam, e, err)
        if r2 >= R2_MIN:
            return RateFit(n, limit_lambda, fam, alpha, beta, c, r2, "fitted")
        fits.append((r2, fam, alpha, beta, c))
    r2, fam, alpha, beta, c = max(fits)
    return RateFit(n, limit_lambda, fam, alpha, beta, c, r2, "poor_fit")


def match_and_fit(table: SweepTable, indices: Sequence[int] | None = None) -> list[RateFit]:
    """Match lambda_N(eps) to the N-th limit value and fit the approach rate."""
    if len(table.eps_list) < 4:
        raise ValueError("rate fits need at least 4 eps points")
    indices = range(1, table.count + 1) if indices is None else indices
    return [fit_rate(n, table.limit_value(n), table.eps_list, table.column(n)) for n in indices]


def fits_to_json(fits: Sequence[RateFit]) -> str:
    return json.dumps([f.to_dict() for f in fits], indent=2)


def write_gnuplot_files(table: SweepTable, out_dir: str | Path) -> list[Path]:
    """One two-column file per index N: eps and lambda_N(eps)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for n in range(1, table.count + 1):
        path = out_dir / f"lambda_N{n}.dat"
        lines = [f"# N={n} limit={table.limit_value(n)!r}", "# eps lambda"]
        lines += [f"{e!r} {v!r}" for e, v in zip(table.eps_list, table.column(n))]
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    return paths


# ---------------------------------------------------------------- trace decay

@dataclass(frozen=True)
class TraceDecay:
    band: str
    gamma: float
    exponent: float
    bound: float
    r_squared: float
    holds: bool
    traces: tuple[float, ...]


def gamma_band(gamma: float) -> str | None:
    if gamma <= -1.0 or same_gamma(gamma, -1.0):
        return "power_le_m1"
    if -1.0 < gamma < 0.0:
        return "power_m1_0"
    if same_gamma(gamma, 0.5):
        return "log_half"
    return None


# lower bounds on the fitted exponents; the middle band's exponent is only
# known to be positive, so decay itself is the asserted class there
BAND_BOUNDS = {"power_le_m1": 0.5, "power_m1_0": 0.0, "log_half": 0.5}


def channel_trace(gamma: float, r0: float, left: CapCondition, right: CapCondition,
                  eps: float, n: int = 1) -> float:
    """sqrt(eps) |u(eps)| for the unit-norm n-th eigenfunction on [eps r0, 1].

    This is the value at the unit radius of the collapsing piece after the
    norm-preserving rescaling r -> r / eps.
    """
    p = RadialProblem.for_channel(gamma, (eps * r0, 1.0), left, right, n)
    lam = shoot_eigenvalues(p)[n - 1]
    u = eigenfunction(p, lam, eps)[0][0] / eigenfunction_norm(p, lam)
    return math.sqrt(eps) * abs(u)


def trace_decay_check(geom: Geometry, eps_list: Sequence[float] = DEFAULT_EPS,
                      n: int = 1) -> list[TraceDecay]:
    """Fit decay exponents of the n-th mode's trace at r = eps, per band.

    Power bands fit trace ~ eps^alpha; the gamma = 1/2 band fits
    trace ~ |log eps|^(-beta) and also requires beta within 10% of 1/2.
    Channels outside every band are skipped.
    """
    eps = np.asarray(eps_list, dtype=float)
    if len(eps) < 3:
        raise ValueError("need at least 3 eps values")
    out = []
    for ch in geom.channels:
        band = gamma_band(ch.gamma)
        if band is None:
            log.info("channel gamma=%r lies in no trace band; skipped", ch.gamma)
            continue
        traces = np.array([channel_trace(ch.gamma, geom.r0, geom.cap_m2_for(ch.gamma),
                                         geom.cap_m1_for(ch.gamma), e, n) for e in eps])
        bound = BAND_BOUNDS[band]
        if band == "log_half":
            _, beta, _, r2 = fit_family("inv_log", eps, traces)
            expo = beta
            holds = expo >= bound - DECAY_TOL and abs(beta - 0.5) <= 0.05
        else:
            expo, _, _, r2 = fit_family("eps_power", eps, traces)
            holds = expo >= bound - DECAY_TOL
        out.append(TraceDecay(band, ch.gamma, expo, bound, r2, bool(holds), tuple(traces.tolist())))
    return out


# ---------------------------------------------------------------- Hardy inequality

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


@dataclass(frozen=True)
class HardyResult:
    lhs: float
    rhs: float
    holds: bool


def _gauss(f, lo: float, hi: float, panels: int) -> float:
    edges = np.linspace(lo, hi, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _GL_NODES[None, :]
    return float(np.sum(half * f(x) * _GL_WEIGHTS[None, :]))


def hardy_check(lam: float, v: Callable, dv: Callable, support: tuple[float, float],
                panels: int = 64, rtol: float = 1e-8) -> HardyResult:
    """Both sides of the weighted Hardy inequality for v supported in ``support``.

    For lam != -1/2:  (lam + 1/2)^2 int v^2 / r^2  <=  int r^(-2 lam) |(r^lam v)'|^2.
    For lam = -1/2 the left side is int v^2 / ((r log r)^2 log log r).
    The support must lie in [e, inf). ``v`` and ``dv`` are vectorised callables.
    """
    lo, hi = float(support[0]), float(support[1])
    if not (math.e <= lo < hi and math.isfinite(hi)):
        raise ValueError(f"support {support} must lie inside [e, inf)")
    ends = np.array([lo, hi])
    if np.any(np.abs(v(ends)) > 0.0):
        raise ValueError("v must vanish at the ends of its support")

    # r^(-2 lam) |(r^lam v)'|^2 = (v' + lam v / r)^2
    def rhs_density(r):
        return (dv(r) + lam * v(r) / r) ** 2

    if lam == -0.5:
        def lhs_density(r):
            lr = np.log(r)
            return v(r) ** 2 / ((r * lr) ** 2 * np.log(lr))
        coef = 1.0
    else:
        def lhs_density(r):
            return v(r) ** 2 / r ** 2
        coef = (lam + 0.5) ** 2
    lhs = coef * _gauss(lhs_density, lo, hi, panels)
    rhs = _gauss(rhs_density, lo, hi, panels)
    return HardyResult(lhs, rhs, bool(lhs <= rhs * (1.0 + rtol)))


def bump(center: float, width: float, amplitude: float = 1.0):
    """Smooth bump supported on [center - width, center + width] and its derivative."""

    def v(r):
        s = (np.asarray(r, dtype=float) - center) / width
        inside = np.abs(s) < 1.0
        out = np.zeros_like(s)
        si = s[inside]
        out[inside] = amplitude * np.exp(-1.0 / (1.0 - si * si))
        return out

    def dv(r):
        s = (np.asarray(r, dtype=float) - center) / width
        inside = np.abs(s) < 1.0
        out = np.zeros_like(s)
        si = s[inside]
        q = 1.0 - si * si
        out[inside] = amplitude * np.exp(-1.0 / q) * (-2.0 * si / (q * q)) / width
        return out

    return v, dv
