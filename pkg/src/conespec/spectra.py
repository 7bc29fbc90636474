"""Finite-eps spectra, limit spectra and pseudomode Rayleigh quotients.

Each channel with parameter gamma is solved on [eps * r0, 1] (finite eps) or
on [0, 1] with the branch chosen by the W decision (limit). Results from all
channels are merged into a ``SpectrumReport`` with channel multiplicities.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .channel_model import (
    T_ZERO_TOL,
    Geometry,
    WDecision,
    compute_w_decision,
    limit_branch,
    same_gamma,
    t_scalar,
)
from .quadrature import integrate_log_panels
from .radial_solver import BranchSelection, RadialProblem, shoot_eigenvalues

LIMIT = "limit"
CSV_COLUMNS = ("eps", "lambda", "gamma", "mult", "solver")
# row tag carrying the exact zero multiplicity of a limit report
ZERO_MULT_TAG = "zero_mult"


class ChannelSolveError(RuntimeError):
    """A channel solve failed; ``gamma`` names the channel."""

    def __init__(self, gamma: float, cause: Exception):
        super().__init__(f"channel gamma={gamma!r}: {cause}")
        self.gamma = gamma
        self.cause = cause


@dataclass(frozen=True, order=True)
class SpectrumEntry:
    lam: float
    gamma: float
    mult: int
    solver: str = "shooting"


@dataclass(frozen=True)
class SpectrumReport:
    eps: float | str
    entries: tuple[SpectrumEntry, ...]
    zero_mult: int | None = None

    def __post_init__(self):
        ents = tuple(sorted(self.entries, key=lambda e: (e.lam, e.gamma)))
        object.__setattr__(self, "entries", ents)
        if any(e.mult < 1 for e in ents):
            raise ValueError("multiplicities must be >= 1")
        if self.is_limit and self.zero_mult is None:
            raise ValueError("a limit report needs zero_mult")
        if not self.is_limit and self.zero_mult is not None:
            raise ValueError("zero_mult belongs to limit reports only")
        if not self.is_limit and not ents:
            # the CSV form could not carry eps for an empty report
            raise ValueError("an eps report needs at least one entry")

    @property
    def is_limit(self) -> bool:
        return self.eps == LIMIT

    def expanded(self) -> list[float]:
        """Eigenvalues repeated by multiplicity; a limit report starts with its zeros."""
        out = [0.0] * (self.zero_mult or 0)
        for e in self.entries:
            out.extend([e.lam] * e.mult)
        return out

    def labels(self) -> list[float]:
        """Channel gamma of each value in ``expanded()`` (nan for the limit zeros)."""
        out = [math.nan] * (self.zero_mult or 0)
        for e in self.entries:
            out.extend([e.gamma] * e.mult)
        return out

    def count_below(self, threshold: float) -> int:
        return sum(e.mult for e in self.entries if e.lam < threshold)

    # serialisation: floats go through repr so round trips are exact
    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "zero_mult": self.zero_mult,
            "entries": [{"lambda": e.lam, "gamma": e.gamma, "mult": e.mult, "solver": e.solver}
                        for e in self.entries],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumReport":
        entries = tuple(SpectrumEntry(float(x["lambda"]), float(x["gamma"]), int(x["mult"]),
                                      str(x["solver"])) for x in d["entries"])
        eps = d["eps"] if d["eps"] == LIMIT else float(d["eps"])
        return cls(eps, entries, d.get("zero_mult"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SpectrumReport":
        return cls.from_dict(json.loads(text))

    def csv_rows(self) -> list[list[str]]:
        eps = self.eps if self.is_limit else repr(self.eps)
        rows = [[eps, repr(e.lam), repr(e.gamma), str(e.mult), e.solver] for e in self.entries]
        if self.is_limit:
            rows.append([eps, repr(0.0), "", str(self.zero_mult), ZERO_MULT_TAG])
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(self.csv_rows())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SpectrumReport":
        reports = reports_from_csv(text)
        if len(reports) != 1:
            raise ValueError(f"expected one report, found {len(reports)}")
        return reports[0]


def reports_from_csv(text: str) -> list[SpectrumReport]:
    """Parse CSV holding one or more reports (grouped by the eps column, in order)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_COLUMNS:
        raise ValueError(f"CSV header must be {','.join(CSV_COLUMNS)}")
    groups: dict[str, list] = {}
    zero: dict[str, int] = {}
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"line {lineno}: expected {len(CSV_COLUMNS)} fields")
        eps, lam, gamma, mult, solver = row
        groups.setdefault(eps, [])
        if solver == ZERO_MULT_TAG:
            zero[eps] = int(mult)
        else:
            groups[eps].append(SpectrumEntry(float(lam), float(gamma), int(mult), solver))
    out = []
    for eps, entries in groups.items():
        key = eps if eps == LIMIT else float(eps)
        out.append(SpectrumReport(key, tuple(entries), zero.get(eps)))
    return out


def _truncate(entries: list[SpectrumEntry], count: int) -> tuple[SpectrumEntry, ...]:
    """Smallest entries until ``count`` values (with multiplicity) are covered."""
    entries = sorted(entries, key=lambda e: (e.lam, e.gamma))
    kept, total = [], 0
    for e in entries:
        if total >= count:
            break
        kept.append(e)
        total += e.mult
    return tuple(kept)


def _solve_all(jobs, threads: int):
    def run(job):
        gamma, problem = job
        try:
            return shoot_eigenvalues(problem)
        except Exception as exc:  # annotate with the channel and re-raise
            raise ChannelSolveError(gamma, exc) from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, jobs))
    return [run(j) for j in jobs]


def eps_spectrum(geom: Geometry, eps: float, count: int = 10, threads: int = 1) -> SpectrumReport:
    """The ``count`` smallest eigenvalues (with multiplicity) at collapse parameter eps."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if count < 1:
        raise ValueError("count must be positive")
    a = eps * geom.r0
    jobs = [(ch.gamma, RadialProblem.for_channel(ch.gamma, (a, 1.0), geom.cap_m2_for(ch.gamma),
                                                 geom.cap_m1_for(ch.gamma), count))
            for ch in geom.channels]
    results = _solve_all(jobs, threads)
    entries = [SpectrumEntry(lam, ch.gamma, ch.mult)
               for ch, lams in zip(geom.channels, results) for lam in lams]
    return SpectrumReport(float(eps), _truncate(entries, count))


def limit_spectrum(geom: Geometry, w: WDecision | None = None, count: int = 10,
                   threads: int = 1) -> SpectrumReport:
    """Nonzero limit eigenvalues plus the exact zero multiplicity from ``w``.

    A channel whose kept branch satisfies its outer cap has a zero mode. That
    mode is part of ``w.zero_mult`` and is dropped from the entries.
    """
    w = compute_w_decision(geom) if w is None else w
    jobs, zero_modes = [], []
    for ch in geom.channels:
        choice, power = limit_branch(ch.gamma, w.in_w(ch.gamma))
        cap = geom.cap_m1_for(ch.gamma)
        has_zero = cap.satisfied_by_power(power)
        zero_modes.append(has_zero)
        jobs.append((ch.gamma, RadialProblem.for_channel(ch.gamma, (0.0, 1.0), BranchSelection(choice),
                                                         cap, count + int(has_zero))))
    results = _solve_all(jobs, threads)
    entries = []
    for ch, lams, has_zero in zip(geom.channels, results, zero_modes):
        if has_zero:
            if abs(lams[0]) > 1e-8:
                raise ChannelSolveError(ch.gamma, RuntimeError(
                    f"expected a zero mode, lowest eigenvalue is {lams[0]!r}"))
            lams = lams[1:]
        entries.extend(SpectrumEntry(lam, ch.gamma, ch.mult) for lam in lams)
    return SpectrumReport(LIMIT, _truncate(entries, count), w.zero_mult)


def cutoff_profile(r):
    """1 on r <= 1/2, C^1 smoothstep down to 0 at r = 1, and its derivative."""
    import numpy as np

    r = np.asarray(r, dtype=float)
    s = np.clip(2.0 * r - 1.0, 0.0, 1.0)
    xi = 1.0 - s * s * (3.0 - 2.0 * s)
    dxi = np.where((s > 0.0) & (s < 1.0), -12.0 * s * (1.0 - s), 0.0)
    return xi, dxi


@dataclass(frozen=True)
class Pseudomode:
    rayleigh: float
    l2_norm: float
    eps: float
    gamma: float


def pseudomode_quotient(geom: Geometry, eps: float, gamma: float = 0.5,
                        rtol: float = 1e-9) -> Pseudomode:
    """Rayleigh quotient of psi = |log eps|^(-1/2) xi(r) r^(-gamma) on [eps r0, 1].

    The channel's inner cap must be satisfied by r^(-gamma) (t scalar zero),
    so psi lies in the form domain. Since r^(-gamma) is harmonic, the form of
    xi h reduces to the integral of xi'^2 h^2; the boundary term at the inner
    end vanishes because h satisfies the cap there.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    ch = next((c for c in geom.channels if same_gamma(c.gamma, gamma)), None)
    if ch is None:
        raise ValueError(f"geometry has no channel with gamma={gamma}")
    t = t_scalar(ch, geom.r0, geom.cap_m2_for(ch.gamma))
    if not (math.isfinite(t) and abs(t) <= T_ZERO_TOL):
        raise ValueError(f"channel gamma={gamma} has t scalar {t!r}; the pseudomode needs 0")
    a = eps * geom.r0
    g = ch.gamma
    logeps = abs(math.log(eps))

    def mass(r):
        return cutoff_profile(r)[0] ** 2 * r ** (-2.0 * g)

    def energy(r):
        return cutoff_profile(r)[1] ** 2 * r ** (-2.0 * g)

    # the cut-off is smooth on each side of r = 1/2
    norm2 = (integrate_log_panels(mass, a, 0.5, rtol=rtol)
             + integrate_log_panels(mass, 0.5, 1.0, rtol=rtol)) / logeps
    form = integrate_log_panels(energy, 0.5, 1.0, rtol=rtol) / logeps
    return Pseudomode(form / norm2, math.sqrt(norm2), float(eps), g)
