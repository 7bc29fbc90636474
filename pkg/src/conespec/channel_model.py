"""Radial channels, cap conditions and the small-eigenvalue bookkeeping.

Every entry gamma of the boundary-operator spectrum gives a radial channel

    -u'' + gamma (gamma + 1) / r^2 u = lambda u,

whose two power-law solutions near r = 0 are r^(gamma+1) and r^(-gamma).
The caps replace the inner piece (at ``eps * r0``) and close the outer end
(at ``r = 1``) by Dirichlet, Neumann or Robin conditions. A Robin cap with
parameter kappa at radius ``a`` reads ``u'(a) - (kappa / a) u(a) = 0``, so the
power r^kappa satisfies it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

GAMMA_TOL = 1e-12
T_ZERO_TOL = 1e-10

CapKind = Literal["dirichlet", "neumann", "robin"]


class DegenerateCapError(ValueError):
    """The cap condition is satisfied by every harmonic solution."""


@dataclass(frozen=True)
class CapCondition:
    kind: CapKind
    kappa: float | None = None

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann", "robin"):
            raise ValueError(f"unknown cap kind {self.kind!r}")
        if self.kind == "robin":
            if self.kappa is None or not math.isfinite(self.kappa):
                raise ValueError("robin cap needs a finite kappa")
        elif self.kappa is not None:
            raise ValueError(f"{self.kind} cap takes no kappa")

    @classmethod
    def dirichlet(cls) -> "CapCondition":
        return cls("dirichlet")

    @classmethod
    def neumann(cls) -> "CapCondition":
        return cls("neumann")

    @classmethod
    def robin(cls, kappa: float) -> "CapCondition":
        return cls("robin", float(kappa))

    @property
    def robin_kappa(self) -> float | None:
        """kappa of the equivalent Robin form (Neumann is kappa = 0)."""
        if self.kind == "dirichlet":
            return None
        return 0.0 if self.kind == "neumann" else self.kappa

    def coefficients(self, a: float) -> tuple[float, float]:
        """(p, q) such that the condition reads p u(a) + q u'(a) = 0."""
        if self.kind == "dirichlet":
            return 1.0, 0.0
        return -self.robin_kappa / a, 1.0

    def satisfied_by_power(self, exponent: float, tol: float = GAMMA_TOL) -> bool:
        """Whether r^exponent satisfies the condition (at any radius)."""
        if self.kind == "dirichlet":
            return False
        return abs(exponent - self.robin_kappa) <= tol * max(1.0, abs(exponent))

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "robin":
            d["kappa"] = self.kappa
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CapCondition":
        extra = set(d) - {"kind", "kappa"}
        if extra:
            raise ValueError(f"unknown cap field(s): {sorted(extra)}")
        if "kind" not in d:
            raise ValueError("cap needs a 'kind'")
        kappa = d.get("kappa")
        return cls(d["kind"], None if kappa is None else float(kappa))


@dataclass(frozen=True)
class Channel:
    gamma: float
    mult: int

    def __post_init__(self):
        if not math.isfinite(self.gamma):
            raise ValueError("channel gamma must be finite")
        if int(self.mult) != self.mult or self.mult < 1:
            raise ValueError("channel multiplicity must be a positive integer")

    @property
    def potential_coeff(self) -> float:
        return self.gamma * (self.gamma + 1.0)

    @property
    def branch_exponents(self) -> tuple[float, float]:
        return (self.gamma + 1.0, -self.gamma)


def same_gamma(g1: float, g2: float) -> bool:
    return abs(g1 - g2) <= GAMMA_TOL * max(1.0, abs(g1))


@dataclass(frozen=True)
class Geometry:
    """Channels plus caps; per-channel overrides take precedence."""

    channels: tuple[Channel, ...]
    r0: float = 0.5
    cap_m2: CapCondition = field(default_factory=CapCondition.dirichlet)
    cap_m1: CapCondition = field(default_factory=CapCondition.dirichlet)
    cap_m2_overrides: tuple[tuple[float, CapCondition], ...] = ()
    cap_m1_overrides: tuple[tuple[float, CapCondition], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "cap_m2_overrides", tuple(self.cap_m2_overrides))
        object.__setattr__(self, "cap_m1_overrides", tuple(self.cap_m1_overrides))
        if not 0.0 < self.r0 < 1.0:
            raise ValueError("r0 must lie in (0, 1)")
        if not self.channels:
            raise ValueError("geometry needs at least one channel")
        gammas = [c.gamma for c in self.channels]
        for i, g in enumerate(gammas):
            if any(same_gamma(g, h) for h in gammas[i + 1:]):
                raise ValueError(f"duplicate channel gamma {g}")
        for g, _ in self.cap_m2_overrides + self.cap_m1_overrides:
            if not any(same_gamma(g, h) for h in gammas):
                raise ValueError(f"cap override for absent channel gamma={g}")

    def _lookup(self, overrides, default, gamma):
        for g, cap in overrides:
            if same_gamma(g, gamma):
                return cap
        return default

    def cap_m2_for(self, gamma: float) -> CapCondition:
        return self._lookup(self.cap_m2_overrides, self.cap_m2, gamma)

    def cap_m1_for(self, gamma: float) -> CapCondition:
        return self._lookup(self.cap_m1_overrides, self.cap_m1, gamma)

    def to_dict(self) -> dict:
        return {
            "channels": [[c.gamma, c.mult] for c in self.channels],
            "r0": self.r0,
            "cap_m2": self.cap_m2.to_dict(),
            "cap_m1": self.cap_m1.to_dict(),
            "cap_m2_overrides": [[g, c.to_dict()] for g, c in self.cap_m2_overrides],
            "cap_m1_overrides": [[g, c.to_dict()] for g, c in self.cap_m1_overrides],
        }


@dataclass(frozen=True)
class WDecision:
    w_members: tuple[float, ...]
    dim_ker_D2: int
    i_half: int
    dim_ker_limit: int
    t_scalar: dict[float, float] = field(default_factory=dict)

    @property
    def zero_mult(self) -> int:
        return self.dim_ker_limit + self.dim_ker_D2 + self.i_half

    def in_w(self, gamma: float) -> bool:
        return any(same_gamma(gamma, g) for g in self.w_members)


def make_channels(spectrum: Iterable, cutoff: float | None = None) -> list[Channel]:
    """One channel per distinct gamma, optionally keeping only |gamma| <= cutoff.

    ``spectrum`` holds objects with ``gamma`` and ``mult`` attributes (or
    ``(gamma, mult)`` pairs). Repeated gammas are merged.
    """
    if cutoff is not None and not cutoff > 0:
        raise ValueError("channel cutoff must be positive")
    merged: list[list] = []
    items = list(spectrum)
    if not items:
        raise ValueError("empty spectrum")
    for item in items:
        g, m = (item.gamma, item.mult) if hasattr(item, "gamma") else item
        if cutoff is not None and abs(g) > cutoff:
            continue
        for entry in merged:
            if same_gamma(entry[0], g):
                entry[1] += int(m)
                break
        else:
            merged.append([float(g), int(m)])
    merged.sort(key=lambda e: e[0])
    return [Channel(g, m) for g, m in merged]


def harmonic_basis(gamma: float):
    """The two harmonic solutions on (0, inf) with their derivatives.

    Returns two callables r -> (u, u'). For gamma = -1/2 the second one is
    r^(1/2) log r.
    """
    if same_gamma(gamma, -0.5):
        def f(r):
            return math.sqrt(r), 0.5 / math.sqrt(r)

        def g(r):
            s = math.sqrt(r)
            return s * math.log(r), (0.5 * math.log(r) + 1.0) / s

        return f, g
    p1, p2 = gamma + 1.0, -gamma

    def f(r):
        return r ** p1, p1 * r ** (p1 - 1.0)

    def g(r):
        return r ** p2, p2 * r ** (p2 - 1.0)

    return f, g


def t_scalar(ch: Channel | float, r0: float, cap: CapCondition) -> float:
    """(u' + gamma u)(1) for the cap-compatible harmonic normalised by u(1) = 1.

    The harmonic solves the channel equation at lambda = 0 on [r0, 1] and
    satisfies ``cap`` at r0. Returns ``math.inf`` when every such solution
    vanishes at r = 1.
    """
    gamma = ch.gamma if isinstance(ch, Channel) else float(ch)
    if not 0.0 < r0 < 1.0:
        raise ValueError("r0 must lie in (0, 1)")
    f, g = harmonic_basis(gamma)
    p, q = cap.coefficients(r0)
    fa, dfa = f(r0)
    ga, dga = g(r0)
    cf = p * fa + q * dfa
    cg = p * ga + q * dga
    scale = max(abs(p * fa), abs(q * dfa), abs(p * ga), abs(q * dga))
    if abs(cf) <= 1e-14 * scale and abs(cg) <= 1e-14 * scale:
        raise DegenerateCapError(f"cap {cap} annihilates both harmonics at r0={r0}")
    # the cap-compatible harmonic is cg * f - cf * g
    f1, df1 = f(1.0)
    g1, dg1 = g(1.0)
    u1 = cg * f1 - cf * g1
    du1 = cg * df1 - cf * dg1
    if abs(u1) <= 1e-14 * max(abs(cg * f1), abs(cf * g1), 1e-300):
        return math.inf
    return (du1 + gamma * u1) / u1 + 0.0


def limit_branch(gamma: float, in_w: bool) -> tuple[str, float]:
    """Branch kept at r = 0 by the limit operator and its exponent."""
    if abs(gamma) < 0.5 and in_w:
        return "r_minus_gamma", -gamma
    return "minimal", max(gamma + 1.0, -gamma)


def compute_w_decision(geom: Geometry) -> WDecision:
    w_members = []
    ker_d2 = 0
    i_half = 0
    t_values = {}
    for ch in geom.channels:
        t = t_scalar(ch, geom.r0, geom.cap_m2_for(ch.gamma))
        t_values[ch.gamma] = t
        zero = math.isfinite(t) and abs(t) <= T_ZERO_TOL
        if not zero:
            continue
        if abs(ch.gamma) < 0.5 and not same_gamma(abs(ch.gamma), 0.5):
            w_members.append(ch.gamma)
        elif same_gamma(ch.gamma, 0.5):
            i_half += ch.mult
        elif ch.gamma > 0.5:
            ker_d2 += ch.mult
    w = tuple(w_members)
    ker_limit = 0
    for ch in geom.channels:
        _, p = limit_branch(ch.gamma, any(same_gamma(ch.gamma, g) for g in w))
        if geom.cap_m1_for(ch.gamma).satisfied_by_power(p):
            ker_limit += ch.mult
    return WDecision(w, ker_d2, i_half, ker_limit, t_values)


def channels_from_pairs(pairs: Sequence[Sequence[float]]) -> tuple[Channel, ...]:
    return tuple(Channel(float(g), int(m)) for g, m in pairs)
