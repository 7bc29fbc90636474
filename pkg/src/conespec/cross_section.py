"""Spectral data of the cross-section and the spectrum of the cone operator A.

A cross-section is described by its dimension ``n``, Betti numbers and the
eigenvalues mu^2 of the Hodge Laplacian on coexact p-forms. From these the
eigenvalues of A are

* harmonic:  +-(p - n/2), multiplicity betti[p];
* coexact:   +-1/2 +- sqrt(mu^2 + ((n-1)/2 - p)^2), multiplicity of mu^2.

Catalog spectra are generated from lattice counts (flat tori), the scalar
spherical harmonics (round spheres, degrees 0 and n-1 only) and the Kunneth
rule for products.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

MERGE_TOL = 1e-12

_CUSTOM_KEYS = {"n", "betti", "coexact_modes", "cutoff"}


class CatalogError(ValueError):
    pass


def _same(x: float, y: float) -> bool:
    return abs(x - y) <= MERGE_TOL * max(1.0, abs(x))


def _merge_values(pairs) -> list[tuple[float, int]]:
    """Merge (value, mult) pairs whose values agree to MERGE_TOL; sorted by value."""
    out: list[list] = []
    for v, m in sorted(pairs):
        if out and _same(out[-1][0], v):
            out[-1][1] += m
        else:
            out.append([v, m])
    return [(v, m) for v, m in out]


@dataclass(frozen=True)
class CoexactMode:
    p: int
    mu_sq: float
    mult: int


@dataclass(frozen=True)
class CrossSectionSpectrum:
    """Betti numbers and coexact eigenvalues of a compact n-manifold.

    ``complete`` is False when some form degrees are not covered by the data
    (higher round spheres); downstream channel lists then miss those modes.
    """

    n: int
    betti: tuple[int, ...]
    coexact_modes: tuple[CoexactMode, ...]
    cutoff: float
    complete: bool = True
    label: str = ""

    def __post_init__(self):
        n = self.n
        if int(n) != n or n < 2:
            raise CatalogError(f"cross-section dimension must be an integer >= 2, got {n}")
        betti = tuple(int(b) for b in self.betti)
        if len(betti) != n + 1 or any(b < 0 for b in betti) or list(betti) != list(self.betti):
            raise CatalogError(f"betti must be {n + 1} non-negative integers")
        for p in range(n + 1):
            if betti[p] != betti[n - p]:
                raise CatalogError(f"betti violates Poincare duality at p={p}: {betti}")
        if not self.cutoff > 0:
            raise CatalogError("cutoff must be positive")
        modes = []
        for m in self.coexact_modes:
            m = m if isinstance(m, CoexactMode) else CoexactMode(*m)
            if int(m.p) != m.p or not 0 <= m.p <= n - 1:
                raise CatalogError(f"coexact degree {m.p} outside 0..{n - 1}")
            if not (m.mu_sq > 0 and math.isfinite(m.mu_sq)):
                raise CatalogError(f"coexact eigenvalue must be positive, got {m.mu_sq}")
            if int(m.mult) != m.mult or m.mult < 1:
                raise CatalogError(f"coexact multiplicity must be a positive integer, got {m.mult}")
            modes.append(CoexactMode(int(m.p), float(m.mu_sq), int(m.mult)))
        merged = []
        for p in range(n):
            vals = _merge_values((m.mu_sq, m.mult) for m in modes if m.p == p)
            merged.extend(CoexactMode(p, v, k) for v, k in vals)
        object.__setattr__(self, "betti", betti)
        object.__setattr__(self, "coexact_modes", tuple(merged))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "betti": list(self.betti),
            "coexact_modes": [[m.p, m.mu_sq, m.mult] for m in self.coexact_modes],
            "cutoff": self.cutoff,
            "complete": self.complete,
            "label": self.label,
        }


@dataclass(frozen=True)
class Harmonic:
    p: int
    sign: int


@dataclass(frozen=True)
class Coexact:
    p: int
    mu_sq: float
    branch: str


@dataclass(frozen=True)
class ASpectrumEntry:
    gamma: float
    mult: int
    origin: tuple = field(default=())


def coexact_gammas(n: int, p: int, mu_sq: float) -> dict[str, float]:
    root = math.sqrt(mu_sq + ((n - 1) / 2.0 - p) ** 2)
    return {"++": 0.5 + root, "+-": 0.5 - root, "-+": -0.5 + root, "--": -0.5 - root}


def build_a_spectrum(cs: CrossSectionSpectrum) -> list[ASpectrumEntry]:
    raw: list[tuple[float, int, object]] = []
    for p, b in enumerate(cs.betti):
        if b > 0:
            for sign in (1, -1):
                raw.append((sign * (p - cs.n / 2.0) + 0.0, b, Harmonic(p, sign)))
    for m in cs.coexact_modes:
        for branch, g in coexact_gammas(cs.n, m.p, m.mu_sq).items():
            raw.append((g, m.mult, Coexact(m.p, m.mu_sq, branch)))
    raw.sort(key=lambda t: t[0])
    out: list[list] = []
    for g, mult, origin in raw:
        if abs(g) > cs.cutoff * (1.0 + MERGE_TOL):
            continue
        if out and _same(out[-1][0], g):
            out[-1][1] += mult
            out[-1][2].append(origin)
        else:
            out.append([g, mult, [origin]])
    return [ASpectrumEntry(g, m, tuple(o)) for g, m, o in out]


# ---------------------------------------------------------------- catalog spectra

@dataclass
class _FormSpectra:
    """Betti numbers and coexact spectra per degree, truncated at ``top``."""

    n: int
    betti: list[int]
    coexact: dict[int, list[tuple[float, int]]]
    top: float
    complete: bool = True

    def total(self, p: int) -> list[tuple[float, int]]:
        """Full Hodge spectrum on p-forms: harmonic + coexact_p + exact_p."""
        out = []
        if 0 <= p <= self.n and self.betti[p]:
            out.append((0.0, self.betti[p]))
        out += self.coexact.get(p, [])
        out += self.coexact.get(p - 1, [])
        return _merge_values(out)


def _circle(top: float, length: float = 2.0 * math.pi) -> _FormSpectra:
    k2 = (2.0 * math.pi / length) ** 2
    modes = []
    k = 1
    while k2 * k * k <= top:
        modes.append((k2 * k * k, 2))
        k += 1
    return _FormSpectra(1, [1, 1], {0: modes}, top)


def _flat_torus(n: int, top: float, side: float = 2.0 * math.pi) -> _FormSpectra:
    scale = (2.0 * math.pi / side) ** 2
    kmax = int(math.floor(math.sqrt(top / scale)))
    counts: dict[int, int] = defaultdict(int)
    for k in itertools.product(range(-kmax, kmax + 1), repeat=n):
        s = sum(x * x for x in k)
        if 0 < s and scale * s <= top:
            counts[s] += 1
    coexact = {}
    for p in range(n):
        c = math.comb(n - 1, p)
        coexact[p] = [(scale * s, c * m) for s, m in sorted(counts.items())]
    return _FormSpectra(n, [math.comb(n, p) for p in range(n + 1)], coexact, top)


def _round_sphere(n: int, top: float) -> _FormSpectra:
    modes = []
    k = 1
    while k * (k + n - 1) <= top:
        mult = math.comb(n + k, n) - math.comb(n + k - 2, n)
        modes.append((float(k * (k + n - 1)), mult))
        k += 1
    coexact = {0: list(modes), n - 1: list(modes)}
    betti = [0] * (n + 1)
    betti[0] = betti[n] = 1
    # degrees 1..n-2 are not generated
    return _FormSpectra(n, betti, coexact, top, complete=n <= 2)


def _product(x: _FormSpectra, y: _FormSpectra) -> _FormSpectra:
    top = min(x.top, y.top)
    n = x.n + y.n
    betti = [sum(x.betti[i] * y.betti[p - i] for i in range(p + 1)
                 if i <= x.n and p - i <= y.n) for p in range(n + 1)]
    coexact: dict[int, list[tuple[float, int]]] = {}
    for p in range(n):
        total = []
        for i in range(p + 1):
            j = p - i
            if i > x.n or j > y.n:
                continue
            for u, mu in x.total(i):
                for v, mv in y.total(j):
                    if u + v <= top and u + v > 0:
                        total.append((u + v, mu * mv))
        total = _merge_values(total)
        # nonzero p-spectrum = coexact_p + exact_p and exact_p ~ coexact_{p-1}
        prev = dict(coexact.get(p - 1, []))
        out = []
        for v, m in total:
            key = next((k for k in prev if _same(k, v)), None)
            m -= prev.get(key, 0) if key is not None else 0
            if m < 0:
                raise CatalogError("inconsistent product spectrum")
            if m:
                out.append((v, m))
        coexact[p] = out
    return _FormSpectra(n, betti, coexact, top, complete=x.complete and y.complete)


def _disjoint(parts: Sequence[_FormSpectra]) -> _FormSpectra:
    n = parts[0].n
    if any(f.n != n for f in parts):
        raise CatalogError("disjoint union needs equal dimensions")
    betti = [sum(f.betti[p] for f in parts) for p in range(n + 1)]
    coexact = {p: _merge_values(itertools.chain.from_iterable(f.coexact.get(p, []) for f in parts))
               for p in range(n)}
    return _FormSpectra(n, betti, coexact, min(f.top for f in parts),
                        complete=all(f.complete for f in parts))


def _needed_top(cutoff: float) -> float:
    # the smallest |gamma| from (p, mu^2) is sqrt(mu^2 + ((n-1)/2 - p)^2) - 1/2
    return (cutoff + 0.5) ** 2


def _form_spectra(name: str, params, top: float) -> _FormSpectra:
    params = list(params) if params is not None else []
    if name == "circle":
        return _circle(top, *params[:1])
    if name == "flat_torus":
        if not params:
            raise CatalogError("flat_torus needs params [n] or [n, side]")
        n = int(params[0])
        if n < 1:
            raise CatalogError("flat_torus dimension must be >= 1")
        side = float(params[1]) if len(params) > 1 else 2.0 * math.pi
        return _flat_torus(n, top, side)
    if name == "round_sphere":
        if len(params) != 1 or int(params[0]) < 1:
            raise CatalogError("round_sphere needs params [n] with n >= 1")
        n = int(params[0])
        return _circle(top) if n == 1 else _round_sphere(n, top)
    if name == "product_spheres":
        if len(params) < 2:
            raise CatalogError("product_spheres needs params [n1, n2, ...]")
        parts = [_form_spectra("round_sphere", [int(k)], top) for k in params]
        out = parts[0]
        for f in parts[1:]:
            out = _product(out, f)
        return out
    if name == "disjoint_union":
        if not params:
            raise CatalogError("disjoint_union needs a list of [name, params] pairs")
        return _disjoint([_form_spectra(str(k), v, top) for k, v in params])
    if name == "custom_file":
        cs = load_custom_file(params[0])
        coexact = defaultdict(list)
        for m in cs.coexact_modes:
            coexact[m.p].append((m.mu_sq, m.mult))
        return _FormSpectra(cs.n, list(cs.betti), dict(coexact), math.inf)
    raise CatalogError(f"unknown catalog key {name!r}")


CATALOG_KEYS = ("circle", "flat_torus", "round_sphere", "product_spheres",
                "disjoint_union", "custom_file")


def catalog_lookup(name: str, params=None, cutoff: float = 3.0,
                   allow_incomplete: bool = False) -> CrossSectionSpectrum:
    """Cross-section spectrum from the catalog, truncated at |gamma| <= cutoff.

    Round spheres of dimension >= 3 only carry degrees 0 and n-1; they are
    refused unless ``allow_incomplete`` is set.
    """
    if name not in CATALOG_KEYS:
        raise CatalogError(f"unknown catalog key {name!r}; expected one of {CATALOG_KEYS}")
    if not cutoff > 0:
        raise CatalogError("cutoff must be positive")
    if name == "custom_file":
        cs = load_custom_file(params[0] if isinstance(params, (list, tuple)) else params)
        return CrossSectionSpectrum(cs.n, cs.betti, cs.coexact_modes, cutoff, True,
                                    label=str(params))
    fs = _form_spectra(name, params, _needed_top(cutoff))
    if fs.n < 2:
        raise CatalogError(f"{name} has dimension {fs.n}; the cross-section needs n >= 2 "
                           "(a circle can only enter as a product factor)")
    if not fs.complete and not allow_incomplete:
        raise CatalogError(f"{name}{list(params or [])}: coexact spectra for middle degrees "
                           "are not available in the catalog")
    modes = []
    for p, vals in sorted(fs.coexact.items()):
        shift = ((fs.n - 1) / 2.0 - p) ** 2
        for v, m in vals:
            if math.sqrt(v + shift) - 0.5 <= cutoff * (1.0 + MERGE_TOL):
                modes.append(CoexactMode(p, v, m))
    return CrossSectionSpectrum(fs.n, tuple(fs.betti), tuple(modes), cutoff, fs.complete,
                                label=f"{name}{list(params or [])}")


def parse_custom_text(text: str, source: str = "<text>") -> CrossSectionSpectrum:
    """Parse ``key = value`` lines (JSON values, ``#`` comments)."""
    seen: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CatalogError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CUSTOM_KEYS:
            raise CatalogError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise CatalogError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            seen[key] = json.loads(value)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"{source}:{lineno}: bad value for {key!r}: {exc.msg}") from None
    missing = {"n", "betti"} - set(seen)
    if missing:
        raise CatalogError(f"{source}: missing key(s) {sorted(missing)}")
    modes = []
    for entry in seen.get("coexact_modes", []):
        if not isinstance(entry, list) or len(entry) != 3:
            raise CatalogError(f"{source}: coexact_modes entries must be [p, mu_sq, mult]")
        modes.append(CoexactMode(*entry))
    return CrossSectionSpectrum(seen["n"], tuple(seen["betti"]), tuple(modes),
                                float(seen.get("cutoff", 3.0)), True, label=source)


def load_custom_file(path) -> CrossSectionSpectrum:
    path = Path(path)
    return parse_custom_text(path.read_text(), str(path))
