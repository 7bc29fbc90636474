"""Built-in verification suite: one named check per acceptance property."""

from __future__ import annotations

import math
import os
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel_model import CapCondition, Channel, Geometry, compute_w_decision
from .convergence_lab import bump, fit_rate, hardy_check, sweep, trace_decay_check
from .cross_section import (
    CoexactMode,
    CrossSectionSpectrum,
    build_a_spectrum,
    catalog_lookup,
)
from .radial_solver import (
    BranchSelection,
    ExtrapolationWarning,
    RadialProblem,
    fd_eigenvalues,
    shoot_eigenvalues,
)
from .spectra import SpectrumReport, eps_spectrum, limit_spectrum, pseudomode_quotient
from .topology import (
    IDENTIFICATION_UNAVAILABLE,
    CohomologyInput,
    ker_dmax_dmin,
    l2_cohomology,
    load_decompositions,
    mv_check,
    predict_small_eigenvalues,
)

DUAL_GAMMAS = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)
DUAL_RTOL = 1e-6


def seed_from_env(default: int = 0) -> int:
    """Seed for randomised checks, taken from CONESPEC_SEED when set."""
    raw = os.environ.get("CONESPEC_SEED")
    return default if raw in (None, "") else int(raw)


@dataclass
class CheckResult:
    name: str
    criterion: int | None
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "criterion": self.criterion, "passed": self.passed,
                "summary": self.summary, "details": self.details}


def _robin(k: float) -> CapCondition:
    return CapCondition.robin(k)


def _dirichlet() -> CapCondition:
    return CapCondition.dirichlet()


def zero_mode_geometry() -> Geometry:
    """Channels 1/2 (mult 2), 3/4 and 1/4 with caps giving zero_mult = 2 + 1 + 1.

    Extra Dirichlet channels at -1, 0 and 1 only add eigenvalues of order one.
    """
    channels = (Channel(-1.0, 1), Channel(0.0, 1), Channel(0.25, 1), Channel(0.5, 2),
                Channel(0.75, 1), Channel(1.0, 3))
    return Geometry(channels, r0=0.5, cap_m2=_dirichlet(), cap_m1=_dirichlet(),
                    cap_m2_overrides=((0.25, _robin(-0.25)), (0.5, _robin(-0.5)),
                                      (0.75, _robin(-0.75))),
                    cap_m1_overrides=((0.25, _robin(-0.25)),))


# ---------------------------------------------------------------- 1

def random_cross_section(rng: np.random.Generator) -> CrossSectionSpectrum:
    n = int(rng.integers(2, 7))
    half = [int(rng.integers(0, 4)) for _ in range(n // 2 + 1)]
    half[0] = max(half[0], 1)
    betti = [half[min(p, n - p)] for p in range(n + 1)]
    modes = []
    for _ in range(int(rng.integers(0, 6))):
        modes.append(CoexactMode(int(rng.integers(0, n)), float(rng.uniform(0.05, 30.0)),
                                 int(rng.integers(1, 5))))
    return CrossSectionSpectrum(n, tuple(betti), tuple(modes), cutoff=float(rng.uniform(1.0, 8.0)))


def check_a_spectrum(seed: int | None = None, samples: int = 200) -> CheckResult:
    t0 = time.perf_counter()
    cs = CrossSectionSpectrum(2, (1, 0, 1), (CoexactMode(0, 2.0, 3),), cutoff=10.0)
    got = [(e.gamma, e.mult) for e in build_a_spectrum(cs)]
    expected = [(-2.0, 3), (-1.0, 5), (1.0, 5), (2.0, 3)]
    rng = np.random.default_rng(seed_from_env() if seed is None else seed)
    asym = 0
    for _ in range(samples):
        spec = {e.gamma: e.mult for e in build_a_spectrum(random_cross_section(rng))}
        if any(spec.get(-g) != m for g, m in spec.items()):
            asym += 1
    dt = time.perf_counter() - t0
    ok = got == expected and asym == 0 and dt < 1.0
    return CheckResult("a-spectrum", 1, ok,
                       f"example {got}; {asym}/{samples} asymmetric; {dt:.2f} s",
                       {"example": got, "asymmetric": asym, "samples": samples})


# ---------------------------------------------------------------- 2

def dual_cap_set(gamma: float) -> list[tuple[str, CapCondition]]:
    return [("D", _dirichlet()), ("N", CapCondition.neumann()),
            (f"R({-gamma + 0.0:g})", _robin(-gamma)), ("R(0.7)", _robin(0.7))]


def dual_solver_disagreements(gammas=DUAL_GAMMAS, interval=(0.1, 1.0), count: int = 5,
                              rtol: float = DUAL_RTOL) -> tuple[list[dict], float]:
    """Compare shooting against extrapolated finite differences; return failures."""
    failures = []
    worst = 0.0
    for g in gammas:
        caps = dual_cap_set(g)
        for lname, left in caps:
            for rname, right in caps:
                p = RadialProblem.for_channel(g, interval, left, right, count)
                shot = shoot_eigenvalues(p)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", ExtrapolationWarning)
                    fd = [x for x, _ in fd_eigenvalues(p)]
                for k, (a, b) in enumerate(zip(shot, fd)):
                    rel = abs(a - b) / max(abs(a), 1.0)
                    worst = max(worst, rel)
                    if rel > rtol:
                        failures.append({"gamma": g, "left": lname, "right": rname, "k": k + 1,
                                         "shooting": a, "fd": b, "rel": rel})
    return failures, worst


def check_dual_solver(gammas=DUAL_GAMMAS) -> CheckResult:
    t0 = time.perf_counter()
    failures, worst = dual_solver_disagreements(gammas)
    dt = time.perf_counter() - t0
    if failures:
        names = sorted({f"gamma={f['gamma']:g} [{f['left']},{f['right']}]" for f in failures})
        summary = f"{len(failures)} disagreements; channels: {', '.join(names)}"
    else:
        summary = f"worst relative gap {worst:.2e}; {dt:.1f} s"
    ok = not failures and dt < 30.0
    return CheckResult("dual-solver", 2, ok, summary,
                       {"worst": worst, "failures": failures[:20]})


# ---------------------------------------------------------------- 3

def first_tan_root() -> float:
    """Smallest positive root of tan x = x, by Newton on sin x - x cos x."""
    x = 4.49
    for _ in range(50):
        f = math.sin(x) - x * math.cos(x)
        step = f / (x * math.sin(x))
        x -= step
        if abs(step) < 1e-16 * x:
            break
    return x


def check_analytic() -> CheckResult:
    worst = 0.0
    for eps in (1e-2, 1e-4):
        a = eps / 2.0
        p = RadialProblem.for_channel(0.0, (a, 1.0), _dirichlet(), _dirichlet(), 5)
        for k, lam in enumerate(shoot_eigenvalues(p), start=1):
            ref = (k * math.pi / (1.0 - a)) ** 2
            worst = max(worst, abs(lam - ref) / ref)
    x1 = first_tan_root()
    p = RadialProblem.for_channel(1.0, (0.0, 1.0), BranchSelection("minimal"), _dirichlet(), 1)
    lam = shoot_eigenvalues(p)[0]
    rel1 = abs(lam - x1 * x1) / (x1 * x1)
    ok = worst <= 1e-10 and rel1 <= 1e-8
    return CheckResult("analytic", 3, ok,
                       f"interval gap {worst:.1e}; tan-root gap {rel1:.1e}",
                       {"interval_rel": worst, "tan_root_rel": rel1, "lambda": lam, "x1_sq": x1 * x1})


# ---------------------------------------------------------------- 4

def check_w_dependence(threads: int = 1) -> CheckResult:
    eps_list = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    out = {}
    ok = True
    for name, cap, ref in (("dirichlet", _dirichlet(), lambda k: (k * math.pi) ** 2),
                           ("neumann", CapCondition.neumann(),
                            lambda k: ((k - 0.5) * math.pi) ** 2)):
        geom = Geometry((Channel(0.0, 1),), r0=0.5, cap_m2=cap, cap_m1=_dirichlet())
        table = sweep(geom, eps_list, 5, threads)
        lim = table.limit.expanded()[:5]
        closed = max(abs(x - ref(k)) / ref(k) for k, x in enumerate(lim, start=1))
        at_small = max(abs(table.value(1e-6, k) - lim[k - 1]) / lim[k - 1] for k in range(1, 6))
        monotone = all(
            all(b <= a for a, b in zip(col, col[1:]))
            for col in (table.column(k) for k in range(1, 6)))
        out[name] = {"limit": lim, "closed_form_gap": closed, "gap_at_1e-6": at_small,
                     "monotone": monotone}
        ok &= closed <= 1e-9 and at_small <= 1e-3 and monotone
    differ = all(abs(a - b) > 1.0 for a, b in zip(out["dirichlet"]["limit"], out["neumann"]["limit"]))
    ok &= differ
    return CheckResult("w-dependence", 4, ok,
                       "gap at eps=1e-6: D {:.1e}, N {:.1e}; limits differ: {}".format(
                           out["dirichlet"]["gap_at_1e-6"], out["neumann"]["gap_at_1e-6"], differ),
                       out)


# ---------------------------------------------------------------- 5

def check_zero_multiplicity(threads: int = 1) -> CheckResult:
    geom = zero_mode_geometry()
    w = compute_w_decision(geom)
    counts = {}
    for eps in (1e-6, 1e-8):
        rep = eps_spectrum(geom, eps, count=12, threads=threads)
        counts[eps] = rep.count_below(10.0 / abs(math.log(eps)))
    parts = (w.i_half, w.dim_ker_D2, w.dim_ker_limit)
    ok = parts == (2, 1, 1) and all(c == w.zero_mult for c in counts.values())
    return CheckResult("zero-multiplicity", 5, ok,
                       f"zero_mult {w.zero_mult} = {parts[0]}+{parts[1]}+{parts[2]}; counts "
                       + ", ".join(f"{c} at eps={e:g}" for e, c in counts.items()),
                       {"zero_mult": w.zero_mult, "parts": list(parts),
                        "counts": {repr(e): c for e, c in counts.items()}})


# ---------------------------------------------------------------- 6

def _r2(y: np.ndarray, pred: np.ndarray) -> float:
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot if ss_tot > 0 else 1.0


def check_pseudomode() -> CheckResult:
    geom = zero_mode_geometry()
    eps = np.array([10.0 ** -k for k in range(2, 9)])
    logs = np.abs(np.log(eps))
    q = np.array([pseudomode_quotient(geom, e).rayleigh for e in eps])
    # c / |log eps| fitted in log space with the exponent pinned to 1
    c = math.exp(float(np.mean(np.log(q * logs))))
    r2_fixed = _r2(np.log(q), np.log(c / logs))
    free = fit_rate(1, 0.0, eps, q)
    lam1 = np.array([shoot_eigenvalues(RadialProblem.for_channel(
        0.5, (e * geom.r0, 1.0), geom.cap_m2_for(0.5), geom.cap_m1_for(0.5), 1))[0] for e in eps])
    ratio = lam1 * logs / c
    within4 = bool(np.all((ratio >= 0.25) & (ratio <= 4.0)))
    control = np.array([pseudomode_quotient(geom, e, 0.25).rayleigh for e in eps])
    a = np.column_stack([np.ones_like(logs), 1.0 / logs])
    (floor, slope), *_ = np.linalg.lstsq(a, control, rcond=None)
    floor_ok = bool(floor > 0.0 and np.all(control >= 0.99 * floor))
    ok = r2_fixed >= 0.99 and free.r_squared >= 0.99 and within4 and floor_ok
    return CheckResult("pseudomode", 6, ok,
                       f"c={c:.3f} R2={r2_fixed:.4f}; eigenvalue ratio {ratio.min():.2f}..{ratio.max():.2f}; "
                       f"control floor {floor:.3f}",
                       {"c": c, "r2_fixed": r2_fixed, "free_fit": free.to_dict(),
                        "ratio": ratio.tolist(), "control_floor": float(floor),
                        "control": control.tolist()})


# ---------------------------------------------------------------- 7

def trace_geometry() -> Geometry:
    channels = (Channel(-2.0, 1), Channel(-1.0, 1), Channel(-0.75, 1), Channel(0.0, 1),
                Channel(0.5, 2))
    return Geometry(channels, r0=0.5, cap_m2_overrides=((0.5, _robin(-0.5)),))


def check_trace_decay() -> CheckResult:
    results = trace_decay_check(trace_geometry())
    l1 = [r for r in results if r.band == "power_le_m1"]
    half = [r for r in results if r.band == "log_half"]
    ok = bool(l1 and half and all(r.holds for r in results)
              and all(r.exponent >= 0.4 for r in l1)
              and all(abs(r.exponent - 0.5) <= 0.05 for r in half))
    return CheckResult("trace-decay", 7, ok,
                       "; ".join(f"gamma={r.gamma:g} {r.band} exponent {r.exponent:.3f}" for r in results),
                       {"results": [{"band": r.band, "gamma": r.gamma, "exponent": r.exponent,
                                     "r_squared": r.r_squared, "holds": r.holds} for r in results]})


# ---------------------------------------------------------------- 8

HARDY_LAMBDAS = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)


def check_hardy(seed: int | None = None, samples: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed_from_env() if seed is None else seed)
    violations = []
    for i in range(samples):
        width = float(rng.uniform(0.05, 10.0))
        center = math.e + width + float(rng.uniform(1e-3, 40.0))
        amp = float(rng.uniform(-5.0, 5.0))
        v, dv = bump(center, width, amp)
        for lam in HARDY_LAMBDAS:
            res = hardy_check(lam, v, dv, (center - width, center + width))
            if not res.holds:
                violations.append({"sample": i, "lambda": lam, "lhs": res.lhs, "rhs": res.rhs})
    ok = not violations
    return CheckResult("hardy", 8, ok,
                       f"{len(violations)} violations in {samples} x {len(HARDY_LAMBDAS)}",
                       {"violations": violations[:20]})


# ---------------------------------------------------------------- 9

def _l2_case_ok(inp: CohomologyInput) -> bool:
    for k in range(inp.m + 1):
        if 2 * k < inp.n + 1:
            want = inp.relative_betti_M2[k]
        elif 2 * k == inp.n + 1:
            want = inp.image_rank_mid
        else:
            want = inp.betti_M2[k]
        if l2_cohomology(inp, k) != want:
            return False
    return True


PREDICTION_TABLE = (
    # (n1, n2) -> gamma, domain, boundary case, target: degrees
    ((1, 1), 0.0, "W", False, {"S^3": (1, 2)}),
    ((2, 2), 0.0, "W", False, {"S^5": (2, 3)}),
    ((3, 3), 0.0, "W", False, {"S^7": (3, 4)}),
    ((2, 1), -0.5, "minimal", True, {"S^4": (1, 3), "S^2 x S^2": (1, 3)}),
    ((3, 1), -1.0, "minimal", False, {"S^5": (1, 4), "S^3 x S^2": (1, 4)}),
    ((4, 0), -2.0, "minimal", False, {"S^5": (0, 5), "S^4 x S^1": (0, 5)}),
)


def check_topology() -> CheckResult:
    catalog = load_decompositions()
    l2_ok = all(_l2_case_ok(c) for c in catalog)
    mv_ok = all(mv_check(c).consistent for c in catalog)
    missed = []
    for c in catalog:
        for f in ("betti_M1", "betti_M2", "betti_Sigma", "betti_M", "relative_betti_M2"):
            for i, x in enumerate(getattr(c, f)):
                if mv_check(c.replace(f, i, x + 1)).consistent:
                    missed.append(f"{c.name}:{f}[{i}]")
    pred_ok = True
    for (n1, n2), gamma, domain, boundary, targets in PREDICTION_TABLE:
        p = predict_small_eigenvalues(n1, n2)
        got = {x.target: x.degrees for x in p.predictions}
        dual = all(p.m - k in x.degrees for x in p.predictions for k in x.degrees)
        pred_ok &= (p.gamma == gamma and p.domain == domain and p.boundary_case == boundary
                    and got == targets and dual and all(x.forcing_holds for x in p.predictions))
    zero_ok = mv_check(CohomologyInput.zero(4)).consistent
    s2xs2 = next(c for c in catalog if c.m % 2 == 1 and c.betti_Sigma[(c.m - 1) // 2] > 0)
    ih_ok = ker_dmax_dmin(s2xs2, (s2xs2.m - 1) // 2) == IDENTIFICATION_UNAVAILABLE
    ok = l2_ok and mv_ok and not missed and pred_ok and zero_ok and ih_ok
    return CheckResult("topology", 9, ok,
                       f"{len(catalog)} decompositions; l2 cases {l2_ok}; mv {mv_ok}; "
                       f"undetected perturbations {len(missed)}; predictions {pred_ok}",
                       {"missed": missed[:20]})


# ---------------------------------------------------------------- 10

def check_determinism() -> CheckResult:
    geom = zero_mode_geometry()
    eps_list = (1e-2, 1e-3, 1e-4, 1e-5)
    first = sweep(geom, eps_list, 6).to_csv()
    second = sweep(geom, eps_list, 6).to_csv()
    rep = eps_spectrum(geom, 1e-3, 8)
    lim = limit_spectrum(geom, count=8)
    trips = all(SpectrumReport.from_csv(r.to_csv()) == r and SpectrumReport.from_json(r.to_json()) == r
                for r in (rep, lim))
    ok = first == second and trips
    return CheckResult("determinism", 10, ok,
                       f"sweep CSV identical: {first == second}; report round trips: {trips}", {})


# ---------------------------------------------------------------- catalog oracle

def check_catalog() -> CheckResult:
    from .oracles import lattice_reference, sphere2_function_spectrum, torus_function_spectrum

    cs = catalog_lookup("round_sphere", [2], cutoff=3.0)
    top = 12.5
    cat = [(m.mu_sq, m.mult) for m in cs.coexact_modes if m.p == 0 and m.mu_sq <= top]
    brute = sphere2_function_spectrum(top)
    sphere_ok = (len(cat) == len(brute)
                 and all(abs(a - b) <= 1e-6 * b and ma == mb
                         for (a, ma), (b, mb) in zip(cat, brute)))
    tor = catalog_lookup("flat_torus", [2], cutoff=3.0)
    tcat = [(m.mu_sq, m.mult) for m in tor.coexact_modes if m.p == 0 and m.mu_sq <= 10.0]
    tb = torus_function_spectrum(2, 10.0)
    torus_ok = (len(tcat) == len(tb) == len(lattice_reference(2, 10.0))
                and all(abs(a - b) <= 1e-8 * b and ma == mb for (a, ma), (b, mb) in zip(tcat, tb)))
    ok = sphere_ok and torus_ok and tor.betti == (1, 2, 1)
    return CheckResult("catalog", None, ok,
                       f"round sphere vs brute force {sphere_ok}; flat torus vs Fourier {torus_ok}",
                       {"sphere": brute, "torus": tb})


CHECKS: dict[str, Callable[[], CheckResult]] = {
    "a-spectrum": check_a_spectrum,
    "dual-solver": check_dual_solver,
    "analytic": check_analytic,
    "w-dependence": check_w_dependence,
    "zero-multiplicity": check_zero_multiplicity,
    "pseudomode": check_pseudomode,
    "trace-decay": check_trace_decay,
    "hardy": check_hardy,
    "topology": check_topology,
    "determinism": check_determinism,
    "catalog": check_catalog,
}


# older names accepted by --only
ALIASES = {"theorem-a": "w-dependence", "theorem-b": "zero-multiplicity"}


def run_checks(only: list[str] | None = None) -> list[CheckResult]:
    names = list(CHECKS) if not only else [ALIASES.get(n, n) for n in only]
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s) {unknown}; available: {list(CHECKS)}")
    results = []
    for name in names:
        t0 = time.perf_counter()
        try:
            res = CHECKS[name]()
        except Exception as exc:  # a crashing check is a failed check
            res = CheckResult(name, None, False, f"raised {type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
