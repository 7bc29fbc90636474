"""The ten acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line that is printed in the terminal
summary. Where practical an independent scipy oracle backs the built-in check.
"""

import math
import time

import numpy as np
import pytest
from scipy import optimize, special

from conespec import verification as v
from conespec.channel_model import CapCondition, Channel, Geometry, compute_w_decision
from conespec.cross_section import CoexactMode, CrossSectionSpectrum, build_a_spectrum
from conespec.radial_solver import RadialProblem, shoot_eigenvalues
from conespec.spectra import eps_spectrum


def run(record, number, check):
    t0 = time.perf_counter()
    res = check()
    dt = time.perf_counter() - t0
    record(number, res.passed, f"{res.name} ({dt:.1f} s): {res.summary}")
    return res, dt


def cross_product_roots(nu, a, count):
    """Dirichlet-Dirichlet annulus eigenvalues from scipy J and Y."""
    def det(k):
        return special.jv(nu, k * a) * special.yv(nu, k) - special.jv(nu, k) * special.yv(nu, k * a)
    ks = np.linspace(0.05, 80.0, 40000)
    vals = det(ks)
    roots = [optimize.brentq(det, x, y, xtol=1e-15)
             for x, y, f, g in zip(ks, ks[1:], vals, vals[1:]) if f * g < 0]
    return np.square(roots[:count])


def test_criterion_01_a_spectrum_example_and_symmetry(record_criterion, seed):
    res, dt = run(record_criterion, 1, lambda: v.check_a_spectrum(seed))
    cs = CrossSectionSpectrum(2, (1, 0, 1), (CoexactMode(0, 2.0, 3),), cutoff=10.0)
    assert {e.gamma: e.mult for e in build_a_spectrum(cs)} == {-2.0: 3, -1.0: 5, 1.0: 5, 2.0: 3}
    assert res.details["asymmetric"] == 0 and res.details["samples"] == 200
    assert dt < 1.0
    assert res.passed, res.summary


def test_criterion_02_dual_solver(record_criterion):
    res, dt = run(record_criterion, 2, v.check_dual_solver)
    assert res.passed, res.summary
    assert res.details["worst"] <= 1e-6
    assert dt < 30.0
    # scipy cross-product oracle for the Dirichlet-Dirichlet combinations
    for g in v.DUAL_GAMMAS:
        shot = shoot_eigenvalues(RadialProblem.for_channel(
            g, (0.1, 1.0), CapCondition.dirichlet(), CapCondition.dirichlet(), 5))
        ref = cross_product_roots(abs(g + 0.5), 0.1, 5)
        assert np.allclose(shot, ref, rtol=1e-6), g


def test_criterion_03_analytic_eigenvalues(record_criterion):
    res, _ = run(record_criterion, 3, v.check_analytic)
    assert res.passed, res.summary
    x1 = optimize.brentq(lambda x: math.tan(x) - x, 4.0, 4.6, xtol=1e-15)
    assert res.details["lambda"] == pytest.approx(x1 * x1, rel=1e-8)
    assert res.details["interval_rel"] <= 1e-10


def test_criterion_04_w_dependence(record_criterion):
    res, _ = run(record_criterion, 4, v.check_w_dependence)
    assert res.passed, res.summary
    d, n = res.details["dirichlet"], res.details["neumann"]
    assert d["limit"] == pytest.approx([(k * math.pi) ** 2 for k in range(1, 6)], rel=1e-9)
    assert n["limit"] == pytest.approx([((k - 0.5) * math.pi) ** 2 for k in range(1, 6)], rel=1e-9)
    assert d["gap_at_1e-6"] <= 1e-3 and n["gap_at_1e-6"] <= 1e-3


def test_criterion_05_zero_multiplicity(record_criterion):
    res, _ = run(record_criterion, 5, v.check_zero_multiplicity)
    assert res.passed, res.summary
    geom = v.zero_mode_geometry()
    w = compute_w_decision(geom)
    assert (w.i_half, w.dim_ker_D2, w.dim_ker_limit) == (2, 1, 1)
    for eps in (1e-6, 1e-8):
        assert eps_spectrum(geom, eps, 12).count_below(10.0 / abs(math.log(eps))) == 4


def test_criterion_06_pseudomode_rate(record_criterion):
    res, _ = run(record_criterion, 6, v.check_pseudomode)
    assert res.passed, res.summary
    assert res.details["r2_fixed"] >= 0.99
    assert all(0.25 <= r <= 4.0 for r in res.details["ratio"])
    assert res.details["control_floor"] > 0.0


def test_criterion_07_trace_decay(record_criterion):
    res, _ = run(record_criterion, 7, v.check_trace_decay)
    assert res.passed, res.summary
    rows = res.details["results"]
    assert all(r["exponent"] >= 0.4 for r in rows if r["band"] == "power_le_m1")
    half = [r for r in rows if r["band"] == "log_half"]
    assert half and all(abs(r["exponent"] - 0.5) <= 0.05 for r in half)


def test_criterion_08_hardy(record_criterion, seed):
    res, _ = run(record_criterion, 8, lambda: v.check_hardy(seed, samples=1000))
    assert res.passed, res.summary
    assert res.details["violations"] == []


def test_criterion_09_topology(record_criterion):
    res, _ = run(record_criterion, 9, v.check_topology)
    assert res.passed, res.summary
    assert res.details["missed"] == []


def test_criterion_10_determinism_and_round_trip(record_criterion):
    res, _ = run(record_criterion, 10, v.check_determinism)
    assert res.passed, res.summary
    geom = Geometry((Channel(0.5, 2), Channel(1.0, 1)), r0=0.5,
                    cap_m2_overrides=((0.5, CapCondition.robin(-0.5)),))
    a = eps_spectrum(geom, 1e-5, 5)
    b = eps_spectrum(geom, 1e-5, 5)
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()


def test_catalog_entries_validated_by_brute_force():
    res = v.check_catalog()
    assert res.passed, res.summary


def test_full_suite_within_budget():
    t0 = time.perf_counter()
    results = v.run_checks()
    assert all(r.passed for r in results), [r.name for r in results if not r.passed]
    assert time.perf_counter() - t0 < 600.0
