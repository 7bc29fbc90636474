import math
import warnings

import numpy as np
import pytest
from scipy import integrate, optimize, special

from conespec.channel_model import CapCondition
from conespec.radial_solver import (
    BranchSelection,
    ExtrapolationWarning,
    RadialProblem,
    eigenfunction,
    eigenfunction_norm,
    eigenvalue_count,
    fd_eigenvalues,
    shoot_eigenvalues,
)

D = CapCondition.dirichlet()
N = CapCondition.neumann()


def bessel_zeros(nu, k):
    """First k positive zeros of J_nu from scipy, by bracketing sign changes."""
    xs = np.linspace(0.1, 60.0, 6000)
    v = special.jv(nu, xs)
    out = []
    for a, b, fa, fb in zip(xs, xs[1:], v, v[1:]):
        if fa * fb < 0:
            out.append(optimize.brentq(lambda x: special.jv(nu, x), a, b, xtol=1e-15))
        if len(out) == k:
            break
    return np.array(out)


@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.0, 2.0, 3.5])
def test_full_interval_minimal_branch_is_bessel_zeros(gamma):
    p = RadialProblem.for_channel(gamma, (0.0, 1.0), BranchSelection("minimal"), D, 4)
    ref = bessel_zeros(gamma + 0.5, 4) ** 2
    assert np.allclose(shoot_eigenvalues(p), ref, rtol=1e-10)


def test_negative_gamma_minimal_uses_larger_exponent():
    # gamma = -2 has the same potential as gamma = 1; minimal keeps r^2 either way
    a = shoot_eigenvalues(RadialProblem.for_channel(-2.0, (0.0, 1.0), BranchSelection("minimal"), D, 3))
    b = shoot_eigenvalues(RadialProblem.for_channel(1.0, (0.0, 1.0), BranchSelection("minimal"), D, 3))
    assert np.allclose(a, b, rtol=1e-12)


def test_r_minus_gamma_branch_gamma_zero_is_neumann_like():
    # r^0 at the tip: the eigenfunctions are cos with u(1) = 0 shifted... u = cos(k r)? no:
    # for gamma = 0 the kept branch is the constant, so u'(0) = 0 and u(1) = 0
    p = RadialProblem.for_channel(0.0, (0.0, 1.0), BranchSelection("r_minus_gamma"), D, 4)
    ref = [((k - 0.5) * math.pi) ** 2 for k in range(1, 5)]
    assert np.allclose(shoot_eigenvalues(p), ref, rtol=1e-10)


def test_r_minus_gamma_requires_open_band():
    with pytest.raises(ValueError):
        RadialProblem.for_channel(0.75, (0.0, 1.0), BranchSelection("r_minus_gamma"), D)


def test_dirichlet_dirichlet_gamma_zero():
    for a in (0.3, 0.01):
        p = RadialProblem.for_channel(0.0, (a, 1.0), D, D, 5)
        ref = [(k * math.pi / (1.0 - a)) ** 2 for k in range(1, 6)]
        assert np.allclose(shoot_eigenvalues(p), ref, rtol=1e-11)


def test_cross_product_oracle_on_annulus():
    # gamma = 1.5 is Bessel order 2 after u = sqrt(r) J
    nu = 2.0
    a = 0.2

    def det(k):
        return special.jv(nu, k * a) * special.yv(nu, k) - special.jv(nu, k) * special.yv(nu, k * a)

    ks = np.linspace(0.5, 30, 5000)
    vals = det(ks)
    roots = [optimize.brentq(det, x, y, xtol=1e-14) for x, y, f, g in zip(ks, ks[1:], vals, vals[1:])
             if f * g < 0][:4]
    p = RadialProblem.for_channel(1.5, (a, 1.0), D, D, 4)
    assert np.allclose(shoot_eigenvalues(p), np.square(roots), rtol=1e-10)


def test_scaling_law():
    p = RadialProblem.for_channel(0.7, (0.1, 1.0), CapCondition.robin(-0.3), N, 4)
    for s in (0.5, 3.0):
        scaled = shoot_eigenvalues(p.scaled(s))
        assert np.allclose(np.array(scaled) * s * s, shoot_eigenvalues(p), rtol=1e-9)


def test_interlacing_dirichlet_vs_neumann_right_end():
    left = CapCondition.robin(0.2)
    d = shoot_eigenvalues(RadialProblem.for_channel(1.0, (0.1, 1.0), left, D, 5))
    n = shoot_eigenvalues(RadialProblem.for_channel(1.0, (0.1, 1.0), left, N, 6))
    for k in range(5):
        assert n[k] < d[k] < n[k + 1]


def test_positive_for_dirichlet_and_positive_potential():
    for g in (-2.0, 0.0, 1.0):
        ev = shoot_eigenvalues(RadialProblem.for_channel(g, (0.05, 1.0), D, D, 3))
        assert ev[0] > 0.0


def test_positive_robin_at_outer_end_gives_negative_eigenvalue():
    # u'(1) = 5 u(1) with u'(1/2) = 0: u = cosh(s (r - 1/2)), s tanh(s/2) = 5, lambda = -s^2
    s = optimize.brentq(lambda s: s * math.tanh(0.5 * s) - 5.0, 1.0, 20.0, xtol=1e-15)
    ev = shoot_eigenvalues(RadialProblem.for_channel(0.0, (0.5, 1.0), N, CapCondition.robin(5.0), 2))
    assert ev[0] == pytest.approx(-s * s, rel=1e-10)
    assert ev[1] > 0.0


def test_oscillation_count_brackets_eigenvalues():
    p = RadialProblem.for_channel(0.5, (0.1, 1.0), D, N, 5)
    ev = shoot_eigenvalues(p)
    for k, lam in enumerate(ev):
        assert eigenvalue_count(p, lam - 1e-6 * lam) == k
        assert eigenvalue_count(p, lam + 1e-6 * lam) == k + 1


def test_eigenfunction_satisfies_right_condition_and_ode():
    p = RadialProblem.for_channel(0.5, (0.1, 1.0), D, N, 3)
    for lam in shoot_eigenvalues(p):
        u, du = eigenfunction(p, lam, [0.1, 1.0])
        scale = float(np.max(np.abs(eigenfunction(p, lam, np.linspace(0.1, 1.0, 50))[0])))
        assert abs(u[0]) <= 1e-10 * scale
        assert abs(du[1]) <= 1e-7 * scale * math.sqrt(lam)
    # ODE residual by finite differences at an interior point
    lam = shoot_eigenvalues(p)[1]
    h = 1e-4
    r = 0.37
    u = eigenfunction(p, lam, [r - h, r, r + h])[0]
    upp = (u[0] - 2 * u[1] + u[2]) / h ** 2
    assert -upp + 0.75 / r ** 2 * u[1] == pytest.approx(lam * u[1], rel=1e-5)


def test_eigenfunction_norm_against_scipy_quad():
    p = RadialProblem.for_channel(1.0, (0.2, 1.0), D, D, 2)
    lam = shoot_eigenvalues(p)[1]
    ref, _ = integrate.quad(lambda r: eigenfunction(p, lam, r)[0][0] ** 2, 0.2, 1.0,
                            epsabs=0, epsrel=1e-12, limit=200)
    assert eigenfunction_norm(p, lam) == pytest.approx(math.sqrt(ref), rel=1e-9)


def test_eigenfunction_norm_at_tip():
    p = RadialProblem.for_channel(1.0, (0.0, 1.0), BranchSelection("minimal"), D, 1)
    lam = shoot_eigenvalues(p)[0]
    ref, _ = integrate.quad(lambda r: eigenfunction(p, lam, r)[0][0] ** 2, 1e-9, 1.0,
                            epsabs=0, epsrel=1e-12, limit=200)
    assert eigenfunction_norm(p, lam) == pytest.approx(math.sqrt(ref), rel=1e-8)


@pytest.mark.parametrize("gamma,left", [(-1.0, D), (0.5, N), (2.0, CapCondition.robin(0.7)),
                                        (0.0, CapCondition.robin(0.0))])
def test_finite_differences_agree_with_shooting(gamma, left):
    p = RadialProblem.for_channel(gamma, (0.1, 1.0), left, D, 4)
    shot = shoot_eigenvalues(p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExtrapolationWarning)
        fd = fd_eigenvalues(p)
    for s, (f, err) in zip(shot, fd):
        assert abs(s - f) <= 1e-6 * max(abs(s), 1.0)
        assert err < 1e-4 * max(abs(s), 1.0)


@pytest.mark.parametrize("gamma,branch,nu", [(1.0, "minimal", 1.5), (0.25, "minimal", 0.75),
                                              (-0.25, "r_minus_gamma", -0.25),
                                              (0.25, "r_minus_gamma", -0.75)])
def test_tip_problems_match_bessel_zeros(gamma, branch, nu):
    # the kept branch is sqrt(r) J_nu(k r); eigenvalues are squared zeros of J_nu
    p = RadialProblem.for_channel(gamma, (0.0, 1.0), BranchSelection(branch), D, 2)
    ref = bessel_zeros(nu, 2) ** 2
    assert np.allclose(shoot_eigenvalues(p), ref, rtol=1e-10)


def test_finite_differences_at_tip_within_twice_error_estimate():
    # the Richardson difference is an estimate, not a bound
    for gamma, branch, tight in ((1.0, "minimal", 1e-9), (-0.25, "r_minus_gamma", 1e-7),
                                 (0.25, "r_minus_gamma", None)):
        p = RadialProblem.for_channel(gamma, (0.0, 1.0), BranchSelection(branch), D, 2)
        shot = shoot_eigenvalues(p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExtrapolationWarning)
            fd = fd_eigenvalues(p)
        for s, (f, err) in zip(shot, fd):
            assert abs(s - f) <= 2.0 * err
            if tight is not None:
                assert abs(s - f) <= tight * s


def test_problem_validation():
    with pytest.raises(ValueError):
        RadialProblem(-1.0, (0.1, 1.0), D, D)
    with pytest.raises(ValueError):
        RadialProblem.for_channel(0.0, (1.0, 0.5), D, D)
    with pytest.raises(ValueError):
        RadialProblem.for_channel(0.0, (0.0, 1.0), D, D)
    with pytest.raises(ValueError):
        RadialProblem.for_channel(0.0, (0.1, 1.0), BranchSelection("minimal"), D)
    with pytest.raises(ValueError):
        RadialProblem(2.0, (0.1, 1.0), D, D, gamma=0.5)
    with pytest.raises(ValueError):
        BranchSelection("other")
