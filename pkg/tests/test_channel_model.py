import math

import pytest

from conespec.channel_model import (
    CapCondition,
    Channel,
    DegenerateCapError,
    Geometry,
    channels_from_pairs,
    compute_w_decision,
    limit_branch,
    make_channels,
    t_scalar,
)

D = CapCondition.dirichlet()
N = CapCondition.neumann()


def test_channel_invariants():
    for g in (-2.0, -0.5, 0.0, 0.3, 1.7):
        ch = Channel(g, 1)
        assert ch.potential_coeff == g * (g + 1.0)
        assert ch.branch_exponents == (g + 1.0, -g)
        assert Channel(-g - 1.0, 1).potential_coeff == pytest.approx(ch.potential_coeff)
    with pytest.raises(ValueError):
        Channel(0.0, 0)
    with pytest.raises(ValueError):
        Channel(math.nan, 1)


def test_cap_validation_and_round_trip():
    for cap in (D, N, CapCondition.robin(-0.5)):
        assert CapCondition.from_dict(cap.to_dict()) == cap
    with pytest.raises(ValueError):
        CapCondition("robin")
    with pytest.raises(ValueError):
        CapCondition("dirichlet", 1.0)
    with pytest.raises(ValueError):
        CapCondition.from_dict({"kind": "neumann", "extra": 1})
    assert N.satisfied_by_power(0.0)
    assert CapCondition.robin(-0.5).satisfied_by_power(-0.5)
    assert not D.satisfied_by_power(0.0)


def test_t_scalar_closed_forms():
    # gamma = 0, Neumann at r0 keeps the constant: u = 1, T = 0
    assert t_scalar(0.0, 0.5, N) == 0.0
    # gamma = 0, Dirichlet at r0: u = r - r0, T = u'(1)/u(1) = 1 / (1 - r0)
    assert t_scalar(0.0, 0.5, D) == pytest.approx(2.0)
    # Robin(-gamma) keeps r^-gamma exactly, so T = 0
    for g in (0.25, 0.5, 0.75, 2.0):
        assert abs(t_scalar(g, 0.5, CapCondition.robin(-g))) <= 1e-12
    # gamma = 1, Dirichlet: u = r^2 - r0^3 / r, T = (u' + u)(1) / u(1)
    r0 = 0.5
    u1 = 1.0 - r0 ** 3
    du1 = 2.0 + r0 ** 3
    assert t_scalar(1.0, r0, D) == pytest.approx((du1 + u1) / u1)


def test_t_scalar_gamma_minus_half_uses_log_branch():
    # gamma = -1/2: harmonics sqrt(r), sqrt(r) log r; Dirichlet at r0 gives sqrt(r) log(r / r0)
    r0 = 0.5
    u1 = math.log(1.0 / r0)
    du1 = 0.5 * u1 + 1.0
    assert t_scalar(-0.5, r0, D) == pytest.approx((du1 - 0.5 * u1) / u1)


def test_t_scalar_infinite_and_degenerate():
    # gamma = 0: u = 1 - r vanishes at 1 and has u'/u = -1/(1 - r0) = kappa/r0 at r0
    r0 = 0.5
    kappa = -r0 / (1.0 - r0)
    assert t_scalar(0.0, r0, CapCondition.robin(kappa)) == math.inf
    with pytest.raises(ValueError):
        t_scalar(0.0, 1.5, D)
    assert issubclass(DegenerateCapError, ValueError)


def test_limit_branch():
    assert limit_branch(0.25, True) == ("r_minus_gamma", -0.25)
    assert limit_branch(0.25, False) == ("minimal", 1.25)
    assert limit_branch(-2.0, True) == ("minimal", 2.0)
    assert limit_branch(0.5, True) == ("minimal", 1.5)


def test_w_decision_mixed_geometry():
    channels = channels_from_pairs([[-1, 1], [0, 1], [0.25, 1], [0.5, 2], [0.75, 1], [1, 3]])
    geom = Geometry(channels, 0.5,
                    cap_m2_overrides=((0.25, CapCondition.robin(-0.25)),
                                      (0.5, CapCondition.robin(-0.5)),
                                      (0.75, CapCondition.robin(-0.75))),
                    cap_m1_overrides=((0.25, CapCondition.robin(-0.25)),))
    w = compute_w_decision(geom)
    assert w.w_members == (0.25,)
    assert (w.i_half, w.dim_ker_D2, w.dim_ker_limit) == (2, 1, 1)
    assert w.zero_mult == 4
    assert w.in_w(0.25) and not w.in_w(0.0)


def test_w_decision_neumann_gamma_zero():
    w = compute_w_decision(Geometry((Channel(0.0, 1),), 0.5, cap_m2=N))
    assert w.in_w(0.0)
    assert w.zero_mult == 0
    w2 = compute_w_decision(Geometry((Channel(0.0, 1),), 0.5, cap_m2=N, cap_m1=N))
    assert w2.dim_ker_limit == 1


def test_make_channels_merges_and_cuts():
    chans = make_channels([(0.5, 1), (-1.0, 2), (0.5 + 1e-14, 3), (4.0, 1)], cutoff=3.0)
    assert [(c.gamma, c.mult) for c in chans] == [(-1.0, 2), (0.5, 4)]
    with pytest.raises(ValueError):
        make_channels([])


def test_geometry_override_lookup_and_dict():
    geom = Geometry((Channel(0.5, 1), Channel(1.0, 1)), 0.5,
                    cap_m2_overrides=((0.5, CapCondition.robin(-0.5)),))
    assert geom.cap_m2_for(0.5) == CapCondition.robin(-0.5)
    assert geom.cap_m2_for(1.0) == D
    d = geom.to_dict()
    assert d["cap_m2_overrides"] == [[0.5, {"kind": "robin", "kappa": -0.5}]]
