import dataclasses
import itertools

import pytest

from conespec.topology import (
    IDENTIFICATION_UNAVAILABLE,
    CohomologyInput,
    ker_dmax_dmin,
    l2_cohomology,
    load_decompositions,
    mv_check,
    predict_small_eigenvalues,
)

CATALOG = load_decompositions()


# independent Betti bookkeeping for the catalog entries
def sphere(k, dim=None):
    dim = k if dim is None else dim
    b = [0] * (dim + 1)
    b[0] += 1
    b[k] += 1
    return b


def times(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for (i, x), (j, y) in itertools.product(enumerate(a), enumerate(b)):
        out[i + j] += x * y
    return out


def pad(b, length):
    return list(b) + [0] * (length - len(b))


def scale(c, b):
    return [c * x for x in b]


def expected(name):
    if name.startswith("sphere_"):
        a, b = (int(x) for x in name.split("_")[1:])
        m = a + b + 1
        return m, pad(sphere(b), m + 1), pad(sphere(a), m + 1), times(sphere(a), sphere(b)), sphere(m)
    if name.startswith("product_"):
        a, c = (int(x) for x in name.split("_")[1:])
        m = a + c
        sig = scale(2, times(sphere(a), sphere(c - 1)))
        m1 = times(sphere(a), sphere(c - 1)) if c > 1 else scale(2, sphere(a))
        return m, pad(m1, m + 1), pad(scale(2, sphere(a)), m + 1), sig, times(sphere(a), sphere(c))
    # connected_sum_{L}x_S{k}xS{l}: S^(k-1) x (S^(l+1) minus L+1 balls) u (L+1) D^k x S^l
    head, spec = name.split("x_S")
    count = int(head.rsplit("_", 1)[1])
    k, l = (int(x) for x in spec.split("xS"))
    m = k + l
    punctured = [1] + [0] * l
    punctured[l] = count
    m1 = times(sphere(k - 1), punctured)
    m2 = scale(count + 1, sphere(l))
    sig = scale(count + 1, times(sphere(k - 1), sphere(l)))
    total = [0] * (m + 1)
    total[0] = total[m] = 1
    total[k] += count
    total[l] += count
    return m, pad(m1, m + 1), pad(m2, m + 1), sig, total


@pytest.mark.parametrize("entry", CATALOG, ids=lambda c: c.name)
def test_catalog_matches_kunneth(entry):
    m, m1, m2, sig, total = expected(entry.name)
    assert entry.m == m
    assert list(entry.betti_M1) == m1
    assert list(entry.betti_M2) == m2
    assert list(entry.betti_Sigma) == sig
    assert list(entry.betti_M) == total
    assert list(entry.relative_betti_M2) == [m2[m - k] for k in range(m + 1)]


@pytest.mark.parametrize("entry", CATALOG, ids=lambda c: c.name)
def test_catalog_is_consistent_and_perturbations_are_caught(entry):
    rep = mv_check(entry)
    assert rep.consistent and rep.euler_defect == 0
    for f in ("betti_M1", "betti_M2", "betti_Sigma", "betti_M", "relative_betti_M2"):
        for i, x in enumerate(getattr(entry, f)):
            assert not mv_check(entry.replace(f, i, x + 1)).consistent, (f, i)
            if x > 0:
                assert not mv_check(entry.replace(f, i, x - 1)).consistent, (f, i)


def test_l2_cohomology_three_cases():
    s = next(c for c in CATALOG if c.name == "connected_sum_2x_S2xS3")
    # m = 5, n = 4: k < 5/2 relative, k > 5/2 absolute
    assert [l2_cohomology(s, k) for k in range(6)] == [
        s.relative_betti_M2[0], s.relative_betti_M2[1], s.relative_betti_M2[2],
        s.betti_M2[3], s.betti_M2[4], s.betti_M2[5]]
    odd = next(c for c in CATALOG if c.name == "product_2_2")
    # n = 3 odd: the middle degree k = 2 uses the image rank
    assert l2_cohomology(odd, 2) == odd.image_rank_mid == 0
    with pytest.raises(ValueError):
        l2_cohomology(dataclasses.replace(odd, image_rank_mid=None), 2)
    with pytest.raises(ValueError):
        l2_cohomology(odd, 9)


def test_intersection_identification():
    s = next(c for c in CATALOG if c.name == "sphere_2_1")  # n = 3
    assert ker_dmax_dmin(s, 0) == s.betti_M1[0]
    assert ker_dmax_dmin(s, 1) == s.betti_M1[1]
    assert ker_dmax_dmin(s, 2) == IDENTIFICATION_UNAVAILABLE
    assert ker_dmax_dmin(s, 3) == s.betti_M1[1]
    even = next(c for c in CATALOG if c.name == "sphere_1_1")  # n = 2, H^1(T^2) != 0
    assert all(ker_dmax_dmin(even, p) == IDENTIFICATION_UNAVAILABLE for p in range(4))
    plain = next(c for c in CATALOG if c.name == "sphere_2_0")  # n = 2, Sigma = 2 S^2, M1 = 2 D^3
    assert [ker_dmax_dmin(plain, p) for p in range(4)] == [2, 0, 0, 2]


def test_input_validation_and_zero():
    assert mv_check(CohomologyInput.zero(5)).consistent
    with pytest.raises(ValueError):
        CohomologyInput(3, [1] * 3, [1] * 4, [1] * 3, [1] * 4, [1] * 4)
    with pytest.raises(ValueError):
        CohomologyInput(3, [1] * 4, [1] * 4, [1] * 3, [1] * 4, [-1] * 4)
    with pytest.raises(ValueError):
        CohomologyInput.from_dict({**CATALOG[0].to_dict(), "bogus": 1})
    assert CohomologyInput.from_dict(CATALOG[0].to_dict()) == CATALOG[0]


def test_mv_reports_impossible_term():
    s = next(c for c in CATALOG if c.name == "sphere_1_1")
    # b_1(M) = 3 cannot inject into H^1(M1) + H^1(M2) = 2 after the zero connecting map
    rep = mv_check(s.replace("betti_M", 1, 3).replace("betti_M", 2, 3))
    assert not rep.consistent
    assert rep.impossible_terms[0] == "H^1(M1)+H^1(M2)"
    # S^1 x S^2 has the Betti numbers of another gluing of the same pieces
    assert mv_check(s.replace("betti_M", 1, 1).replace("betti_M", 2, 1)).consistent


@pytest.mark.parametrize("n1,n2,gamma,targets", [
    (1, 1, 0.0, {"S^3": (1, 2)}),
    (2, 1, -0.5, {"S^4": (1, 3), "S^2 x S^2": (1, 3)}),
    (3, 1, -1.0, {"S^5": (1, 4), "S^3 x S^2": (1, 4)}),
    (2, 2, 0.0, {"S^5": (2, 3)}),
    (3, 2, -0.5, {"S^6": (2, 4), "S^3 x S^3": (2, 4)}),
])
def test_predictions(n1, n2, gamma, targets):
    p = predict_small_eigenvalues(n1, n2)
    assert p.gamma == gamma
    assert p.domain == ("W" if gamma == 0 else "minimal")
    assert p.boundary_case == (gamma == -0.5)
    assert {x.target: x.degrees for x in p.predictions} == targets
    for x in p.predictions:
        assert x.forcing_holds
        assert sum(x.degrees) == p.m


def test_prediction_preconditions():
    for bad in ((0, 0), (1, 2), (-1, 0), (1.5, 0)):
        with pytest.raises(ValueError):
            predict_small_eigenvalues(*bad)
