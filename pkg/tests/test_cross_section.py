import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conespec.cross_section import (
    CatalogError,
    CrossSectionSpectrum,
    build_a_spectrum,
    catalog_lookup,
    coexact_gammas,
    load_custom_file,
    parse_custom_text,
)
from conespec.oracles import lattice_reference, sphere2_function_spectrum, torus_function_spectrum


def as_dict(entries):
    return {e.gamma: e.mult for e in entries}


def test_two_sphere_example():
    cs = CrossSectionSpectrum(2, (1, 0, 1), ((0, 2.0, 3),), cutoff=10.0)
    assert as_dict(build_a_spectrum(cs)) == {-2.0: 3, -1.0: 5, 1.0: 5, 2.0: 3}


def test_harmonic_only_four_dimensional():
    cs = CrossSectionSpectrum(4, (1, 0, 0, 0, 1), (), cutoff=10.0)
    assert as_dict(build_a_spectrum(cs)) == {-2.0: 2, 2.0: 2}


def test_origins_are_concatenated_on_merge():
    cs = CrossSectionSpectrum(2, (1, 0, 1), ((0, 2.0, 3),), cutoff=10.0)
    entry = next(e for e in build_a_spectrum(cs) if e.gamma == 1.0)
    assert len(entry.origin) == 3


def test_cutoff_drops_entries():
    cs = CrossSectionSpectrum(2, (1, 0, 1), ((0, 2.0, 3),), cutoff=1.5)
    assert as_dict(build_a_spectrum(cs)) == {-1.0: 5, 1.0: 5}


def test_validation_errors():
    assert CrossSectionSpectrum(3, (1, 0, 0, 1), (), 3.0).betti == (1, 0, 0, 1)
    with pytest.raises(CatalogError, match="duality"):
        CrossSectionSpectrum(3, (1, 1, 0, 1), (), 3.0)
    with pytest.raises(CatalogError):
        CrossSectionSpectrum(1, (1, 1), (), 3.0)
    with pytest.raises(CatalogError):
        CrossSectionSpectrum(2, (1, 0, 1), ((2, 1.0, 1),), 3.0)
    with pytest.raises(CatalogError):
        CrossSectionSpectrum(2, (1, 0, 1), ((0, -1.0, 1),), 3.0)


def test_custom_file_rejects_duality_violation(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("n = 3\nbetti = [1, 0, 0, 2]\n")
    with pytest.raises(CatalogError, match="duality"):
        load_custom_file(path)


def test_custom_file_parsing(tmp_path):
    path = tmp_path / "s2.txt"
    path.write_text("# unit 2-sphere\nn = 2\nbetti = [1, 0, 1]\ncoexact_modes = [[0, 2.0, 3]]\n"
                    "cutoff = 2.5\n")
    cs = load_custom_file(path)
    assert cs.n == 2 and cs.cutoff == 2.5
    assert as_dict(build_a_spectrum(cs)) == {-2.0: 3, -1.0: 5, 1.0: 5, 2.0: 3}
    for bad in ("n = 2\nbetti = [1,0,1]\nfoo = 1\n", "n = 2\nn = 2\nbetti = [1,0,1]\n",
                "n = 2\n", "n = 2\nbetti = [1,0,1\n", "n = 2\nbetti = [1,0,1]\ncoexact_modes = [[0, 1]]\n"):
        with pytest.raises(CatalogError):
            parse_custom_text(bad)


def test_catalog_errors():
    with pytest.raises(CatalogError, match="unknown catalog key"):
        catalog_lookup("klein_bottle")
    with pytest.raises(CatalogError, match="n >= 2"):
        catalog_lookup("circle")
    with pytest.raises(CatalogError, match="not available"):
        catalog_lookup("round_sphere", [3])
    assert not catalog_lookup("round_sphere", [3], allow_incomplete=True).complete


def test_flat_torus_matches_fourier_brute_force():
    cs = catalog_lookup("flat_torus", [2], cutoff=3.0)
    assert cs.betti == (1, 2, 1)
    top = 10.0
    cat = [(m.mu_sq, m.mult) for m in cs.coexact_modes if m.p == 0 and m.mu_sq <= top]
    brute = torus_function_spectrum(2, top)
    assert [m for _, m in cat] == [m for _, m in brute]
    for (a, _), (b, _) in zip(cat, brute):
        assert a == pytest.approx(b, rel=1e-8)
    assert cat == lattice_reference(2, top)


def test_round_sphere_matches_latitude_brute_force():
    cs = catalog_lookup("round_sphere", [2], cutoff=3.0)
    top = 12.5
    cat = [(m.mu_sq, m.mult) for m in cs.coexact_modes if m.p == 0 and m.mu_sq <= top]
    brute = sphere2_function_spectrum(top)
    assert [m for _, m in cat] == [m for _, m in brute] == [3, 5, 7]
    for (a, _), (b, _) in zip(cat, brute):
        assert a == pytest.approx(b, rel=1e-6)


def test_flat_three_torus_one_forms():
    # on T^3 the coexact 1-spectrum at |k|^2 carries two polarisations per lattice vector
    cs = catalog_lookup("flat_torus", [3], cutoff=2.0)
    ones = {m.mu_sq: m.mult for m in cs.coexact_modes if m.p == 1}
    assert ones[1.0] == 2 * 6 and ones[2.0] == 2 * 12


def test_product_and_disjoint_union():
    s1s2 = catalog_lookup("product_spheres", [1, 2], cutoff=2.0)
    assert s1s2.betti == (1, 1, 1, 1)
    two = catalog_lookup("disjoint_union", [["round_sphere", [2]], ["round_sphere", [2]]], cutoff=2.0)
    assert two.betti == (2, 0, 2)
    assert {m.mu_sq: m.mult for m in two.coexact_modes}[2.0] == 6


# ---------------------------------------------------------------- properties

modes = st.lists(st.tuples(st.integers(0, 3), st.floats(0.01, 30.0), st.integers(1, 4)),
                 max_size=6)


@st.composite
def spectra(draw):
    n = draw(st.integers(2, 4))
    half = [draw(st.integers(0, 3)) for _ in range(n // 2 + 1)]
    betti = [half[min(p, n - p)] for p in range(n + 1)]
    ms = [(p % n, mu, k) for p, mu, k in draw(modes)]
    return CrossSectionSpectrum(n, tuple(betti), tuple(ms), draw(st.floats(0.5, 6.0)))


@settings(max_examples=200, deadline=None)
@given(spectra())
def test_spectrum_is_symmetric(cs):
    d = as_dict(build_a_spectrum(cs))
    for g, m in d.items():
        key = next(k for k in d if abs(k + g) <= 1e-12 * max(1.0, abs(g)))
        assert d[key] == m


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 5), st.integers(0, 4), st.floats(0.001, 50.0))
def test_open_band_iff_root_below_one(n, p, mu_sq):
    p = p % n
    g = coexact_gammas(n, p, mu_sq)
    root = math.sqrt(mu_sq + ((n - 1) / 2.0 - p) ** 2)
    inside = [abs(x) < 0.5 for x in g.values()]
    assert any(inside) == (root < 1.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.integers(0, 4), st.floats(0.01, 20.0), st.floats(1e-3, 5.0))
def test_raising_mu_moves_gammas_outward(n, p, mu_sq, bump):
    p = p % n
    lo = coexact_gammas(n, p, mu_sq)
    hi = coexact_gammas(n, p, mu_sq + bump)
    for key in lo:
        centre = 0.5 if key[0] == "+" else -0.5
        assert abs(hi[key] - centre) > abs(lo[key] - centre)


@settings(max_examples=100, deadline=None)
@given(spectra(), st.floats(0.1, 4.0))
def test_truncation_closure(cs, extra):
    small = as_dict(build_a_spectrum(cs))
    big_cs = CrossSectionSpectrum(cs.n, cs.betti, cs.coexact_modes, cs.cutoff + extra)
    big = as_dict(build_a_spectrum(big_cs))
    for g, m in small.items():
        assert big.get(g, 0) >= m
