import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, Poly, cyclotomic_poly, symbols

from cusp.errors import NotCyclotomic, TooLarge
from cusp.lattice import IntMatrix
from cusp.rootdata import build_root_datum, weyl_order
from cusp.weyl import (char_poly, class_of, coxeter_class, cyclotomic, cyclotomic_factor,
                       cyclotomic_product, elliptic_classes, enumerate_weyl, format_cyclotomic,
                       is_elliptic, poly_eval, twisted_action, twisted_centralizer, twisted_classes)

x = symbols("x")
SMALL = ["A1", "A2", "A3", "B2", "G2", "B3", "C3", "2A2", "2A3", "2A4", "D4", "2D4", "3D4"]


def sympy_coeffs(expr):
    return tuple(int(c) for c in reversed(Poly(expr, x).all_coeffs()))


@pytest.mark.parametrize("label", SMALL)
def test_enumeration_is_a_group_of_the_right_order(label):
    rd = build_root_datum(label)
    W = enumerate_weyl(rd)
    assert W.order == rd.weyl_order
    eye = IntMatrix.identity(rd.rank)
    assert W.element(W.identity) == eye
    rng = np.random.default_rng(0)
    for _ in range(40):
        a, b = (W.element(int(i)) for i in rng.integers(0, W.order, 2))
        W.index_of(a @ b)
        W.index_of(a.inverse())


def test_small_groups():
    W = enumerate_weyl(build_root_datum("A1"))
    mats = {W.element(i) for i in range(W.order)}
    assert mats == {IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[-1]])}
    assert enumerate_weyl(build_root_datum("G2")).order == 12


def test_ceiling():
    with pytest.raises(TooLarge):
        enumerate_weyl(build_root_datum("E7"))


@pytest.mark.parametrize("label", SMALL)
def test_twisted_classes_partition_and_orbit_stabilizer(label):
    W = enumerate_weyl(build_root_datum(label))
    classes = twisted_classes(W)
    assert sum(c.size for c in classes) == W.order
    seen = set()
    for c in classes:
        members = set(int(m) for m in c.members)
        assert not members & seen
        seen |= members
        assert c.size * c.centralizer().order == W.order
        cp = c.char_poly
        assert cp == tuple(reversed(cp)) or cp == tuple(-a for a in reversed(cp))
        assert c.elliptic == (poly_eval(cp, 1) != 0)
        assert cyclotomic_product(c.cyclotomic) == cp


@pytest.mark.parametrize("label", ["A2", "2A2", "B2", "2A3", "D4"])
def test_twisted_action_orbit_matches_class(label):
    W = enumerate_weyl(build_root_datum(label))
    for c in twisted_classes(W):
        orbit = {W.index_of(twisted_action(W, W.element(i), c.representative))
                 for i in range(W.order)}
        assert orbit == set(int(m) for m in c.members)


@pytest.mark.parametrize("label", SMALL)
def test_centralizer_commutes_with_frobenius_part(label):
    rd = build_root_datum(label)
    W = enumerate_weyl(rd)
    for c in elliptic_classes(W):
        cent = c.centralizer()
        for m in cent.matrices():
            assert m @ c.w == c.w @ m


def test_class_counts():
    assert len(twisted_classes(enumerate_weyl(build_root_datum("A1")))) == 2
    W = enumerate_weyl(build_root_datum("A2"))
    assert len(twisted_classes(W)) == 3
    ell = elliptic_classes(W)
    assert len(ell) == 1 and ell[0] is coxeter_class(W)
    W = enumerate_weyl(build_root_datum("2A2"))
    assert coxeter_class(W).elliptic


def test_ellipticity_examples():
    rd = build_root_datum("G2")
    W = enumerate_weyl(rd)
    eye = IntMatrix.identity(2)
    assert not is_elliptic(eye, rd.sigma0)
    c = rd.coxeter_element()
    assert is_elliptic(c, rd.sigma0)
    assert is_elliptic(c @ c, rd.sigma0)
    cls = class_of(W, c @ c)
    assert cls.centralizer().order == 6
    assert cls.cyclotomic == ((3, 1),)


@pytest.mark.parametrize("label", ["A3", "B3", "C3", "D4", "F4", "E6"])
def test_coxeter_elements_are_elliptic(label):
    rd = build_root_datum(label)
    assert is_elliptic(rd.coxeter_element(), rd.sigma0)


def test_twisted_e6_regular_class():
    W = enumerate_weyl(build_root_datum("2E6"))
    hits = [c for c in elliptic_classes(W) if sorted(c.cyclotomic) == [(6, 1), (12, 1)]]
    assert len(hits) == 1
    cent = hits[0].centralizer()
    assert cent.order == 12
    assert max(m.order() for m in cent.matrices()) == 12    # cyclic


def test_twisted_a3_coxeter():
    W = enumerate_weyl(build_root_datum("2A3"))
    c = coxeter_class(W)
    assert sorted(c.cyclotomic) == [(2, 1), (6, 1)]
    assert poly_eval(c.char_poly, 2) == 9
    assert format_cyclotomic(c.cyclotomic) == "Phi2Phi6"


@pytest.mark.parametrize("d", range(1, 31))
def test_cyclotomic_matches_sympy(d):
    assert cyclotomic(d) == sympy_coeffs(cyclotomic_poly(d, x))


@given(st.lists(st.tuples(st.integers(1, 24), st.integers(1, 3)), min_size=1, max_size=3,
                unique_by=lambda t: t[0]))
def test_cyclotomic_factor_inverts_product(factors):
    poly = cyclotomic_product(factors)
    assert sorted(cyclotomic_factor(poly)) == sorted(factors)


def test_not_cyclotomic():
    assert cyclotomic_factor((-1, 1)) == [(1, 1)]
    with pytest.raises(NotCyclotomic):
        cyclotomic_factor((2, 0, 1))     # x^2 + 2


@pytest.mark.parametrize("label", ["B3", "2A3", "3D4", "F4"])
def test_char_poly_matches_sympy(label):
    W = enumerate_weyl(build_root_datum(label))
    rng = np.random.default_rng(1)
    for i in rng.integers(0, W.order, 25):
        m = W.element(int(i))
        expected = sympy_coeffs(Matrix(m.tolist()).charpoly(x).as_expr())
        assert char_poly(m) == expected


def test_direct_centralizer_matches_class_centralizer():
    W = enumerate_weyl(build_root_datum("B3"))
    for c in elliptic_classes(W):
        assert twisted_centralizer(W, c.representative).order == c.centralizer().order
