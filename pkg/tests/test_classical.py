import numpy as np
import pytest
from hypothesis import given, strategies as st

from cusp.classical import (ORTHOGONAL, UNITARY, ProductL, TorusShape, construct_su8_12,
                            construct_u_crude, construct_v_element, enumerate_shapes,
                            restrict_to_SU, su_quotient, sum_zero_subgroup, sweep_levels)
from cusp.errors import ConstructionFailed, FieldTooSmall, ShapeMismatch
from cusp.rootdata import build_root_datum
from cusp.toruschar import build_L
from cusp.weyl import cyclotomic_factor, elliptic_classes, enumerate_weyl

import oracles


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def shape_poly(parts):
    """prod (x^d + 1), lowest degree first."""
    p = [1]
    for d in parts:
        p = poly_mul(p, [1] + [0] * (d - 1) + [1])
    return p


def poly_div_x_plus_1(p):
    out, carry = [], 0
    for c in reversed(p):
        carry = c - carry
        out.append(carry)
    assert out[-1] == 0
    return list(reversed(out[:-1]))


def test_shapes():
    assert [s.parts for s in enumerate_shapes(UNITARY, 5)] == [(5,), (3, 1, 1), (1, 1, 1, 1, 1)]
    assert [s.parts for s in enumerate_shapes(ORTHOGONAL, 5)] == \
        [(5,), (3, 1, 1), (2, 2, 1), (1, 1, 1, 1, 1)]
    assert TorusShape(UNITARY, (1, 3)).parts == (3, 1)
    with pytest.raises(ShapeMismatch):
        TorusShape(UNITARY, (2,))
    with pytest.raises(ShapeMismatch):
        TorusShape(ORTHOGONAL, (1, 1))
    assert TorusShape(UNITARY, (3, 1)).goodness().good
    assert not TorusShape(UNITARY, (1, 1, 1)).goodness().good


def test_product_fixtures():
    L = ProductL(TorusShape(UNITARY, (1, 1, 1)), 4)
    assert L.moduli == (5, 5, 5) and L.group_order == 6
    v = (1, 2, 3)
    assert all(g @ (1, 1, 1) == (1, 1, 1) for g in L.generators)   # only permutations
    assert L.is_general_position(v)
    L = ProductL(TorusShape(UNITARY, (3,)), 2)
    assert L.moduli == (9,) and L.action.orbit((1,)) == {(1,), (4,), (7,)}


SMALL_SHAPES = [(UNITARY, p, q) for p in [(3,), (3, 1), (1, 1, 1), (3, 1, 1), (5,)]
                for q in (2, 3)] + \
               [(ORTHOGONAL, p, q) for p in [(3,), (2, 1, 1), (1, 1, 1), (2, 2, 1), (3, 1, 1)]
                for q in (2, 3)]


@given(st.sampled_from(SMALL_SHAPES), st.data())
def test_product_model_against_explicit_group(case, data):
    kind, parts, q = case
    models = ["galois"] + (["signed"] if kind == ORTHOGONAL else [])
    model = data.draw(st.sampled_from(models))
    L = ProductL(TorusShape(kind, parts), q, model)
    assert L.group_order == oracles.expected_order(parts, model) == \
        oracles.group_order(parts, q, model)
    v = data.draw(st.tuples(*[st.integers(0, m - 1) for m in L.moduli]))
    assert (L.is_general_position(v), L.is_conjugate_self_dual(v)) == \
        oracles.check(parts, q, v, "U", model)


@given(st.sampled_from([p for p in SMALL_SHAPES if p[0] == UNITARY]), st.data())
def test_su_and_pu_levels_against_explicit_group(case, data):
    _, parts, q = case
    L = ProductL(TorusShape(UNITARY, parts), q)
    v = data.draw(st.tuples(*[st.integers(0, m - 1) for m in L.moduli]))
    Lp, vp = restrict_to_SU(L, v)
    assert Lp.group.order == L.order // (q + 1)
    assert (Lp.action.is_general_position(vp), Lp.action.is_conjugate_self_dual(vp)) == \
        oracles.check(parts, q, v, "SU")
    pu = sum_zero_subgroup(L)
    gp, sd = oracles.check(parts, q, v, "PU")
    if pu.contains(v):
        assert (gp, sd) == (L.is_general_position(v), L.is_conjugate_self_dual(v))
    else:
        assert not gp


@pytest.mark.parametrize("parts,q", [((3, 1), 2), ((1, 1, 1), 3), ((3, 1, 1), 2)])
def test_sum_zero_subgroup_is_a_stable_subgroup(parts, q):
    L = ProductL(TorusShape(UNITARY, parts), q)
    S = sum_zero_subgroup(L)
    elems = list(S.elements())
    assert len(elems) == S.order == int(S.mask().sum())
    members = set(elems)
    for a in elems[:20]:
        for b in elems[:20]:
            assert L.reduce(x + y for x, y in zip(a, b)) in members
        for g in L.generators:
            assert L.reduce(g @ a) in members


@pytest.mark.parametrize("q", [2, 3])
def test_signed_model_matches_so10(q):
    """The signed model reproduces the rational Weyl group of non-split SO(10)."""
    rd = build_root_datum("D", 5, 2, isogeny=[[1, 0, 0, 0, 0]])
    by_poly = {tuple(sorted(cyclotomic_factor(shape_poly(s.parts)))): s
               for s in enumerate_shapes(ORTHOGONAL, 5)}
    seen = set()
    for cls in elliptic_classes(enumerate_weyl(rd)):
        shape = by_poly[tuple(sorted(cls.cyclotomic))]
        seen.add(shape.parts)
        L = build_L(rd, cls, q)
        P = ProductL(shape, q, "signed")
        assert L.order == P.order and L.omega_order == P.group_order
        for sd in (False, True):
            assert L.action.qualifying_mask(sd).sum() == P.action.qualifying_mask(sd).sum()
    assert len(seen) == 4


def test_galois_model_differs_from_so10():
    # on (2,2,1) at q = 2 the true Weyl group leaves nothing in general position
    gal = ProductL(TorusShape(ORTHOGONAL, (2, 2, 1)), 2)
    sig = ProductL(TorusShape(ORTHOGONAL, (2, 2, 1)), 2, "signed")
    assert gal.action.qualifying_mask(True).sum() > 0
    assert sig.action.qualifying_mask(False).sum() == 0


@pytest.mark.parametrize("m,q", [(m, q) for m in (3, 4, 5) for q in (2, 3)]
                         + [(4, 4), (6, 2), (7, 2)])
def test_su_quotient_matches_twisted_a(m, q):
    rd = build_root_datum("A", m - 1, 2)
    by_poly = {tuple(sorted(cyclotomic_factor(poly_div_x_plus_1(shape_poly(s.parts))))): s
               for s in enumerate_shapes(UNITARY, m)}
    for cls in elliptic_classes(enumerate_weyl(rd)):
        shape = by_poly[tuple(sorted(cls.cyclotomic))]
        L = build_L(rd, cls, q)
        Lp = su_quotient(ProductL(shape, q))
        assert L.invariant_factors == Lp.group.invariant_factors
        assert L.omega_order == Lp.action.group_order
        for sd in (False, True):
            assert L.action.qualifying_mask(sd).sum() == Lp.action.qualifying_mask(sd).sum()


V_SHAPES = []
for kind in (UNITARY, ORTHOGONAL):
    for k1 in range(2, 6):
        for k2 in [None] + list(range(2, k1)):
            for ones in range(4):
                parts = (k1, k1) + ((k2, k2) if k2 else ()) + (1,) * ones
                try:
                    TorusShape(kind, parts)
                except ShapeMismatch:
                    continue
                V_SHAPES.append((kind, parts))


@pytest.mark.parametrize("kind,parts", V_SHAPES)
@pytest.mark.parametrize("q", [2, 3])
def test_v_element(kind, parts, q):
    L = ProductL(TorusShape(kind, parts), q)
    v = construct_v_element(L)
    assert oracles.check(parts, q, v) == (True, True)


def test_v_element_rejects_other_shapes():
    with pytest.raises(ShapeMismatch):
        construct_v_element(ProductL(TorusShape(UNITARY, (3, 1)), 2))
    with pytest.raises(ShapeMismatch):
        construct_v_element(ProductL(TorusShape(UNITARY, (3, 3, 1, 1, 1, 1)), 2))


SU_FAILURES = {(2, 3), (3, 2), (4, 5), (5, 4)}


@pytest.mark.parametrize("n", range(1, 6))
def test_crude_construction(n):
    for q in range(2, 9):
        bound = n - 1 if q % 2 == 0 and n % 2 == 1 else n
        if q < bound:
            with pytest.raises(FieldTooSmall):
                construct_u_crude(n, q)
            continue
        v = construct_u_crude(n, q)
        parts = (1,) * n
        assert oracles.check(parts, q, v, "U") == (True, True)
        assert oracles.check(parts, q, v, "PU") == (True, True)
        su_gp, _ = oracles.check(parts, q, v, "SU")
        assert su_gp == ((n, q) not in SU_FAILURES), (n, q)


@pytest.mark.parametrize("n,q,prime", [(8, 2, None), (8, 3, 7), (12, 2, 11), (12, 3, 61)])
def test_su8_12(n, q, prime):
    w = construct_su8_12(n, q)
    assert w.prime == prime
    parts = w.L.parts
    assert parts == (n // 2 - 1, n // 2 - 1, 1, 1)
    assert oracles.check(parts, q, w.element, "U") == (True, True)
    assert oracles.check(parts, q, w.element, "PU") == (True, True)
    assert oracles.check(parts, q, w.element, "SU")[0]
    Lp, vp = restrict_to_SU(w.L, w.element)
    assert vp == w.su_element


def test_su8_12_other_sizes():
    with pytest.raises(ValueError):
        construct_su8_12(10, 2)


def test_sweep_levels_fixture():
    found = sweep_levels(3, 2)
    assert found["PU"] is not None and found["SU"] is None
    found = sweep_levels(4, 3)
    assert found["U"] == ((1, 1, 1, 1), (0, 1, 2, 3))
    assert found["PU"] is None and found["SU"] is None


def _odd_order_hits(action):
    hits = np.flatnonzero(action.qualifying_mask(True))
    out = []
    for i in hits:
        v = action.element(int(i))
        if all((m // np.gcd(m, x)) % 2 for m, x in zip(action.moduli, v)):
            out.append(v)
    return out


@pytest.mark.parametrize("q", [2, 3])
def test_paired_orthogonal_shape_has_odd_order_witness(q):
    L = ProductL(TorusShape(ORTHOGONAL, (2, 2, 1)), q)
    assert _odd_order_hits(L.action)


def test_odd_order_witnesses_in_the_true_weyl_group():
    """With the signed model, odd-order witnesses exist at q = 2 (on (3,1,1)) but not at q = 3."""
    at2 = {p: _odd_order_hits(ProductL(TorusShape(ORTHOGONAL, p), 2, "signed").action)
           for p in [(2, 2, 1), (3, 1, 1)]}
    assert not at2[(2, 2, 1)] and at2[(3, 1, 1)]
    for shape in enumerate_shapes(ORTHOGONAL, 5):
        act = ProductL(shape, 3, "signed").action
        assert not _odd_order_hits(act)
    # csd+gp witnesses still exist at q = 3, just of even order
    assert ProductL(TorusShape(ORTHOGONAL, (2, 2, 1)), 3, "signed").action.first() is not None
