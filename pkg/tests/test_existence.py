import json

import pytest
from hypothesis import given, strategies as st
from sympy import isprime, primerange

from cusp.errors import OracleInfeasible, UnknownKernel
from cusp.existence import (FINITE_QUESTIONS, IsogenyKernel, Verdict, center_coprimality,
                            decide_finite, hypothesis_status, transfer_rules, verify_decision,
                            zsygmondy)
from cusp.rootdata import Factor, GroupSpec, build_root_datum

SCAN = 5_000


def naive_order(q, p):
    k, x = 1, q % p
    while x != 1:
        x = x * q % p
        k += 1
    return k


@pytest.mark.parametrize("q", range(2, 10))
def test_zsygmondy_against_prime_scan(q):
    for h in range(1, 25):
        got = zsygmondy(q, h)
        small = next((p for p in primerange(2, SCAN) if q % p and naive_order(q, p) == h), None)
        if small is not None:
            assert got == small
        elif got is not None:
            assert got > SCAN and isprime(got) and pow(q, h, got) == 1
            assert all(pow(q, d, got) != 1 for d in range(1, h))


@pytest.mark.parametrize("q,h,expected", [(2, 6, None), (2, 2, 3), (3, 2, None), (2, 12, 13),
                                          (2, 1, None), (3, 1, 2)])
def test_zsygmondy_examples(q, h, expected):
    assert zsygmondy(q, h) == expected


def test_zsygmondy_domain():
    with pytest.raises(ValueError):
        zsygmondy(1, 3)


@pytest.mark.parametrize("label,h", [("A5", 6), ("B2", 4), ("G2", 6), ("E6", 12), ("2A3", 6),
                                     ("D4", 6), ("2A4", 10), ("3D4", 12)])
def test_coxeter_primes_avoid_the_center(label, h):
    for q in range(2, 10):
        ell = zsygmondy(q, h)
        if ell is not None:
            assert center_coprimality(label, q, ell)
            assert center_coprimality(build_root_datum(label), q, ell)


def test_hypothesis_status():
    def st_(label, q):
        from cusp.rootdata import parse_label
        return hypothesis_status(GroupSpec(q, (Factor(*parse_label(label)),)))
    assert not st_("2A2", 2).hyp_a
    assert st_("2A2", 3).hyp_a and not st_("2A2", 3).hyp_b
    assert not st_("2A3", 5).hyp_b and st_("2A3", 4).inside
    assert not st_("2A4", 5).hyp_b and st_("2A4", 7).inside
    assert st_("A2", 2).inside and st_("2A5", 2).inside
    # restriction of scalars moves the field size
    spec = GroupSpec(2, (Factor("A", 2, 2, "sc", 2),))
    assert hypothesis_status(spec).violations == (("2A2", 4, "b"),)


def test_decide_finite_examples():
    rep = decide_finite(GroupSpec(7, (Factor("A", 2),)))
    assert rep["sd_cuspidal"] == Verdict.NO and rep["cuspidal"] == Verdict.YES
    rep = decide_finite(GroupSpec(3, (Factor("B", 2),)))
    assert all(rep[k] == Verdict.YES for k in FINITE_QUESTIONS)
    rep = decide_finite(GroupSpec(2, (Factor("A", 2, 2),)))
    assert rep["dl_cuspidal"] == Verdict.OUTSIDE
    assert any("unipotent" in a for a in rep.annotations)
    rep = decide_finite(GroupSpec(2, (Factor("A", 1, 1, "sc", 3),)))
    assert rep["sd_cuspidal"] == Verdict.YES
    rec = verify_decision(GroupSpec(2, (Factor("A", 1, 1, "sc", 3),)))
    assert rec.factors[0].q == 8 and rec.factors[0].certificate["invariant_factors"] == [9]


def test_a_even_is_unconditional():
    rep = decide_finite(GroupSpec(2, (Factor("A", 2), Factor("A", 3, 2))))
    assert rep["sd_cuspidal"] == Verdict.NO and rep["sd_dl_cuspidal"] == Verdict.NO


LABELS = ["A1", "A2", "A3", "A4", "B2", "B3", "C3", "D4", "G2", "F4"]


@given(st.lists(st.sampled_from(LABELS), min_size=1, max_size=3), st.integers(2, 5))
def test_trichotomy_rule(labels, q):
    from cusp.rootdata import parse_label
    spec = GroupSpec(q, tuple(Factor(*parse_label(lbl)) for lbl in labels))
    rep = decide_finite(spec)
    expected = Verdict.NO if any(parse_label(lbl)[0] == "A" and parse_label(lbl)[1] % 2 == 0
                                 for lbl in labels) else Verdict.YES
    assert rep["sd_cuspidal"] == rep["sd_dl_cuspidal"] == expected
    assert rep["dl_cuspidal"] == Verdict.YES


@pytest.mark.parametrize("label,q,sd", [("B2", 2, True), ("A2", 2, False), ("G2", 2, True),
                                        ("C3", 3, True), ("A4", 2, False)])
def test_oracle_agrees(label, q, sd):
    from cusp.rootdata import parse_label
    spec = GroupSpec(q, (Factor(*parse_label(label)),))
    rec = verify_decision(spec)
    assert rec.agree and rec.dl and rec.sd_dl == sd
    json.dumps(rec.to_json())


def test_g2_oracle_uses_square_class():
    rec = verify_decision(GroupSpec(2, (Factor("G", 2),)))
    cert = rec.factors[0].certificate
    assert cert["char_poly"] == "Phi3" and cert["invariant_factors"] == [7]


# ground truth in the excluded small-unitary range: (label, q) -> (dl, sd_dl)
GROUND_TRUTH = {("2A2", 2): (False, False), ("2A2", 3): (True, True), ("2A2", 4): (True, True),
                ("2A3", 2): (True, False), ("2A3", 3): (True, False), ("2A3", 5): (True, True),
                ("2A4", 2): (True, False), ("2A4", 3): (True, False), ("2A4", 4): (True, False),
                ("2A4", 5): (True, True)}


@pytest.mark.parametrize("key", sorted(GROUND_TRUTH))
def test_small_unitary_ground_truth(key):
    label, q = key
    from cusp.rootdata import parse_label
    spec = GroupSpec(q, (Factor(*parse_label(label)),))
    rep = decide_finite(spec)
    assert rep["sd_dl_cuspidal"] == Verdict.OUTSIDE
    rec = verify_decision(spec, rep)
    assert (rec.dl, rec.sd_dl) == GROUND_TRUTH[key]
    assert rec.agree and rec.ground_truth_only


def test_oracle_beyond_enumeration():
    with pytest.raises(OracleInfeasible) as exc:
        verify_decision(GroupSpec(2, (Factor("E", 7),)))
    assert exc.value.factor == "E7"
    # large unitary groups go through the product model
    rec = verify_decision(GroupSpec(3, (Factor("A", 8, 2),)))
    assert rec.factors[0].method == "unitary-product" and rec.sd_dl and rec.agree


@pytest.mark.parametrize("rank", [5, 8])
def test_rule_counterexamples_are_flagged(rank):
    """SU(6) and SU(9) over F_2: the rule predicts a self-dual DL cuspidal, none exists."""
    spec = GroupSpec(2, (Factor("A", rank, 2),))
    rep = decide_finite(spec)
    assert rep["sd_dl_cuspidal"] == Verdict.YES
    rec = verify_decision(spec, rep)
    assert rec.dl and not rec.sd_dl and not rec.agree
    assert rec.disagreements == ["sd_dl_cuspidal: rule says Yes, oracle says No"]
    # the adjoint form is fine
    assert verify_decision(GroupSpec(2, (Factor("A", rank, 2, "adjoint"),))).agree


def test_transfer_rules():
    src = {"cuspidal": Verdict.YES, "dl_cuspidal": Verdict.YES,
           "sd_cuspidal": Verdict.NO, "sd_dl_cuspidal": Verdict.NO}
    assert transfer_rules(src, IsogenyKernel(rational_points_trivial=True)) == src
    odd = transfer_rules(src, IsogenyKernel(order=5))
    assert odd["sd_cuspidal"] == Verdict.NO and odd["dl_cuspidal"] is None
    assert all(v is None for v in transfer_rules(src, IsogenyKernel(order=2)).values())
    yes = dict(src, sd_dl_cuspidal=Verdict.YES, sd_cuspidal=Verdict.YES)
    assert transfer_rules(yes, IsogenyKernel(order=3))["sd_dl_cuspidal"] == Verdict.YES
    assert transfer_rules(yes, IsogenyKernel(order=3), "backward")["sd_dl_cuspidal"] is None
    with pytest.raises(UnknownKernel):
        transfer_rules(src, IsogenyKernel())
    with pytest.raises(UnknownKernel):
        transfer_rules(src, None)


def test_odd_isogeny_agrees_with_oracle():
    # SL3 -> PGL3 has kernel of order 3; self-dual DL existence is No on both sides
    for iso in ("sc", "adjoint"):
        rec = verify_decision(GroupSpec(4, (Factor("A", 2, 1, iso),)))
        assert not rec.sd_dl
