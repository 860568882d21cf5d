"""Finite-field decision rules, isogeny transfer, and their oracle check."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np
from sympy import cyclotomic_poly, n_order, primefactors

from .classical import UNITARY, ProductL, enumerate_shapes, su_quotient, sum_zero_subgroup
from .errors import CapExceeded, OracleInfeasible, TooLarge, UnknownKernel
from .rootdata import Factor, GroupSpec, RootDatum, build_root_datum
from .toruschar import find_character, search_cap
from .weyl import ENUMERATION_CEILING, format_cyclotomic

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    YES = "Yes"
    NO = "No"
    OUTSIDE = "OutsideHypotheses"

    def __str__(self) -> str:
        return self.value


FINITE_QUESTIONS = ("cuspidal", "dl_cuspidal", "sd_cuspidal", "sd_dl_cuspidal")


# ------------------------------------------------------------ number theory

def zsygmondy(q: int, h: int) -> int | None:
    """Smallest prime ``l`` with ``ord_l(q) = h``, or ``None``."""
    if q < 2 or h < 1:
        raise ValueError("need q >= 2 and h >= 1")
    # a prime of order exactly h divides Phi_h(q)
    for p in primefactors(int(cyclotomic_poly(h, q))):
        if n_order(q, p) == h:
            return p
    return None


def center_coprimality(rd: RootDatum | str, q: int, ell: int) -> bool:
    """Whether ``ell`` avoids the center order of the simply connected form."""
    if isinstance(rd, str):
        rd = build_root_datum(rd)
    return math.gcd(ell, rd.fundamental_group_order) == 1


# --------------------------------------------------------------- hypotheses

_SMALL_UNITARY = {2: {3, 4}, 3: {2, 3, 5}, 4: {2, 3, 4, 5}}


@dataclass(frozen=True)
class HypothesisStatus:
    hyp_a: bool
    hyp_b: bool
    violations: tuple[tuple[str, int, str], ...] = ()   # (factor label, q_i, "a" or "b")

    @property
    def inside(self) -> bool:
        return self.hyp_a and self.hyp_b


def hypothesis_status(spec: GroupSpec) -> HypothesisStatus:
    viol = []
    for f in spec.factors:
        if f.letter != "A" or f.twist != 2:
            continue
        qi = f.effective_q(spec.q)
        if f.rank == 2 and qi == 2:
            viol.append((f.label, qi, "a"))
        elif qi in _SMALL_UNITARY.get(f.rank, ()):
            viol.append((f.label, qi, "b"))
    return HypothesisStatus(all(v[2] != "a" for v in viol), all(v[2] != "b" for v in viol),
                            tuple(viol))


# ------------------------------------------------------------------ reports

@dataclass(frozen=True)
class VerdictEntry:
    verdict: Verdict
    citation: str


@dataclass
class FactorOracle:
    factor: str
    q: int
    method: str
    dl: bool
    sd_dl: bool
    certificate: dict | None          # witness for the strongest property found


@dataclass
class OracleRecord:
    factors: list[FactorOracle]
    dl: bool
    sd_dl: bool
    agree: bool
    disagreements: list[str] = field(default_factory=list)
    ground_truth_only: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "dl": self.dl,
            "sd_dl": self.sd_dl,
            "agree": self.agree,
            "disagreements": list(self.disagreements),
            "ground_truth_only": list(self.ground_truth_only),
            "factors": [
                {"factor": f.factor, "q": f.q, "method": f.method, "dl": f.dl,
                 "sd_dl": f.sd_dl, "certificate": f.certificate}
                for f in self.factors
            ],
        }


@dataclass
class DecisionReport:
    verdicts: dict[str, VerdictEntry]
    hypotheses: HypothesisStatus | None = None
    annotations: list[str] = field(default_factory=list)
    oracle: OracleRecord | None = None
    details: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> Verdict:
        return self.verdicts[key].verdict

    def to_json(self) -> dict:
        out = {
            "verdicts": {k: str(v.verdict) for k, v in self.verdicts.items()},
            "citations": {k: v.citation for k, v in self.verdicts.items()},
            "annotations": list(self.annotations),
        }
        if self.hypotheses is not None:
            out["hypotheses"] = {
                "hyp_a": self.hypotheses.hyp_a,
                "hyp_b": self.hypotheses.hyp_b,
                "violations": [list(v) for v in self.hypotheses.violations],
            }
        if self.details:
            out["details"] = self.details
        if self.oracle is not None:
            out["oracle"] = self.oracle.to_json()
        return out


# -------------------------------------------------------------- isogenies

@dataclass(frozen=True)
class IsogenyKernel:
    """What is known about the kernel of a central isogeny ``G -> G'``."""

    order: int | None = None
    rational_points_trivial: bool | None = None


def transfer_rules(source: Mapping[str, Verdict], kernel: IsogenyKernel | None,
                   direction: str = "forward") -> dict[str, Verdict | None]:
    """Verdicts implied for the other side of an isogeny; ``None`` where no rule applies.

    ``forward`` moves from the source ``G`` to the image ``G'``; ``backward``
    moves from ``G'`` to ``G``.
    """
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    if kernel is None or (kernel.order is None and kernel.rational_points_trivial is None):
        raise UnknownKernel("no information about the isogeny kernel")
    out: dict[str, Verdict | None] = {k: None for k in FINITE_QUESTIONS}
    if kernel.rational_points_trivial:
        out.update({k: source.get(k) for k in FINITE_QUESTIONS})
        return out
    if kernel.order is not None and kernel.order % 2 == 1:
        out["sd_cuspidal"] = source.get("sd_cuspidal")
        if direction == "forward" and source.get("sd_dl_cuspidal") == Verdict.YES:
            out["sd_dl_cuspidal"] = Verdict.YES
    return out


# ------------------------------------------------------------ decide_finite

CITE_CUSPIDAL = "every connected reductive group over a finite field has cuspidals"
CITE_DL = "elliptic torus with a character in general position (no small 2A2 factor)"
CITE_DL_OUT = "2A2(2) factor: outside the range of the DL construction"
CITE_SD_YES = ("conjugate self-dual character in general position on an elliptic torus, "
               "glued across factors")
CITE_SD_NO = ("factor of type A_n with n even: odd-kernel isogeny from SL_(n+1) x H, "
              "whose rational points have no self-dual cuspidals")
CITE_SD_OUT = "small unitary factor excluded by the hypotheses"
NOTE_UNIPOTENT = "unipotent self-dual cuspidal exists"


def decide_finite(spec: GroupSpec) -> DecisionReport:
    hyp = hypothesis_status(spec)
    a_even = [f.label for f in spec.factors if f.is_A_even()]
    verdicts = {"cuspidal": VerdictEntry(Verdict.YES, CITE_CUSPIDAL)}
    verdicts["dl_cuspidal"] = (VerdictEntry(Verdict.YES, CITE_DL) if hyp.hyp_a
                               else VerdictEntry(Verdict.OUTSIDE, CITE_DL_OUT))
    if a_even:
        sd = VerdictEntry(Verdict.NO, CITE_SD_NO + f" [{', '.join(a_even)}]")
    elif hyp.inside:
        sd = VerdictEntry(Verdict.YES, CITE_SD_YES)
    else:
        sd = VerdictEntry(Verdict.OUTSIDE, CITE_SD_OUT)
    verdicts["sd_cuspidal"] = sd
    verdicts["sd_dl_cuspidal"] = sd
    notes = []
    for f in spec.factors:
        if f.letter == "A" and f.twist == 2 and f.rank == 2:
            notes.append(f"{f.label}({f.effective_q(spec.q)}): {NOTE_UNIPOTENT}")
    return DecisionReport(verdicts, hyp, notes)


# ------------------------------------------------------------------ oracle

def _weyl_certificate(hit) -> dict:
    L = hit.L
    return {
        "method": "weyl",
        "class_representative": L.omega.tolist(),
        "char_poly": format_cyclotomic(hit.twisted_class.cyclotomic) if hit.twisted_class else None,
        "invariant_factors": list(L.invariant_factors),
        "order": L.order,
        "omega_order": L.omega_order,
        "element": list(hit.element),
        "is_general_position": True,
        "is_conjugate_self_dual": None,
    }


def _oracle_weyl(rd: RootDatum, q: int, cap: int) -> tuple[bool, bool, dict | None]:
    hit = find_character(rd, q, self_dual=True, cap=cap)
    if hit is not None:
        cert = _weyl_certificate(hit)
        cert["is_conjugate_self_dual"] = True
        return True, True, cert
    hit = find_character(rd, q, self_dual=False, cap=cap)
    if hit is None:
        return False, False, None
    cert = _weyl_certificate(hit)
    cert["is_conjugate_self_dual"] = False
    return True, False, cert


def _oracle_unitary(f: Factor, q: int, cap: int) -> tuple[bool, bool, dict | None]:
    """``SU(n)`` or ``PU(n)`` through the product model."""
    m = f.rank + 1
    level = "SU" if f.isogeny == "sc" else "PU"
    best: tuple[bool, bool, dict | None] = (False, False, None)
    for shape in enumerate_shapes(UNITARY, m):
        L = ProductL(shape, q)
        if L.order > cap:
            raise CapExceeded(f"|L| = {L.order} for shape {shape.parts} exceeds the cap {cap}")
        if level == "SU":
            Lp = su_quotient(L)
            action = Lp.action
            restrict = None
        else:
            action = L.action
            restrict = sum_zero_subgroup(L).mask()
        for sd in (True, False):
            if sd is False and best[0]:
                break
            hits = np.flatnonzero(action.qualifying_mask(sd, cap, restrict))
            if len(hits):
                cert = {"method": "unitary-product", "level": level, "shape": list(shape.parts),
                        "invariant_factors": list(action.moduli), "order": action.size,
                        "omega_order": action.group_order,
                        "element": list(action.element(int(hits[0]))),
                        "is_general_position": True, "is_conjugate_self_dual": sd}
                if sd:
                    return True, True, cert
                best = (True, False, cert)
                break
    return best


def _factor_oracle(f: Factor, q: int, cap: int) -> FactorOracle:
    qi = f.effective_q(q)
    rd = f.root_datum()
    try:
        if rd.weyl_order <= ENUMERATION_CEILING:
            dl, sd, cert = _oracle_weyl(rd, qi, cap)
            method = "weyl"
        elif f.letter == "A" and f.twist == 2 and f.isogeny in ("sc", "adjoint"):
            dl, sd, cert = _oracle_unitary(f, qi, cap)
            method = "unitary-product"
        else:
            raise OracleInfeasible(f"|W({f.label})| = {rd.weyl_order} exceeds the "
                                   f"enumeration ceiling {ENUMERATION_CEILING}", f.label)
    except (CapExceeded, TooLarge) as exc:
        raise OracleInfeasible(str(exc), f.label) from exc
    return FactorOracle(f.label, qi, method, dl, sd, cert)


def verify_decision(spec: GroupSpec, report: DecisionReport | None = None,
                    cap: int | None = None) -> OracleRecord:
    """Run the brute-force sweep on each factor and compare with the rules.

    A product has a (conjugate self-dual) character in general position iff
    every factor does, so the product answer is the conjunction.
    """
    cap = search_cap() if cap is None else cap
    report = report or decide_finite(spec)
    factors = [_factor_oracle(f, spec.q, cap) for f in spec.factors]
    dl = all(f.dl for f in factors)
    sd = all(f.sd_dl for f in factors)
    disagreements, ground = [], []
    for key, truth in (("dl_cuspidal", dl), ("sd_dl_cuspidal", sd)):
        v = report[key]
        if v == Verdict.OUTSIDE:
            ground.append(f"{key}: {'exists' if truth else 'none'} "
                          "(character-level ground truth, not a rule)")
        elif (v == Verdict.YES) != truth:
            disagreements.append(f"{key}: rule says {v}, oracle says {'Yes' if truth else 'No'}")
    if report["sd_cuspidal"] == Verdict.NO and sd:
        disagreements.append("sd_cuspidal: rule says No but a self-dual DL witness exists")
    rec = OracleRecord(factors, dl, sd, not disagreements, disagreements, ground)
    report.oracle = rec
    return rec
