"""Depth-zero supercuspidal existence rules over nonarchimedean local fields.

Questions are carried to the finite field through the reductive quotient at
an absolutely special vertex. When the splitting field is unramified the
quotient has the same type over the residue field (with ``q -> q^f`` for an
unramified restriction of scalars). When it is ramified the quotient is not
simply laced, which is all any rule needs to know.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import SpecError, UnsupportedType
from .existence import DecisionReport, Verdict, VerdictEntry, hypothesis_status
from .rootdata import Factor, GroupSpec, diagram_automorphism, format_label, parse_label

RAMIFICATIONS = ("unramified", "ramified_tame", "wild")
PADIC_QUESTIONS = ("depth0_sc", "regular_depth0_sc", "sd_sc", "sd_regular_depth0_sc")


@dataclass(frozen=True)
class PadicFactorSpec:
    letter: str
    rank: int
    twist: int = 1
    ramification: str = "unramified"
    inner_form: bool = False        # True: a non-quasi-split inner form
    isotropic: bool = True
    residue_degree: int = 1
    isogeny: str = "sc"

    def __post_init__(self):
        try:
            diagram_automorphism(self.letter, self.rank, self.twist)
            Factor(self.letter, self.rank, self.twist)
        except (UnsupportedType, SpecError) as exc:
            raise SpecError(str(exc)) from exc
        if self.ramification not in RAMIFICATIONS:
            raise SpecError(f"ramification must be one of {RAMIFICATIONS}")
        if self.residue_degree < 1:
            raise SpecError("residue_degree must be >= 1")
        if not self.inner_form and not self.isotropic:
            raise SpecError(f"{self.label}: a quasi-split semisimple group is isotropic")

    @property
    def label(self) -> str:
        return format_label(self.letter, self.rank, self.twist)

    @property
    def splits_unramified(self) -> bool:
        return self.twist == 1 or self.ramification == "unramified"

    def is_A_even(self) -> bool:
        return self.letter == "A" and self.twist == 1 and self.rank % 2 == 0

    @classmethod
    def from_json(cls, d: dict) -> PadicFactorSpec:
        if not isinstance(d, dict) or "type" not in d:
            raise SpecError("each factor needs a 'type'")
        try:
            if "rank" in d:
                letter, rank, twist = str(d["type"]).upper(), int(d["rank"]), 1
            else:
                letter, rank, twist = parse_label(str(d["type"]))
            return cls(letter, rank, int(d.get("twist", twist)),
                       str(d.get("ramification", "unramified")),
                       bool(d.get("inner_form", False)), bool(d.get("isotropic", True)),
                       int(d.get("residue_degree", 1)), str(d.get("isogeny", "sc")))
        except (TypeError, ValueError) as exc:
            raise SpecError(f"bad factor {d!r}: {exc}") from exc

    def to_json(self) -> dict:
        return {"type": self.label, "ramification": self.ramification,
                "inner_form": self.inner_form, "isotropic": self.isotropic,
                "residue_degree": self.residue_degree, "isogeny": self.isogeny}


@dataclass(frozen=True)
class PadicSpec:
    p: int
    q: int
    factors: tuple[PadicFactorSpec, ...]

    def __post_init__(self):
        if not self.factors:
            raise SpecError("at least one factor is required")
        if self.q < 2 or self.p < 2:
            raise SpecError("p and q must be >= 2")
        if not _is_power(self.q, self.p):
            raise SpecError(f"q = {self.q} is not a power of p = {self.p}")

    @classmethod
    def from_json(cls, d: dict) -> PadicSpec:
        if not isinstance(d, dict) or not {"p", "q", "factors"} <= d.keys():
            raise SpecError("p-adic spec needs 'p', 'q' and 'factors'")
        try:
            p, q = int(d["p"]), int(d["q"])
        except (TypeError, ValueError) as exc:
            raise SpecError("p and q must be integers") from exc
        return cls(p, q, tuple(PadicFactorSpec.from_json(f) for f in d["factors"]))

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "factors": [f.to_json() for f in self.factors]}


def _is_power(q: int, p: int) -> bool:
    while q % p == 0:
        q //= p
    return q == 1


# ------------------------------------------------------------------ type map

@dataclass(frozen=True)
class QuotientType:
    """Reductive quotient at an absolutely special vertex."""

    factor: Factor | None      # None: ramified twisted type, only known to be non-simply-laced
    q: int
    source: str

    @property
    def simply_laced(self) -> bool | None:
        if self.factor is None:
            return False
        return self.factor.letter in "ADE"

    @property
    def label(self) -> str:
        if self.factor is None:
            return f"non-simply-laced (from ramified {self.source})"
        return f"{self.factor.label}({self.factor.effective_q(self.q)})"


def reductive_quotient_type(factor: PadicFactorSpec, q: int) -> QuotientType:
    if not factor.splits_unramified:
        return QuotientType(None, q, factor.label)
    iso = factor.isogeny if factor.isogeny in ("sc", "adjoint") else "sc"
    f = Factor(factor.letter, factor.rank, factor.twist, iso, factor.residue_degree)
    return QuotientType(f, q, factor.label)


# --------------------------------------------------- the torus-splitting condition

class HypCase(str, Enum):
    UNRAMIFIED = "unramified-split"
    WILD = "wild"
    SIMPLY_CONNECTED = "simply-connected"
    UNITARY = "unitary"
    P_EQUALS_2 = "p=2"


@dataclass(frozen=True)
class TorusSplitStatus:
    satisfied: bool
    case: HypCase | None

    @property
    def status(self) -> str:
        return "Satisfied" if self.satisfied else "Unknown"


def torus_split_status(factor: PadicFactorSpec, p: int) -> TorusSplitStatus:
    """Sufficient conditions for the odd part of the bounded torus quotient to split off."""
    if factor.splits_unramified:
        return TorusSplitStatus(True, HypCase.UNRAMIFIED)
    if factor.ramification == "wild":
        return TorusSplitStatus(True, HypCase.WILD)
    if factor.isogeny == "sc":
        return TorusSplitStatus(True, HypCase.SIMPLY_CONNECTED)
    if factor.letter == "A" and factor.twist == 2:
        return TorusSplitStatus(True, HypCase.UNITARY)
    if p == 2:
        return TorusSplitStatus(True, HypCase.P_EQUALS_2)
    return TorusSplitStatus(False, None)


# ---------------------------------------------------------------- decisions

CITE_DEPTH0 = "inflate a cuspidal of the reductive quotient at a vertex and induce"
CITE_REGULAR = "DL cuspidal of the reductive quotient at an absolutely special vertex"
CITE_REGULAR_OUT = "reductive quotient has a 2A2(2) factor"
CITE_SD_REGULAR = ("self-dual DL cuspidal of the quotient extended through the odd part "
                   "of the torus")
CITE_SD_NO = ("p odd, isotropic inner form of a split A_n (n even): odd isogeny to an "
              "inner form of PGL, whose supercuspidals are never self-dual")
CITE_SD_OUT = "outside the hypotheses of the regular construction"
CITE_P2 = "p = 2: odd isogeny to split-off SL and SU(3) factors, all handled directly"
CITE_P2_OUT = "p = 2, q = 2 with a 2A3 or 2A4 factor is not covered"
NOTE_ANISOTROPIC = "self-dual supercuspidals exist but are not regular"


def decide_padic(spec: PadicSpec) -> DecisionReport:
    p, q = spec.p, spec.q
    quotients = [reductive_quotient_type(f, q) for f in spec.factors]
    finite = GroupSpec(q, tuple(t.factor for t in quotients if t.factor is not None)) \
        if any(t.factor is not None for t in quotients) else None
    hyp = hypothesis_status(finite) if finite is not None else None
    hyp_a = hyp.hyp_a if hyp else True
    hyp_b = hyp.hyp_b if hyp else True
    splits = [torus_split_status(f, p) for f in spec.factors]

    verdicts = {"depth0_sc": VerdictEntry(Verdict.YES, CITE_DEPTH0)}
    verdicts["regular_depth0_sc"] = (VerdictEntry(Verdict.YES, CITE_REGULAR) if hyp_a
                                     else VerdictEntry(Verdict.OUTSIDE, CITE_REGULAR_OUT))

    a_even = [f for f in spec.factors if f.is_A_even()]
    blocking = [f for f in a_even if f.isotropic]
    anisotropic = [f for f in a_even if not f.isotropic]
    notes = [f"{f.label} (anisotropic): {NOTE_ANISOTROPIC}" for f in anisotropic]

    inside = hyp_a and hyp_b and all(s.satisfied for s in splits)
    if p != 2 and blocking:
        sd_reg = VerdictEntry(Verdict.NO, CITE_SD_NO)
    elif inside and not a_even:
        sd_reg = VerdictEntry(Verdict.YES, CITE_SD_REGULAR)
    else:
        sd_reg = VerdictEntry(Verdict.OUTSIDE, CITE_SD_OUT)
    verdicts["sd_regular_depth0_sc"] = sd_reg

    if p == 2:
        small = [f for f in spec.factors if f.letter == "A" and f.twist == 2 and f.rank in (3, 4)]
        if q == 2 and small:
            verdicts["sd_sc"] = VerdictEntry(Verdict.OUTSIDE, CITE_P2_OUT)
        else:
            verdicts["sd_sc"] = VerdictEntry(Verdict.YES, CITE_P2)
    elif sd_reg.verdict == Verdict.YES:
        verdicts["sd_sc"] = VerdictEntry(Verdict.YES, CITE_SD_REGULAR)
    elif sd_reg.verdict == Verdict.NO:
        verdicts["sd_sc"] = VerdictEntry(Verdict.NO, CITE_SD_NO)
    else:
        verdicts["sd_sc"] = VerdictEntry(Verdict.OUTSIDE, CITE_SD_OUT)

    details = {
        "reductive_quotients": [t.label for t in quotients],
        "torus_splitting": [{"factor": f.label, "status": s.status,
                             "case": s.case.value if s.case else None}
                            for f, s in zip(spec.factors, splits)],
    }
    return DecisionReport({k: verdicts[k] for k in PADIC_QUESTIONS}, hyp, notes, details=details)
