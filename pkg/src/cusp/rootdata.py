"""Based root data for the supported Cartan types and isogenies.

The character lattice ``X`` is stored by a basis written in fundamental-weight
coordinates, so ``Q <= X <= P`` is explicit: the simply connected form has
``X = P`` and the adjoint form ``X = Q``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import LatticeNotStable, SpecError, UnsupportedType
from .lattice import IntMatrix, smith_normal_form

TYPES = ("A", "B", "C", "D", "E", "F", "G")

# Orders of Weyl groups for types whose order does not follow from rank alone.
_EXCEPTIONAL_W = {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
                  ("F", 4): 1152, ("G", 2): 12}


def _check_type(letter: str, rank: int):
    ok = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }.get(letter, False)
    if not ok:
        raise UnsupportedType(f"unsupported type {letter}{rank}")


def weyl_order(letter: str, rank: int) -> int:
    _check_type(letter, rank)
    if letter == "A":
        return math.factorial(rank + 1)
    if letter in "BC":
        return 2 ** rank * math.factorial(rank)
    if letter == "D":
        return 2 ** (rank - 1) * math.factorial(rank)
    return _EXCEPTIONAL_W[(letter, rank)]


def coxeter_number(letter: str, rank: int) -> int:
    _check_type(letter, rank)
    return {"A": rank + 1, "B": 2 * rank, "C": 2 * rank, "D": 2 * rank - 2,
            "E": {6: 12, 7: 18, 8: 30}.get(rank), "F": 12, "G": 6}[letter]


def _half(x) -> Fraction:
    return Fraction(x, 2)


def simple_roots(letter: str, rank: int) -> list[tuple[Fraction, ...]]:
    """Simple roots in an orthonormal coordinate space, Bourbaki numbering."""
    _check_type(letter, rank)
    n = rank

    def e(i, dim):
        return [Fraction(int(k == i)) for k in range(dim)]

    def diff(i, j, dim):
        return tuple(a - b for a, b in zip(e(i, dim), e(j, dim)))

    if letter == "A":
        return [diff(i, i + 1, n + 1) for i in range(n)]
    if letter == "B":
        return [diff(i, i + 1, n) for i in range(n - 1)] + [tuple(e(n - 1, n))]
    if letter == "C":
        return [diff(i, i + 1, n) for i in range(n - 1)] + [tuple(2 * x for x in e(n - 1, n))]
    if letter == "D":
        last = tuple(a + b for a, b in zip(e(n - 2, n), e(n - 1, n)))
        return [diff(i, i + 1, n) for i in range(n - 1)] + [last]
    if letter == "E":
        a1 = tuple([_half(1)] + [_half(-1)] * 6 + [_half(1)])
        a2 = tuple(a + b for a, b in zip(e(0, 8), e(1, 8)))
        a3 = diff(1, 0, 8)
        rest = [diff(k + 1, k, 8) for k in range(1, 6)]
        return ([a1, a2, a3] + rest)[:n]
    if letter == "F":
        return [diff(1, 2, 4), diff(2, 3, 4), tuple(e(3, 4)),
                tuple(_half(x) for x in (1, -1, -1, -1))]
    # G2: short root first
    return [tuple(Fraction(x) for x in (1, -1, 0)), tuple(Fraction(x) for x in (-2, 1, 1))]


@lru_cache(maxsize=None)
def cartan_matrix(letter: str, rank: int) -> IntMatrix:
    """``C[i, j] = <alpha_i, alpha_j^vee>``; row ``i`` is ``alpha_i`` in weight coordinates."""
    roots = simple_roots(letter, rank)

    def dot(a, b):
        return sum(x * y for x, y in zip(a, b))

    rows = []
    for a in roots:
        row = []
        for b in roots:
            val = 2 * dot(a, b) / dot(b, b)
            assert val.denominator == 1
            row.append(int(val))
        rows.append(row)
    return IntMatrix.from_rows(rows)


def diagram_automorphism(letter: str, rank: int, twist: int) -> tuple[int, ...]:
    """Node permutation (0-based) of the given order, or raise."""
    n = rank
    if twist == 1:
        return tuple(range(n))
    if twist == 2:
        if letter == "A" and n >= 2:
            return tuple(n - 1 - i for i in range(n))
        if letter == "D":
            return tuple(range(n - 2)) + (n - 1, n - 2)
        if letter == "E" and n == 6:
            return (5, 1, 4, 3, 2, 0)
    if twist == 3 and letter == "D" and n == 4:
        return (2, 1, 3, 0)
    raise UnsupportedType(f"no diagram automorphism of order {twist} on {letter}{rank}")


_LABEL = re.compile(r"^\s*(?:([123])\s*)?([A-Ga-g])\s*_?\s*(\d+)\s*$")


def parse_label(label: str) -> tuple[str, int, int]:
    """``"2A3"`` -> ``("A", 3, 2)``."""
    m = _LABEL.match(label)
    if not m:
        raise SpecError(f"cannot parse type label {label!r}")
    twist = int(m.group(1) or 1)
    letter = m.group(2).upper()
    rank = int(m.group(3))
    return letter, rank, twist


def format_label(letter: str, rank: int, twist: int = 1) -> str:
    return f"{twist}{letter}{rank}" if twist > 1 else f"{letter}{rank}"


def _lattice_basis(gens: IntMatrix) -> IntMatrix:
    """Basis (as columns) of the lattice spanned by the columns of ``gens``."""
    U, D, _ = smith_normal_form(gens)
    U_inv = U.inverse()
    cols = []
    for i in range(gens.nrows):
        d = D[i, i] if i < D.ncols else 0
        if d == 0:
            raise LatticeNotStable("generators do not span a full-rank lattice")
        cols.append(tuple(d * x for x in U_inv.columns[i]))
    return IntMatrix.from_columns(cols)


def _conjugate_into(B: IntMatrix, A: IntMatrix, adj: IntMatrix, det: int) -> IntMatrix | None:
    """``B^{-1} A B`` if integral, else ``None``; ``adj``/``det`` describe ``B^{-1}``."""
    prod = adj @ A @ B
    if any(x % det for x in prod.entries):
        return None
    return IntMatrix(prod.nrows, prod.ncols, tuple(x // det for x in prod.entries))


@dataclass(frozen=True)
class RootDatum:
    letter: str
    rank: int
    twist: int
    isogeny: str
    basis: IntMatrix                     # columns: basis of X in weight coordinates
    reflections: tuple[IntMatrix, ...]   # simple reflections acting on X
    sigma0: IntMatrix                    # diagram automorphism acting on X
    node_permutation: tuple[int, ...]
    center_order: int                    # [X : Q]
    cartan: IntMatrix = field(repr=False)

    @property
    def label(self) -> str:
        return format_label(self.letter, self.rank, self.twist)

    @property
    def fundamental_group_order(self) -> int:
        """``[P : Q]``, the center order of the simply connected form."""
        return abs(self.cartan.det())

    @property
    def weyl_order(self) -> int:
        return weyl_order(self.letter, self.rank)

    @property
    def is_simply_connected(self) -> bool:
        return self.center_order == self.fundamental_group_order

    def node_orbits(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        orbits = []
        for i in range(self.rank):
            if i in seen:
                continue
            orb = [i]
            j = self.node_permutation[i]
            while j != i:
                orb.append(j)
                j = self.node_permutation[j]
            seen.update(orb)
            orbits.append(tuple(sorted(orb)))
        return sorted(orbits)

    def coxeter_element(self) -> IntMatrix:
        """Product of one simple reflection per diagram-automorphism orbit."""
        w = IntMatrix.identity(self.rank)
        for orb in self.node_orbits():
            w = w @ self.reflections[orb[0]]
        return w

    def frobenius_part(self, omega: IntMatrix) -> IntMatrix:
        """The finite-order lattice map ``w = sigma0 . omega^{-1}``."""
        return self.sigma0 @ omega.inverse()


def _weight_reflection(C: IntMatrix, i: int) -> IntMatrix:
    """``s_i(c) = c - c_i * alpha_i`` in fundamental-weight coordinates."""
    n = C.nrows
    rows = IntMatrix.identity(n).tolist()
    for k in range(n):
        rows[k][i] -= C[i, k]
    return IntMatrix.from_rows(rows)


def build_root_datum(label_or_letter: str, rank: int | None = None, twist: int | None = None,
                     isogeny: str | Sequence[Sequence[int]] = "sc") -> RootDatum:
    """Construct a root datum.

    ``isogeny`` is ``"sc"``, ``"adjoint"`` or a list of extra lattice generators
    in weight coordinates; the lattice used is ``Q`` plus their span.
    """
    if rank is None:
        letter, rank, parsed_twist = parse_label(label_or_letter)
        twist = parsed_twist if twist is None else twist
    else:
        letter = label_or_letter.upper()
    twist = 1 if twist is None else twist
    _check_type(letter, rank)
    perm = diagram_automorphism(letter, rank, twist)

    C = cartan_matrix(letter, rank)
    refl_P = [_weight_reflection(C, i) for i in range(rank)]
    sigma_P = IntMatrix.from_rows(
        [[int(perm[j] == i) for j in range(rank)] for i in range(rank)]
    )

    if isinstance(isogeny, str):
        iso = isogeny.lower()
        if iso in ("sc", "simply_connected", "simply-connected"):
            basis, iso = IntMatrix.identity(rank), "sc"
        elif iso in ("ad", "adjoint"):
            basis, iso = C.T, "adjoint"
        else:
            raise SpecError(f"unknown isogeny {isogeny!r}")
    else:
        gens = [tuple(int(x) for x in g) for g in isogeny]
        if any(len(g) != rank for g in gens):
            raise SpecError("sublattice generators must have length equal to the rank")
        basis = _lattice_basis(IntMatrix.from_columns(list(C.rows) + gens))
        iso = "custom"

    adj, det = basis.adjugate(), basis.det()
    refl = []
    for s in refl_P:
        m = _conjugate_into(basis, s, adj, det)
        if m is None:
            raise LatticeNotStable("lattice is not Weyl-stable")
        refl.append(m)
    sigma = _conjugate_into(basis, sigma_P, adj, det)
    if sigma is None:
        raise LatticeNotStable("lattice is not stable under the diagram automorphism")

    center = abs(C.det()) // abs(basis.det())
    if iso == "custom" and center == abs(C.det()):
        iso = "sc"
    elif iso == "custom" and center == 1:
        iso = "adjoint"
    return RootDatum(letter, rank, twist, iso, basis, tuple(refl), sigma, perm, center, C)


def twisted_coxeter_number(rd: RootDatum) -> int:
    """Order of ``sigma0 . c^{-1}`` for a twisted Coxeter element ``c``."""
    return rd.frobenius_part(rd.coxeter_element()).order()


# ---------------------------------------------------------------- group specs

@dataclass(frozen=True)
class Factor:
    letter: str
    rank: int
    twist: int = 1
    isogeny: str | tuple[tuple[int, ...], ...] = "sc"
    scalars_degree: int = 1

    def __post_init__(self):
        try:
            _check_type(self.letter, self.rank)
            diagram_automorphism(self.letter, self.rank, self.twist)
        except UnsupportedType as exc:
            raise SpecError(str(exc)) from exc
        if self.scalars_degree < 1:
            raise SpecError("scalars_degree must be >= 1")

    @property
    def label(self) -> str:
        return format_label(self.letter, self.rank, self.twist)

    def effective_q(self, q: int) -> int:
        return q ** self.scalars_degree

    def is_A_even(self) -> bool:
        return self.letter == "A" and self.twist == 1 and self.rank % 2 == 0

    def to_json(self) -> dict:
        iso = self.isogeny if isinstance(self.isogeny, str) else [list(g) for g in self.isogeny]
        return {"type": self.label, "isogeny": iso, "scalars_degree": self.scalars_degree}

    @classmethod
    def from_json(cls, d: dict) -> Factor:
        if not isinstance(d, dict) or "type" not in d:
            raise SpecError("each factor needs a 'type'")
        try:
            if "rank" in d:
                letter, rank = str(d["type"]).upper(), int(d["rank"])
                twist = int(d.get("twist", 1))
            else:
                letter, rank, twist = parse_label(str(d["type"]))
                twist = int(d.get("twist", twist))
            iso = d.get("isogeny", "sc")
            if not isinstance(iso, str):
                iso = tuple(tuple(int(x) for x in g) for g in iso)
            return cls(letter, rank, twist, iso, int(d.get("scalars_degree", 1)))
        except (TypeError, ValueError) as exc:
            raise SpecError(f"bad factor {d!r}: {exc}") from exc

    def root_datum(self) -> RootDatum:
        iso = self.isogeny if isinstance(self.isogeny, str) else [list(g) for g in self.isogeny]
        return build_root_datum(self.letter, self.rank, self.twist, iso)


@dataclass(frozen=True)
class GroupSpec:
    q: int
    factors: tuple[Factor, ...]

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 2:
            raise SpecError("q must be an integer >= 2")
        if not self.factors:
            raise SpecError("at least one factor is required")

    def to_json(self) -> dict:
        return {"q": self.q, "factors": [f.to_json() for f in self.factors]}

    @classmethod
    def from_json(cls, d: dict) -> GroupSpec:
        if not isinstance(d, dict) or "q" not in d or "factors" not in d:
            raise SpecError("spec needs 'q' and 'factors'")
        try:
            q = int(d["q"])
        except (TypeError, ValueError) as exc:
            raise SpecError("q must be an integer") from exc
        return cls(q, tuple(Factor.from_json(f) for f in d["factors"]))
