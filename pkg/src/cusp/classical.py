"""Product-torus models for unitary and non-split even orthogonal groups.

An elliptic torus of ``U(m)`` or of the non-split ``SO(2n)`` has rational
points ``prod T_{d_i}`` with ``T_d`` cyclic of order ``q^d + 1``. Characters are
written in the same coordinates, ``L = prod Z/(q^{d_i} + 1)``, with
``Z/(q+1)`` sitting inside ``Z/(q^d + 1)`` as the unique subgroup of that order.

Two Weyl models are available for the orthogonal kind:

``"galois"``
    ``Gal(E_d/E)`` on each factor (multiplication by ``q^2``) plus permutations
    of equal factors. This is the only model for the unitary kind.
``"signed"``
    exponents ``a_i`` modulo ``2 d_i`` acting by ``q^{a_i}`` with even total,
    plus permutations. Its order matches the twisted centralizer computed in
    the Weyl group of type ``2D`` (checked in the tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np
from sympy import n_order, primefactors

from .errors import ConstructionFailed, FieldTooSmall, ShapeMismatch
from .lattice import Cokernel, FinAbGroup, IntMatrix, cokernel, induce_endomorphism
from .toruschar import Element, LinearAction

UNITARY = "unitary"
ORTHOGONAL = "orthogonal"
KINDS = (UNITARY, ORTHOGONAL)


@dataclass(frozen=True)
class TorusShape:
    kind: str
    parts: tuple[int, ...]     # non-increasing

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ShapeMismatch(f"unknown torus kind {self.kind!r}")
        if not self.parts or any(d < 1 for d in self.parts):
            raise ShapeMismatch("parts must be positive")
        if tuple(sorted(self.parts, reverse=True)) != self.parts:
            object.__setattr__(self, "parts", tuple(sorted(self.parts, reverse=True)))
        if self.kind == UNITARY and any(d % 2 == 0 for d in self.parts):
            raise ShapeMismatch("unitary shapes need odd parts")
        if self.kind == ORTHOGONAL and len(self.parts) % 2 == 0:
            raise ShapeMismatch("orthogonal shapes need an odd number of parts")

    @property
    def size(self) -> int:
        return sum(self.parts)

    def multiplicities(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.parts:
            out[d] = out.get(d, 0) + 1
        return out

    def goodness(self) -> GoodnessTag:
        ones = self.parts.count(1)
        return GoodnessTag(good=ones <= 1, fine=ones <= 1)

    def __str__(self) -> str:
        return f"{self.kind}{self.parts}"


@dataclass(frozen=True)
class GoodnessTag:
    """``good``: at most one ``T_1`` factor. ``fine`` is the same condition seen on the pullback."""

    good: bool
    fine: bool


def _partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of ``n`` in reverse lexicographic order."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def enumerate_shapes(kind: str, size: int) -> list[TorusShape]:
    if size < 1:
        raise ValueError("size must be >= 1")
    if kind == UNITARY:
        keep = (p for p in _partitions(size) if all(d % 2 for d in p))
    elif kind == ORTHOGONAL:
        keep = (p for p in _partitions(size) if len(p) % 2 == 1)
    else:
        raise ShapeMismatch(f"unknown torus kind {kind!r}")
    return [TorusShape(kind, p) for p in keep]


def _diag_scale(k: int, i: int, factor: int) -> IntMatrix:
    rows = IntMatrix.identity(k).tolist()
    rows[i][i] = factor
    return IntMatrix.from_rows(rows)


def _swap(k: int, i: int, j: int) -> IntMatrix:
    perm = list(range(k))
    perm[i], perm[j] = perm[j], perm[i]
    return IntMatrix.from_rows([[int(perm[r] == c) for c in range(k)] for r in range(k)])


@dataclass(frozen=True)
class ProductL:
    shape: TorusShape
    q: int
    model: str = "galois"

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if self.model not in ("galois", "signed"):
            raise ValueError(f"unknown Weyl model {self.model!r}")
        if self.model == "signed" and self.shape.kind != ORTHOGONAL:
            raise ValueError("the signed model only applies to orthogonal shapes")

    @property
    def parts(self) -> tuple[int, ...]:
        return self.shape.parts

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.q ** d + 1 for d in self.parts)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @cached_property
    def generators(self) -> tuple[IntMatrix, ...]:
        k, q, parts = len(self.parts), self.q, self.parts
        gens = []
        if self.model == "galois":
            gens += [_diag_scale(k, i, q * q) for i, d in enumerate(parts) if d > 1]
        else:
            gens.append(_diag_scale(k, 0, q * q))
            for i in range(1, k):
                rows = IntMatrix.identity(k).tolist()
                rows[0][0] = q
                rows[i][i] = q
                gens.append(IntMatrix.from_rows(rows))
        gens += [_swap(k, i, i + 1) for i in range(k - 1) if parts[i] == parts[i + 1]]
        return tuple(g for g in gens if g != IntMatrix.identity(k))

    @property
    def group_order(self) -> int:
        mult = self.shape.multiplicities()
        if self.model == "galois":
            return math.prod(d ** m * math.factorial(m) for d, m in mult.items())
        return math.prod((2 * d) ** m * math.factorial(m) for d, m in mult.items()) // 2

    @cached_property
    def action(self) -> LinearAction:
        return LinearAction(self.moduli, self.generators, self.group_order)

    def reduce(self, v: Sequence[int]) -> Element:
        return self.action.reduce(v)

    def is_general_position(self, v: Sequence[int]) -> bool:
        return self.action.is_general_position(v)

    def is_conjugate_self_dual(self, v: Sequence[int]) -> bool:
        return self.action.is_conjugate_self_dual(v)

    def embed_unit(self, i: int, x: int) -> int:
        """Image of ``x in Z/(q+1)`` inside factor ``i``."""
        return x * (self.moduli[i] // (self.q + 1)) % self.moduli[i]


def build_product_L(shape: TorusShape, q: int, model: str = "galois") -> ProductL:
    return ProductL(shape, q, model)


# ------------------------------------------------------------ SU and PU levels

@dataclass(eq=False)
class SUQuotient:
    """Characters of ``T cap SU``: ``L`` modulo the diagonal copy of ``Z/(q+1)``."""

    parent: ProductL
    coker: Cokernel
    action: LinearAction

    @property
    def group(self) -> FinAbGroup:
        return self.coker.group

    def proj(self, v: Sequence[int]) -> Element:
        return self.coker.proj(tuple(v))


def su_quotient(L: ProductL) -> SUQuotient:
    if L.shape.kind != UNITARY:
        raise ShapeMismatch("SU restriction needs a unitary shape")
    k = len(L.moduli)
    diag_gen = [L.embed_unit(i, 1) for i in range(k)]
    rel = IntMatrix.from_columns(list(IntMatrix.diagonal(L.moduli).columns) + [diag_gen])
    coker = cokernel(rel)
    gens = tuple(induce_endomorphism(g, coker).matrix for g in L.generators)
    return SUQuotient(L, coker, LinearAction(coker.group.invariant_factors, gens, L.group_order))


def restrict_to_SU(L: ProductL, v: Sequence[int]) -> tuple[SUQuotient, Element]:
    Lp = su_quotient(L)
    return Lp, Lp.proj(L.reduce(v))


@dataclass(eq=False)
class SumZeroSubgroup:
    """Characters of ``L`` that are trivial on the center, i.e. come from ``PU``.

    The center is the diagonal ``T_1``; restricting a character to it reduces
    each coordinate mod ``q + 1`` and adds them up.
    """

    parent: ProductL

    def contains(self, v: Sequence[int]) -> bool:
        m = self.parent.q + 1
        return sum(x % m for x in self.parent.reduce(v)) % m == 0

    def mask(self) -> np.ndarray:
        elems = self.parent.action.all_elements()
        return (elems % (self.parent.q + 1)).sum(axis=1) % (self.parent.q + 1) == 0

    @property
    def order(self) -> int:
        return self.parent.order // (self.parent.q + 1)

    def elements(self) -> Iterator[Element]:
        return (v for v in np.ndindex(*self.parent.moduli) if self.contains(v))


def sum_zero_subgroup(L: ProductL) -> SumZeroSubgroup:
    if L.shape.kind != UNITARY:
        raise ShapeMismatch("the central-character condition is for unitary shapes")
    return SumZeroSubgroup(L)


# -------------------------------------------------------------- constructions

def _odd_prime_element(q: int, k: int) -> int | None:
    """Element of ``Z/(q^k+1)`` of prime order ``l`` with ``ord_l(q) = 2k``; smallest ``l``."""
    n = q ** k + 1
    for p in primefactors(n):
        if math.gcd(p, q) == 1 and n_order(q, p) == 2 * k:
            return n // p
    return None


def _verify(L: ProductL, v: Element) -> Element:
    if not (L.is_general_position(v) and L.is_conjugate_self_dual(v)):
        raise ConstructionFailed(f"{v} is not conjugate self-dual in general position on {L.shape}")
    return v


def construct_v_element(L: ProductL) -> Element:
    """Conjugate self-dual element in general position for the paired shapes.

    Accepted shapes: two copies of ``T_{k1}``, optionally two of ``T_{k2}``
    (both ``> 1`` and distinct), and at most three copies of ``T_1``.
    """
    mult = L.shape.multiplicities()
    ones = mult.pop(1, 0)
    big = sorted(mult, reverse=True)
    if ones > 3 or not 1 <= len(big) <= 2 or any(mult[k] != 2 for k in big):
        raise ShapeMismatch(f"{L.shape} is not of the paired form")
    q = L.q
    coords: list[int] = []
    for k in big:
        n = q ** k + 1
        if (k, q) == (3, 2):
            vk, wk = 1, n - 1
        else:
            vk = _odd_prime_element(q, k)
            if vk is None:
                raise ConstructionFailed(f"no odd prime of order 2k in Z/{n}")
            wk = q * vk % n if k % 2 == 0 else -vk % n
        coords += [vk, wk]
    coords += [[], [0], [1, q], [1, q, 0]][ones]
    return _verify(L, L.reduce(coords))


def construct_u_crude(n: int, q: int) -> Element:
    """Distinct-coordinate element of ``(Z/(q+1))^n`` closed under negation."""
    if n < 1:
        raise ValueError("n must be >= 1")
    bound = n - 1 if (q % 2 == 0 and n % 2 == 1) else n
    if q < bound:
        raise FieldTooSmall(f"need q >= {bound} for n = {n}, got q = {q}")
    coords = [] if n % 2 == 0 else [0]
    for j in range(1, n // 2 + 1):
        coords += [j, -j]
    L = ProductL(TorusShape(UNITARY, (1,) * n), q)
    return _verify(L, L.reduce(coords))


@dataclass(frozen=True)
class SUWitness:
    """A character of ``U(n)`` checked at the ``U``, ``PU`` and ``SU`` levels."""

    L: ProductL
    element: Element
    su_element: Element
    prime: int | None       # order of the chosen element in T_k; None after exhaustive search


def _good_at_all_levels(L: ProductL, Lp: SUQuotient, v: Element) -> bool:
    return (L.is_general_position(v) and L.is_conjugate_self_dual(v)
            and sum_zero_subgroup(L).contains(v)
            and Lp.action.is_general_position(Lp.proj(v)))


def construct_su8_12(n: int, q: int) -> SUWitness:
    if n not in (8, 12):
        raise ValueError("only n = 8 and n = 12 are handled here")
    k = n // 2 - 1
    L = ProductL(TorusShape(UNITARY, (k, k, 1, 1)), q)
    Lp = su_quotient(L)
    big = q ** k + 1
    primes = [p for p in primefactors(big) if (q + 1) % p]
    if primes:
        ell = primes[0]
        c = big // ell
        v = L.reduce((c, -c, 1, -1))
        if _good_at_all_levels(L, Lp, v):
            return SUWitness(L, v, Lp.proj(v), ell)
        raise ConstructionFailed(f"scripted element {v} failed verification")
    # no prime of T_k avoids q + 1: search everything
    su_gp = Lp.action.qualifying_mask(self_dual=False)
    to_su = np.array([Lp.action.index(Lp.proj(tuple(int(x) for x in e)))
                      for e in L.action.all_elements()])
    mask = L.action.qualifying_mask(True, restrict=sum_zero_subgroup(L).mask()) & su_gp[to_su]
    hits = np.flatnonzero(mask)
    if not len(hits):
        raise ConstructionFailed(f"no character of U({n}) over F_{q} passes all levels")
    v = L.action.element(int(hits[0]))
    return SUWitness(L, v, Lp.proj(v), None)


# ------------------------------------------------------------------- sweeps

def sweep_levels(m: int, q: int) -> dict[str, Element | None]:
    """First csd+gp witness at the U, PU and SU levels over all unitary shapes of ``m``."""
    found: dict[str, Element | None] = {"U": None, "PU": None, "SU": None}
    for shape in enumerate_shapes(UNITARY, m):
        L = ProductL(shape, q)
        u_mask = L.action.qualifying_mask(True)
        if found["U"] is None and u_mask.any():
            found["U"] = (shape.parts, L.action.element(int(np.flatnonzero(u_mask)[0])))
        pu = u_mask & sum_zero_subgroup(L).mask()
        if found["PU"] is None and pu.any():
            found["PU"] = (shape.parts, L.action.element(int(np.flatnonzero(pu)[0])))
        if found["SU"] is None:
            Lp = su_quotient(L)
            hit = Lp.action.first(self_dual=True)
            if hit is not None:
                found["SU"] = (shape.parts, hit)
    return found
