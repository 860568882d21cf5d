"""Character groups of elliptic tori and the brute-force search over them.

``L = X / (q w - 1) X`` with ``w = sigma0 . omega^{-1}``; the twisted
centralizer acts on ``L`` and ``w^{-1}`` descends to multiplication by ``q``.
Everything in this module is exhaustive: it is the reference oracle that the
rule engines are checked against.
"""

from __future__ import annotations

import logging
import math
import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CapExceeded, NonElliptic
from .lattice import AbHom, Cokernel, FinAbGroup, IntMatrix, cokernel, induce_endomorphism
from .rootdata import RootDatum
from .weyl import (TwistedClass, WeylGroup, char_poly, elliptic_classes, enumerate_weyl,
                   poly_eval)

logger = logging.getLogger(__name__)

DEFAULT_CAP = 10**6
IMAGE_CLOSURE_CAP = 10**5


def search_cap() -> int:
    raw = os.environ.get("CUSP_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"CUSP_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError("CUSP_CAP must be positive")
    return cap


Element = tuple[int, ...]


@dataclass(eq=False)
class LinearAction:
    """A finite group acting linearly on ``Z/m_1 x ... x Z/m_k``.

    ``gens`` are integer matrices (acting on column vectors, reduced mod the
    moduli) and ``group_order`` is the order of the abstract acting group,
    which may act non-faithfully. General position means trivial stabilizer
    in the abstract group, i.e. an orbit of full length.
    """

    moduli: tuple[int, ...]
    gens: tuple[IntMatrix, ...]
    group_order: int

    @property
    def size(self) -> int:
        return math.prod(self.moduli)

    def reduce(self, v: Iterable[int]) -> Element:
        return tuple(x % m for x, m in zip(v, self.moduli))

    def apply(self, g: IntMatrix, v: Sequence[int]) -> Element:
        return self.reduce(g @ tuple(v))

    def neg(self, v: Sequence[int]) -> Element:
        return self.reduce(-x for x in v)

    def orbit(self, v: Sequence[int]) -> set[Element]:
        start = self.reduce(v)
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for g in self.gens:
                y = self.apply(g, x)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def is_general_position(self, v: Sequence[int]) -> bool:
        return len(self.orbit(v)) == self.group_order

    def is_conjugate_self_dual(self, v: Sequence[int]) -> bool:
        return self.neg(v) in self.orbit(v)

    # -- vectorized sweep over the whole group

    def _strides(self) -> np.ndarray:
        k = len(self.moduli)
        strides = np.ones(k, dtype=np.int64)
        for i in range(k - 2, -1, -1):
            strides[i] = strides[i + 1] * self.moduli[i + 1]
        return strides

    def index(self, v: Sequence[int]) -> int:
        return int(np.dot(self.reduce(v), self._strides())) if self.moduli else 0

    def element(self, idx: int) -> Element:
        out = []
        for m in reversed(self.moduli):
            out.append(idx % m)
            idx //= m
        return tuple(reversed(out))

    def _all_elements(self) -> np.ndarray:
        if not self.moduli:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.meshgrid(*[np.arange(m, dtype=np.int64) for m in self.moduli], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def orbit_labels(self, cap: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Orbit label of every element (canonical index order) and orbit sizes."""
        n = self.size
        cap = search_cap() if cap is None else cap
        if n > cap:
            raise CapExceeded(f"|L| = {n} exceeds the search cap {cap}")
        if not self.gens or n == 1:
            return np.arange(n), np.ones(n, dtype=np.int64)
        elems = self._all_elements()
        mods = np.array(self.moduli, dtype=np.int64)
        strides = self._strides()
        src = np.arange(n, dtype=np.int64)
        rows, cols = [], []
        for g in self.gens:
            A = np.array(g.tolist(), dtype=np.int64) % mods[:, None]
            img = (elems @ A.T) % mods
            rows.append(src)
            cols.append(img @ strides)
        graph = coo_matrix((np.ones(n * len(self.gens), dtype=np.int8),
                            (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
        _, labels = connected_components(graph, directed=True, connection="weak")
        return labels, np.bincount(labels)

    def negation_index(self) -> np.ndarray:
        elems = self._all_elements()
        mods = np.array(self.moduli, dtype=np.int64)
        return ((-elems) % mods) @ self._strides() if self.moduli else np.zeros(1, dtype=np.int64)

    def qualifying_mask(self, self_dual: bool, cap: int | None = None,
                        restrict: np.ndarray | None = None) -> np.ndarray:
        labels, sizes = self.orbit_labels(cap)
        mask = sizes[labels] == self.group_order
        if self_dual:
            mask &= labels[self.negation_index()] == labels
        if restrict is not None:
            mask &= restrict
        return mask

    def first(self, self_dual: bool = True, cap: int | None = None,
              restrict: np.ndarray | None = None) -> Element | None:
        hits = np.flatnonzero(self.qualifying_mask(self_dual, cap, restrict))
        return self.element(int(hits[0])) if len(hits) else None

    def all_elements(self) -> np.ndarray:
        return self._all_elements()


@dataclass(eq=False)
class CharGroupL:
    datum: RootDatum
    twisted_class: TwistedClass | None
    omega: IntMatrix
    w: IntMatrix
    q: int
    coker: Cokernel
    frobenius: AbHom
    omega_action: tuple[AbHom, ...]    # images of the centralizer generators
    omega_order: int
    omega_generators: tuple[IntMatrix, ...] = field(repr=False)

    @property
    def group(self) -> FinAbGroup:
        return self.coker.group

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.group.invariant_factors

    def proj(self, x: Sequence[int]) -> Element:
        return self.coker.proj(x)

    @cached_property
    def action(self) -> LinearAction:
        return LinearAction(self.invariant_factors,
                            tuple(h.matrix for h in self.omega_action), self.omega_order)

    @cached_property
    def omega_image(self) -> frozenset[AbHom]:
        """The image of the centralizer in ``Aut(L)``."""
        g = self.group
        ident = AbHom(g, g, IntMatrix.identity(g.rank))
        seen = {ident}
        queue = deque([ident])
        while queue:
            h = queue.popleft()
            for s in self.omega_action:
                k = s.compose(h)
                if k not in seen:
                    if len(seen) >= IMAGE_CLOSURE_CAP:
                        raise CapExceeded("image closure exceeds its cap")
                    seen.add(k)
                    queue.append(k)
        return frozenset(seen)

    def elements(self):
        return self.group.elements()


def build_L(rd: RootDatum, cls: TwistedClass | IntMatrix, q: int,
            weyl: WeylGroup | None = None) -> CharGroupL:
    """Character group of the torus attached to a twisted class (or an element ``omega``)."""
    if q < 2:
        raise ValueError("q must be >= 2")
    if isinstance(cls, TwistedClass):
        omega, tc, W = cls.representative, cls, cls.weyl
    else:
        omega, tc, W = cls, None, weyl or enumerate_weyl(rd)
    w = rd.sigma0 @ omega.inverse()
    n = rd.rank
    M = q * w - IntMatrix.identity(n)
    cp = tc.char_poly if tc is not None else char_poly(w)
    if poly_eval(cp, 1) == 0:
        raise NonElliptic("class is not elliptic: the character group is infinite")
    coker = cokernel(M)
    if coker.group.order != abs(poly_eval(cp, q)):
        raise AssertionError("|L| differs from |ch_w(q)|")
    frob = induce_endomorphism(w.inverse(), coker)
    if not frob.is_scalar(q):
        raise AssertionError("w^{-1} does not act on L as multiplication by q")
    if tc is not None:
        cent = tc.centralizer()
    else:
        from .weyl import twisted_centralizer
        cent = twisted_centralizer(W, omega)
    gens = tuple(cent.generator_matrices())
    action = tuple(induce_endomorphism(x, coker) for x in gens)
    return CharGroupL(rd, tc, omega, w, q, coker, frob, action, cent.order, gens)


def is_general_position(L: CharGroupL, v: Sequence[int]) -> bool:
    return L.action.is_general_position(L.group.reduce(v))


def is_conjugate_self_dual(L: CharGroupL, v: Sequence[int]) -> bool:
    return L.action.is_conjugate_self_dual(L.group.reduce(v))


def search_sd_gp(L: CharGroupL, cap: int | None = None) -> Element | None:
    """First conjugate self-dual element in general position, in canonical order."""
    return L.action.first(self_dual=True, cap=cap)


def search_gp(L: CharGroupL, cap: int | None = None) -> Element | None:
    return L.action.first(self_dual=False, cap=cap)


@dataclass(frozen=True)
class SweepHit:
    """A witness: a twisted class and a character of its torus."""

    L: CharGroupL
    element: Element

    @property
    def twisted_class(self) -> TwistedClass | None:
        return self.L.twisted_class


def find_character(rd: RootDatum, q: int, self_dual: bool = True,
                   cap: int | None = None) -> SweepHit | None:
    """Sweep the elliptic classes in canonical order; first hit wins."""
    W = enumerate_weyl(rd)
    for cls in elliptic_classes(W):
        L = build_L(rd, cls, q)
        v = L.action.first(self_dual=self_dual, cap=cap)
        if v is not None:
            return SweepHit(L, v)
    return None


def exists_sd_dl(rd: RootDatum, q: int, cap: int | None = None) -> bool:
    return find_character(rd, q, self_dual=True, cap=cap) is not None


def exists_dl(rd: RootDatum, q: int, cap: int | None = None) -> bool:
    return find_character(rd, q, self_dual=False, cap=cap) is not None
