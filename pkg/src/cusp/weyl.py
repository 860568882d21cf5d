"""Weyl group enumeration, twisted conjugacy classes and cyclotomic data.

Elements are stored as a stacked numpy array of integer matrices acting on
the character lattice ``X``; entries of Weyl group matrices are small, so
``int64`` is exact. Everything that feeds a determinant goes back through
:class:`~cusp.lattice.IntMatrix`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy import totient

from .errors import NotCyclotomic, TooLarge
from .lattice import IntMatrix
from .rootdata import RootDatum

logger = logging.getLogger(__name__)

ENUMERATION_CEILING = 200_000


def _np(m: IntMatrix) -> np.ndarray:
    return np.array(m.tolist(), dtype=np.int64).reshape(m.nrows, m.ncols)


def _im(a: np.ndarray) -> IntMatrix:
    return IntMatrix.from_rows(a.tolist())


@dataclass(eq=False)
class WeylGroup:
    datum: RootDatum
    mats: np.ndarray                     # shape (N, r, r), lexicographically sorted
    index: dict[bytes, int] = field(repr=False)
    generators: tuple[int, ...]          # indices of the simple reflections
    identity: int

    def __len__(self) -> int:
        return len(self.mats)

    @property
    def order(self) -> int:
        return len(self.mats)

    def element(self, i: int) -> IntMatrix:
        return _im(self.mats[i])

    def index_of(self, m) -> int:
        a = _np(m) if isinstance(m, IntMatrix) else np.asarray(m, dtype=np.int64)
        return self.index[np.ascontiguousarray(a).tobytes()]

    def indices_of(self, batch: np.ndarray) -> np.ndarray:
        batch = np.ascontiguousarray(batch)
        return np.fromiter((self.index[b.tobytes()] for b in batch), dtype=np.int64,
                           count=len(batch))

    def closure(self, gens: Sequence[int]) -> np.ndarray:
        """Sorted indices of the subgroup generated by ``gens``."""
        return np.array(sorted(_closure(self.mats[list(gens)], self.index)), dtype=np.int64)


def _closure(gens: np.ndarray, index: dict[bytes, int]) -> set[int]:
    r = gens.shape[1]
    ident = np.eye(r, dtype=np.int64)
    seen = {index[ident.tobytes()]}
    frontier = ident[None]
    while len(frontier):
        new = []
        for g in gens:
            prod = np.ascontiguousarray(np.matmul(g, frontier))
            for p in prod:
                k = index[p.tobytes()]
                if k not in seen:
                    seen.add(k)
                    new.append(p)
        frontier = np.array(new, dtype=np.int64).reshape(-1, r, r)
    return seen


@lru_cache(maxsize=32)
def enumerate_weyl(rd: RootDatum, ceiling: int = ENUMERATION_CEILING) -> WeylGroup:
    expected = rd.weyl_order
    if expected > ceiling:
        raise TooLarge(f"|W({rd.label})| = {expected} exceeds the enumeration ceiling {ceiling}")
    r = rd.rank
    gens = [_np(s) for s in rd.reflections]
    ident = np.eye(r, dtype=np.int64)
    seen = {ident.tobytes()}
    elements = [ident]
    frontier = ident[None]
    while len(frontier):
        new = []
        for g in gens:
            prod = np.ascontiguousarray(np.matmul(g, frontier))
            for p in prod:
                key = p.tobytes()
                if key not in seen:
                    seen.add(key)
                    new.append(p)
        elements.extend(new)
        frontier = np.array(new, dtype=np.int64).reshape(-1, r, r)
    mats = np.array(elements, dtype=np.int64)
    if len(mats) != expected:
        raise RuntimeError(f"closure gave {len(mats)} elements, expected {expected}")
    flat = mats.reshape(len(mats), -1)
    order = np.lexsort(flat.T[::-1])
    mats = np.ascontiguousarray(mats[order])
    index = {m.tobytes(): i for i, m in enumerate(mats)}
    gen_idx = tuple(index[g.tobytes()] for g in gens)
    logger.debug("enumerated W(%s): %d elements", rd.label, len(mats))
    return WeylGroup(rd, mats, index, gen_idx, index[ident.tobytes()])


# ------------------------------------------------------------ polynomials

def char_poly(m: IntMatrix) -> tuple[int, ...]:
    """Coefficients of ``det(xI - m)``, lowest degree first (Faddeev-LeVerrier)."""
    n = m.nrows
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    ident = IntMatrix.identity(n)
    M = IntMatrix.zeros(n, n)
    for k in range(1, n + 1):
        M = m @ M + coeffs[n - k + 1] * ident
        tr = (m @ M).trace()
        assert tr % k == 0
        coeffs[n - k] = -tr // k
    return tuple(coeffs)


def poly_eval(coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_divmod(num, den):
    """Division by a monic polynomial; coefficients lowest first."""
    num = list(num)
    dq = len(den) - 1
    if len(num) - 1 < dq:
        return [0], num
    quot = [0] * (len(num) - dq)
    for k in range(len(num) - 1, dq - 1, -1):
        c = num[k]
        quot[k - dq] = c
        if c:
            for j, d in enumerate(den):
                num[k - dq + j] -= c * d
    rem = num[:dq] or [0]
    while len(rem) > 1 and rem[-1] == 0:
        rem.pop()
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> tuple[int, ...]:
    """``Phi_d`` as coefficients, lowest degree first."""
    num = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            num, rem = _poly_divmod(num, cyclotomic(e))
            assert rem == [0]
    return tuple(num)


def cyclotomic_factor(poly: Sequence[int]) -> list[tuple[int, int]]:
    """Factor a monic integer polynomial into cyclotomic polynomials."""
    poly = list(poly)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    deg = len(poly) - 1
    if poly[-1] != 1:
        raise NotCyclotomic("polynomial is not monic")
    factors = []
    d = 1
    # phi(d) >= sqrt(d/2), so d <= 2 * deg**2 bounds the candidates
    while d <= max(2, 2 * deg * deg) and len(poly) > 1:
        if totient(d) <= len(poly) - 1:
            mult = 0
            while len(poly) > 1:
                quot, rem = _poly_divmod(poly, cyclotomic(d))
                if rem != [0]:
                    break
                poly = quot
                mult += 1
            if mult:
                factors.append((d, mult))
        d += 1
    if poly != [1]:
        raise NotCyclotomic(f"leftover factor {poly}")
    return factors


def cyclotomic_product(factors: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    out = [1]
    for d, m in factors:
        for _ in range(m):
            out = _poly_mul(out, cyclotomic(d))
    return tuple(out)


def format_cyclotomic(factors: Sequence[tuple[int, int]]) -> str:
    return "".join(f"Phi{d}" + (f"^{m}" if m > 1 else "") for d, m in factors) or "1"


# ------------------------------------------------------- twisted classes

def is_elliptic(omega: IntMatrix, sigma0: IntMatrix) -> bool:
    """True iff ``sigma0 . omega^{-1}`` has no eigenvalue 1."""
    w = sigma0 @ omega.inverse()
    return (w - IntMatrix.identity(w.nrows)).det() != 0


@dataclass(eq=False)
class TwistedCentralizer:
    """Centralizer in ``W`` of ``w = sigma0 . omega^{-1}``."""

    weyl: WeylGroup
    elements: np.ndarray          # sorted W indices
    generators: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def matrices(self) -> list[IntMatrix]:
        return [self.weyl.element(int(i)) for i in self.elements]

    def generator_matrices(self) -> list[IntMatrix]:
        return [self.weyl.element(i) for i in self.generators]


@dataclass(eq=False)
class TwistedClass:
    weyl: WeylGroup
    rep_index: int
    members: np.ndarray                 # sorted W indices
    w: IntMatrix                        # sigma0 . omega^{-1}
    elliptic: bool
    char_poly: tuple[int, ...]
    cyclotomic: tuple[tuple[int, int], ...]
    _centralizer: TwistedCentralizer | None = field(default=None, repr=False)

    @property
    def representative(self) -> IntMatrix:
        return self.weyl.element(self.rep_index)

    @property
    def size(self) -> int:
        return len(self.members)

    def centralizer(self) -> TwistedCentralizer:
        if self._centralizer is None:
            self._centralizer = twisted_centralizer(self.weyl, self.representative)
        return self._centralizer

    @property
    def label(self) -> str:
        return format_cyclotomic(self.cyclotomic)


def _twisted_perms(W: WeylGroup) -> list[np.ndarray]:
    """For each simple reflection ``s``: index map ``omega -> s omega sigma^{-1}(s)^{-1}``."""
    rd = W.datum
    sig = _np(rd.sigma0)
    sig_inv = _np(rd.sigma0.inverse())
    perms = []
    for g in W.generators:
        s = W.mats[g]
        right = sig_inv @ s @ sig          # sigma^{-1}(s), an involution in W
        prod = np.matmul(np.matmul(s, W.mats), right)
        perms.append(W.indices_of(prod))
    return perms


def twisted_action(W: WeylGroup, x: IntMatrix, omega: IntMatrix) -> IntMatrix:
    """``x . omega = x omega sigma^{-1}(x)^{-1}`` with ``sigma^{-1}(x) = sigma0^{-1} x sigma0``."""
    s = W.datum.sigma0
    s_inv = s.inverse()
    return x @ omega @ (s_inv @ x @ s).inverse()


@lru_cache(maxsize=32)
def _classes_cached(W: WeylGroup) -> tuple[TwistedClass, ...]:
    n = len(W)
    perms = _twisted_perms(W)
    rows = np.concatenate([np.arange(n)] * len(perms))
    cols = np.concatenate(perms)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    groups = np.split(order, bounds)
    groups.sort(key=lambda g: int(g.min()))
    sigma0 = W.datum.sigma0
    out = []
    for members in groups:
        members = np.sort(members)
        rep = int(members[0])
        omega = W.element(rep)
        w = sigma0 @ omega.inverse()
        cp = char_poly(w)
        out.append(TwistedClass(W, rep, members, w, poly_eval(cp, 1) != 0, cp,
                                tuple(cyclotomic_factor(cp))))
    return tuple(out)


def twisted_classes(W: WeylGroup) -> list[TwistedClass]:
    """All ``sigma0``-twisted conjugacy classes, ordered by canonical representative."""
    return list(_classes_cached(W))


def elliptic_classes(W: WeylGroup) -> list[TwistedClass]:
    return [c for c in twisted_classes(W) if c.elliptic]


def class_of(W: WeylGroup, omega: IntMatrix) -> TwistedClass:
    k = W.index_of(omega)
    for c in twisted_classes(W):
        pos = np.searchsorted(c.members, k)
        if pos < len(c.members) and c.members[pos] == k:
            return c
    raise KeyError("element not in W")


def coxeter_class(W: WeylGroup) -> TwistedClass:
    return class_of(W, W.datum.coxeter_element())


def _generators_of(W: WeylGroup, elements: np.ndarray) -> tuple[int, ...]:
    if len(elements) == len(W):
        return W.generators
    members = set(int(i) for i in elements)
    gens: list[int] = []
    covered = {W.identity}
    for k in elements:
        k = int(k)
        if k in covered:
            continue
        gens.append(k)
        covered = _closure(W.mats[gens], W.index)
        if len(covered) == len(members):
            break
    return tuple(gens)


def twisted_centralizer(W: WeylGroup, omega: IntMatrix) -> TwistedCentralizer:
    w = _np(W.datum.sigma0 @ omega.inverse())
    left = np.matmul(W.mats, w)
    right = np.matmul(w, W.mats)
    mask = np.all((left == right).reshape(len(W), -1), axis=1)
    elements = np.flatnonzero(mask)
    return TwistedCentralizer(W, elements, _generators_of(W, elements))
