"""Exact integer matrices, Smith normal form and finite abelian groups.

Everything here uses Python integers, so determinants of the size
``(q+1)**rank`` never overflow. Matrices are small (rank <= 8), so the
algorithms favour clarity over asymptotics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import DoesNotDescend, SingularMatrix


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    nrows: int
    ncols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.nrows * self.ncols:
            raise ValueError(
                f"expected {self.nrows * self.ncols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> IntMatrix:
        rows = [tuple(int(x) for x in r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, cols: Iterable[Iterable[int]]) -> IntMatrix:
        return cls.from_rows(cols).T

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> IntMatrix:
        return cls(nrows, ncols, (0,) * (nrows * ncols))

    @classmethod
    def diagonal(cls, diag: Sequence[int]) -> IntMatrix:
        n = len(diag)
        return cls(n, n, tuple(diag[i] if i == j else 0 for i in range(n) for j in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> list[tuple[int, ...]]:
        c = self.ncols
        return [self.entries[i * c:(i + 1) * c] for i in range(self.nrows)]

    @property
    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(self[i, j] for i in range(self.nrows)) for j in range(self.ncols)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.ncols + j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix.from_rows(self.columns) if self.ncols else IntMatrix(0, self.nrows, ())

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.nrows, self.ncols,
                         tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.nrows, self.ncols,
                         tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.nrows, self.ncols, tuple(-a for a in self.entries))

    def __rmul__(self, k: int) -> IntMatrix:
        return IntMatrix(self.nrows, self.ncols, tuple(k * a for a in self.entries))

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            cols = other.columns
            return IntMatrix.from_rows(
                [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows]
            ) if self.nrows else IntMatrix(0, other.ncols, ())
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise ValueError("shape mismatch")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.rows)

    def __pow__(self, k: int) -> IntMatrix:
        if k < 0:
            return self.inverse() ** (-k)
        result = IntMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def trace(self) -> int:
        return sum(self[i, i] for i in range(min(self.nrows, self.ncols)))

    def det(self) -> int:
        """Bareiss fraction-free elimination."""
        if not self.is_square():
            raise ValueError("determinant of non-square matrix")
        n = self.nrows
        if n == 0:
            return 1
        a = self.tolist()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def inverse_fraction(self) -> list[list[Fraction]]:
        if not self.is_square():
            raise ValueError("inverse of non-square matrix")
        n = self.nrows
        a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
             for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((i for i in range(col, n) if a[i][col] != 0), None)
            if piv is None:
                raise SingularMatrix("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            p = a[col][col]
            a[col] = [x / p for x in a[col]]
            for i in range(n):
                if i != col and a[i][col] != 0:
                    f = a[i][col]
                    a[i] = [x - f * y for x, y in zip(a[i], a[col])]
        return [r[n:] for r in a]

    def adjugate(self) -> IntMatrix:
        d = self.det()
        if d == 0:
            # cofactor expansion; only reached for singular input
            n = self.nrows
            rows = self.rows
            cof = []
            for i in range(n):
                row = []
                for j in range(n):
                    minor = IntMatrix.from_rows(
                        [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
                    ) if n > 1 else IntMatrix(0, 0, ())
                    row.append((-1) ** (i + j) * minor.det())
                cof.append(row)
            return IntMatrix.from_rows(cof).T
        inv = self.inverse_fraction()
        return IntMatrix.from_rows([[int(x * d) for x in r] for r in inv])

    def inverse(self) -> IntMatrix:
        """Inverse of a unimodular matrix; raises if the inverse is not integral."""
        inv = self.inverse_fraction()
        if any(x.denominator != 1 for r in inv for x in r):
            raise ValueError("matrix is not unimodular")
        return IntMatrix.from_rows([[int(x) for x in r] for r in inv])

    def order(self, limit: int = 1000) -> int:
        """Multiplicative order of a finite-order square matrix."""
        ident = IntMatrix.identity(self.nrows)
        p = self
        for k in range(1, limit + 1):
            if p == ident:
                return k
            p = p @ self
        raise ValueError(f"matrix order exceeds {limit}")


def _swap_rows(a, i, j):
    a[i], a[j] = a[j], a[i]


def _swap_cols(a, i, j):
    for r in a:
        r[i], r[j] = r[j], r[i]


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` in Smith normal form.

    ``U`` and ``V`` are unimodular; ``D`` is diagonal with nonnegative
    entries satisfying ``d_i | d_{i+1}`` (zeros last).
    """
    m, n = M.shape
    a = M.tolist()
    u = IntMatrix.identity(m).tolist()
    v = IntMatrix.identity(n).tolist()

    def row_axpy(i, k, c):  # row_i -= c * row_k
        a[i] = [x - c * y for x, y in zip(a[i], a[k])]
        u[i] = [x - c * y for x, y in zip(u[i], u[k])]

    def col_axpy(j, k, c):  # col_j -= c * col_k
        for r in a:
            r[j] -= c * r[k]
        for r in v:
            r[j] -= c * r[k]

    for t in range(min(m, n)):
        nonzero = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nonzero:
            break
        _, i0, j0 = min(nonzero)
        _swap_rows(a, t, i0)
        _swap_rows(u, t, i0)
        _swap_cols(a, t, j0)
        _swap_cols(v, t, j0)
        while True:
            for i in range(t + 1, m):
                if a[i][t]:
                    row_axpy(i, t, a[i][t] // a[t][t])
            for j in range(t + 1, n):
                if a[t][j]:
                    col_axpy(j, t, a[t][j] // a[t][t])
            rest = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
            rest += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
            if rest:
                _, i0, j0 = min(rest)
                if i0 != t:
                    _swap_rows(a, t, i0)
                    _swap_rows(u, t, i0)
                else:
                    _swap_cols(a, t, j0)
                    _swap_cols(v, t, j0)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            row_axpy(t, bad[0], -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return IntMatrix.from_rows(u), IntMatrix.from_rows(a), IntMatrix.from_rows(v)


@dataclass(frozen=True)
class FinAbGroup:
    """Finite abelian group ``Z/d_1 + ... + Z/d_k`` with ``d_1 | ... | d_k``."""

    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        d = self.invariant_factors
        if any(x < 2 for x in d):
            raise ValueError("invariant factors must be >= 2")
        if any(d[i + 1] % d[i] for i in range(len(d) - 1)):
            raise ValueError(f"divisibility chain fails: {d}")

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def is_cyclic(self) -> bool:
        return self.rank <= 1

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def reduce(self, v: Iterable[int]) -> tuple[int, ...]:
        v = tuple(v)
        if len(v) != self.rank:
            raise ValueError("wrong element length")
        return tuple(x % d for x, d in zip(v, self.invariant_factors))

    def add(self, a, b) -> tuple[int, ...]:
        return self.reduce(x + y for x, y in zip(a, b))

    def neg(self, a) -> tuple[int, ...]:
        return self.reduce(-x for x in a)

    def scale(self, k: int, a) -> tuple[int, ...]:
        return self.reduce(k * x for x in a)

    def element_order(self, a) -> int:
        o = 1
        for x, d in zip(a, self.invariant_factors):
            o = math.lcm(o, d // math.gcd(x, d))
        return o

    def elements(self) -> Iterator[tuple[int, ...]]:
        """All elements in lexicographic (canonical) order."""
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)


@dataclass(frozen=True)
class AbHom:
    """Homomorphism between finite abelian groups in invariant-factor coordinates.

    Column ``j`` of ``matrix`` is the image of the ``j``-th generator.
    """

    domain: FinAbGroup
    codomain: FinAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.codomain.rank, self.domain.rank):
            raise ValueError("matrix shape does not match groups")
        cod = self.codomain.invariant_factors
        for j, dj in enumerate(self.domain.invariant_factors):
            for i, di in enumerate(cod):
                if (dj * self.matrix[i, j]) % di:
                    raise ValueError("homomorphism is not well defined")

    def __call__(self, v) -> tuple[int, ...]:
        return self.codomain.reduce(self.matrix @ tuple(v))

    def compose(self, other: AbHom) -> AbHom:
        """``self o other``."""
        if other.codomain != self.domain:
            raise ValueError("non-composable homomorphisms")
        prod = self.matrix @ other.matrix
        red = [[x % d for x in row] for row, d in zip(prod.rows, self.codomain.invariant_factors)]
        return AbHom(other.domain, self.codomain,
                     IntMatrix.from_rows(red) if red else IntMatrix(0, other.domain.rank, ()))

    def is_identity(self) -> bool:
        if self.domain != self.codomain:
            return False
        return all(self(e) == e for e in _unit_vectors(self.domain))

    def is_scalar(self, k: int) -> bool:
        if self.domain != self.codomain:
            return False
        return all(self(e) == self.domain.scale(k, e) for e in _unit_vectors(self.domain))

    def __eq__(self, other):
        if not isinstance(other, AbHom):
            return NotImplemented
        return (self.domain == other.domain and self.codomain == other.codomain
                and all(self(e) == other(e) for e in _unit_vectors(self.domain)))

    def __hash__(self):
        return hash((self.domain, self.codomain,
                     tuple(self(e) for e in _unit_vectors(self.domain))))


def _unit_vectors(g: FinAbGroup):
    return [tuple(int(i == j) for j in range(g.rank)) for i in range(g.rank)]


@dataclass(frozen=True)
class Cokernel:
    """The quotient ``Z^r / M Z^c`` for a relation matrix of full row rank."""

    matrix: IntMatrix
    U: IntMatrix
    U_inv: IntMatrix
    diagonal: tuple[int, ...]
    keep: tuple[int, ...]
    group: FinAbGroup = field(compare=False)

    def proj(self, x: Sequence[int]) -> tuple[int, ...]:
        y = self.U @ tuple(x)
        return tuple(y[i] % self.diagonal[i] for i in self.keep)

    def lift(self, v: Sequence[int]) -> tuple[int, ...]:
        y = [0] * self.matrix.nrows
        for k, i in enumerate(self.keep):
            y[i] = v[k]
        return self.U_inv @ y

    def in_relations(self, x: Sequence[int]) -> bool:
        """True when ``x`` lies in the column span of the relation matrix."""
        y = self.U @ tuple(x)
        return all(yi % di == 0 for yi, di in zip(y, self.diagonal))


def cokernel(M: IntMatrix) -> Cokernel:
    """Finite abelian group ``Z^n / M Z^n`` with its projection.

    Square nonsingular input is the main use; a rectangular ``M`` of full
    row rank is also accepted (the quotient by several relation sets).
    """
    r = M.nrows
    if M.is_square() and M.det() == 0:
        raise SingularMatrix("det M = 0: quotient is infinite (non-elliptic class)")
    U, D, _ = smith_normal_form(M)
    diag = tuple(D[i, i] if i < D.ncols else 0 for i in range(r))
    if any(d == 0 for d in diag):
        raise SingularMatrix("relation lattice does not have full rank")
    keep = tuple(i for i, d in enumerate(diag) if d > 1)
    group = FinAbGroup(tuple(diag[i] for i in keep))
    return Cokernel(M, U, U.inverse(), diag, keep, group)


def descends(A: IntMatrix, coker: Cokernel) -> bool:
    M = coker.matrix
    if M.is_square():
        d = M.det()
        test = M.adjugate() @ A @ M
        return all(x % d == 0 for x in test.entries)
    return all(coker.in_relations(c) for c in (A @ M).columns)


def induce_endomorphism(A: IntMatrix, coker: Cokernel) -> AbHom:
    """The endomorphism of ``coker.group`` induced by a lattice map ``A``."""
    if not descends(A, coker):
        raise DoesNotDescend("A does not preserve the relation lattice")
    B = coker.U @ A @ coker.U_inv
    keep = coker.keep
    mods = coker.group.invariant_factors
    rows = [[B[i, j] % mods[a] for j in keep] for a, i in enumerate(keep)]
    mat = IntMatrix.from_rows(rows) if rows else IntMatrix(0, 0, ())
    return AbHom(coker.group, coker.group, mat)
