"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CuspError(Exception):
    """Base class for all errors raised by :mod:`cusp`."""


class SingularMatrix(CuspError):
    """The relation matrix has a nontrivial kernel, so the quotient is infinite."""


class DoesNotDescend(CuspError):
    """A lattice endomorphism does not preserve the relation lattice."""


class UnsupportedType(CuspError):
    pass


class LatticeNotStable(CuspError):
    pass


class TooLarge(CuspError):
    """Weyl group order exceeds the enumeration ceiling."""


class NonElliptic(CuspError):
    pass


class NotCyclotomic(CuspError):
    pass


class CapExceeded(CuspError):
    """A character group is larger than the configured search cap."""


class ShapeMismatch(CuspError):
    pass


class ConstructionFailed(CuspError):
    """A scripted construction did not pass brute-force verification."""


class FieldTooSmall(CuspError):
    pass


class UnknownKernel(CuspError):
    pass


class SpecError(CuspError):
    """Malformed group specification."""


class OracleInfeasible(CuspError):
    """The brute-force oracle cannot run on some factor of a spec."""

    def __init__(self, message: str, factor: str | None = None):
        super().__init__(message)
        self.factor = factor
