"""Exception hierarchy shared by every module."""

from __future__ import annotations


class GaussExtremalError(Exception):
    """Base class for all package errors."""


class DomainError(GaussExtremalError, ValueError):
    """Inputs outside the mathematical domain of an operation."""


class RangeError(GaussExtremalError, OverflowError):
    """Result not representable in double precision."""


class NumericalError(GaussExtremalError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``details`` carries whatever diagnostic numbers the failing routine had
    (achieved error estimate, partial sums, offending index, ...).
    """

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class ConvergenceError(NumericalError):
    pass


class TruncationError(NumericalError):
    """The stored zero table is too short to certify a truncated sum."""


class IllConditionedError(NumericalError):
    pass


class ConsistencyError(NumericalError):
    """A constructed object violates a property it must satisfy by theory."""
