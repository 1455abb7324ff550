"""Exception types raised across the package."""

from __future__ import annotations


class KSmoothError(Exception):
    """Base class for every error raised by ksmooth."""


class ExpressionSyntaxError(KSmoothError, ValueError):
    """A scalar expression does not conform to the expression grammar."""


class DivisionByZero(KSmoothError, ZeroDivisionError):
    pass


class DimensionMismatch(KSmoothError, ValueError):
    pass


class InvalidSpace(KSmoothError, ValueError):
    """A norm description violates its invariants (symmetry, extremality, polarity)."""


class DegenerateBall(InvalidSpace):
    pass


class NotPolyhedral(KSmoothError):
    pass


class NotOnSphere(KSmoothError, ValueError):
    pass


class ZeroVector(KSmoothError, ValueError):
    pass


class WrongDimension(KSmoothError, ValueError):
    pass


class ZeroOperator(KSmoothError, ValueError):
    pass


class NonFiniteAttainment(KSmoothError):
    """The numeric maximizer search found a continuum of norm-attaining points."""


class Unsupported(KSmoothError):
    pass


class ParseError(KSmoothError, ValueError):
    """A problem, space or operator file could not be read."""


class Disagreement(KSmoothError):
    """Two computation paths returned different orders of smoothness."""

    def __init__(self, message: str, reports: dict | None = None) -> None:
        super().__init__(message)
        self.reports = reports or {}
