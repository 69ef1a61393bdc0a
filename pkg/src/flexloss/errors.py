"""Exception hierarchy shared by every flexloss module."""

from __future__ import annotations


class FlexlossError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FlexlossError, ValueError):
    """A parameter lies outside the domain of the requested operation.

    ``field`` names the offending parameter (``"rho"``, ``"k"``, ``"gamma"``, ...).
    """

    def __init__(self, field: str, message: str | None = None):
        self.field = field
        super().__init__(message or f"invalid value for {field!r}")


class UnsupportedDesign(FlexlossError, ValueError):
    pass


class SingularChain(FlexlossError, ArithmeticError):
    """The generator has no unique stationary distribution (absorbing class)."""


class CaseMismatch(FlexlossError, ValueError):
    def __init__(self, field: str, message: str | None = None):
        self.field = field
        super().__init__(message or f"closed form not applicable: {field!r} outside its case")


class BracketError(FlexlossError, RuntimeError):
    """Bisection endpoints do not straddle a sign change. Indicates a bug."""


class OrderingViolation(FlexlossError, RuntimeError):
    pass


class InconsistentOrdering(FlexlossError, RuntimeError):
    pass


class TieBreakUnresolved(FlexlossError, ValueError):
    """The prolonged coefficient sits on (or numerically next to) a threshold.

    ``tied`` lists the designs whose throughputs coincide there.
    """

    def __init__(self, message: str, tied: tuple = ()):
        self.tied = tuple(tied)
        super().__init__(message)


class ConfigError(FlexlossError, ValueError):
    pass
