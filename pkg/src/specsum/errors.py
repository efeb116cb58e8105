"""Exception and warning types shared across the package."""

import builtins


class SpecsumError(Exception):
    """Base class for all package errors."""


class DomainError(SpecsumError, ValueError):
    """Argument outside the mathematical domain of the requested function."""


class OverflowError(SpecsumError, builtins.OverflowError):
    """Result does not fit in double precision.

    ``log_value`` carries the natural log of the magnitude so callers can
    keep working in a scaled representation.
    """

    def __init__(self, message, log_value=None):
        super().__init__(message)
        self.log_value = log_value


class BracketError(SpecsumError):
    """A sign change could not be isolated."""

    def __init__(self, message, window=None):
        super().__init__(message)
        self.window = window


class ConvergenceError(SpecsumError):
    """Iterative refinement did not converge."""


class UnsupportedError(SpecsumError):
    """Operation not available for the requested geometry."""


class DegenerateError(SpecsumError, ZeroDivisionError):
    """A closed-form denominator vanished."""


class PoleError(SpecsumError):
    """Evaluation point sits on (or too close to) a pole of a series."""


class CoincidenceError(SpecsumError):
    """Two arguments coincide where a divided difference needs them distinct."""


class ValidityError(SpecsumError, ValueError):
    """Parameters violate the hypotheses of an identity."""


class NonConvergence(SpecsumError):
    """Series terms do not decay as declared."""


class SlowConvergenceWarning(UserWarning):
    """Angular sum converges slowly; the tail estimate dominates."""
