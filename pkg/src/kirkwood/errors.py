"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end.
The codes are part of the public interface and must not be renumbered.
"""

from __future__ import annotations


class KirkwoodError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(KirkwoodError, ValueError):
    """An invariant of a validated type does not hold.

    ``invariant`` names the violated property and ``magnitude`` the measured
    violation (for instance ``max|M - M^H|``).
    """

    exit_code = 7
    invariant = "invariant"

    def __init__(self, message: str, magnitude: float | None = None):
        self.magnitude = magnitude
        if magnitude is not None:
            message = f"{message} ({self.invariant} violation {magnitude:.3e})"
        super().__init__(message)


class NotHermitian(ValidationError):
    invariant = "hermiticity"


class NotUnitTrace(ValidationError):
    invariant = "unit trace"


class NotPositive(ValidationError):
    invariant = "positivity"


class NotNormalized(ValidationError):
    invariant = "normalization"


class NotIdempotent(ValidationError):
    invariant = "idempotency"


class NotOrthogonal(ValidationError):
    invariant = "orthogonality"


class NotComplete(ValidationError):
    invariant = "completeness"


class DimMismatch(KirkwoodError, ValueError):
    exit_code = 4


class NotComplementary(KirkwoodError, ValueError):
    """Two bases share a vector, i.e. some overlap vanishes.

    ``offending`` lists every ``(k, m)`` with ``|<a_k|b_m>|`` at or below the
    threshold.
    """

    exit_code = 5

    def __init__(self, message: str, offending=()):
        self.offending = [tuple(int(i) for i in pair) for pair in offending]
        super().__init__(f"{message}; {len(self.offending)} vanishing overlap(s)")


class NotPhysical(KirkwoodError, ValueError):
    """A reconstructed matrix is not a density matrix."""

    exit_code = 6


class ZeroProbabilityBranch(KirkwoodError, ValueError):
    exit_code = 8


class IndexOutOfRange(KirkwoodError, IndexError):
    exit_code = 9


class InvalidDimension(KirkwoodError, ValueError):
    exit_code = 10


class ParseError(KirkwoodError, ValueError):
    """A document could not be decoded. ``field`` names the offending key."""

    exit_code = 3

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
