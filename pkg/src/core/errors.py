"""Exception hierarchy for PLQ functions and the algorithms built on them"""

from typing import Optional


class PlqError(ValueError):
    """Base class for every error raised by the library"""


class PlqValidationError(PlqError):
    """A PLQ matrix breaks one of the structural rules

    Attributes:
        row: 0-based index of the offending row (None when not row specific)
    """

    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(message)
        self.row = row


class EmptyInputError(PlqValidationError):
    """No rows were given"""


class MalformedRowError(PlqValidationError):
    """A row does not hold four numbers, or holds NaN"""


class NotSortedError(PlqValidationError):
    """Breakpoints are not strictly increasing"""


class NonConvexPieceError(PlqValidationError):
    """A piece has a negative quadratic coefficient"""


class SlopeDecreasingError(PlqValidationError):
    """The derivative drops across a breakpoint"""


class DiscontinuousError(PlqValidationError):
    """Adjacent finite pieces disagree at their shared breakpoint"""


class BadInfinityConventionError(PlqValidationError):
    """Infinite entries sit where the matrix format does not allow them"""


class PlqParseError(PlqError):
    """A line of a PLQ text file cannot be read

    Attributes:
        line: 1-based line number in the source text
    """

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class OutOfDomainError(PlqError):
    """The point is outside dom(f)"""


class NonPositiveEpsilonError(PlqError):
    """Epsilon must be a finite positive number"""


class InfiniteBreakpointError(PlqError):
    """The requested breakpoint is the +inf sentinel"""


class NoCrossingError(PlqError):
    """The conjugate never meets the support line inside the bracket"""


class NoRootError(PlqError):
    """A tangent equation has no usable root (parallel lines included)"""


class RootOutsidePieceError(PlqError):
    """A tangent equation root falls outside the piece it was solved on"""


class UnsortedInputError(PlqError):
    """A grid of evaluation points is not sorted ascending"""
