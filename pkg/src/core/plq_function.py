"""Univariate convex lower semi-continuous piecewise linear-quadratic functions"""

import bisect
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Union

import numpy as np

from .data_classes import Domain, Interval, format_number
from .errors import (
    BadInfinityConventionError,
    DiscontinuousError,
    EmptyInputError,
    InfiniteBreakpointError,
    MalformedRowError,
    NonConvexPieceError,
    NotSortedError,
    OutOfDomainError,
    SlopeDecreasingError,
)
from .tolerance import DEFAULT_TOLERANCE, Tolerance

INF = math.inf


@dataclass(frozen=True, eq=False)
class PlqFunction:
    """Convex PLQ function stored as the rows (x_i, a_i, b_i, c_i), i = 0..n

    Piece i is a_i x^2 + b_i x + c_i on (x_{i-1}, x_i] with x_{-1} = -inf and
    x_n = +inf. c_0 = +inf (resp. c_n = +inf) marks a domain bounded on the
    left (resp. right); the boundary point itself belongs to the domain. A
    single row with finite x_0 is the needle function equal to c_0 at x_0.

    Instances are immutable and should be built with validate(). The arrays
    are read-only; Python list copies are kept for scalar hot paths.

    Attributes:
        x: Breakpoints, last entry +inf (except for a needle)
        a: Quadratic coefficients
        b: Linear coefficients
        c: Constants (+inf allowed on the first and last rows only)
    """
    x: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    _xs: List[float] = field(init=False, repr=False)
    _as: List[float] = field(init=False, repr=False)
    _bs: List[float] = field(init=False, repr=False)
    _cs: List[float] = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("x", "a", "b", "c"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            object.__setattr__(self, f"_{name}s", arr.tolist())

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        """Index of the last row (the function has n + 1 pieces)"""
        return len(self._xs) - 1

    @property
    def is_needle(self) -> bool:
        return self.n == 0 and math.isfinite(self._xs[0])

    @property
    def is_left_bounded(self) -> bool:
        return self.n > 0 and self._cs[0] == INF

    @property
    def is_right_bounded(self) -> bool:
        return self.n > 0 and self._cs[-1] == INF

    @property
    def first_piece(self) -> int:
        """Index of the leftmost finite piece"""
        return 1 if self.is_left_bounded else 0

    @property
    def last_piece(self) -> int:
        """Index of the rightmost finite piece"""
        return self.n - 1 if self.is_right_bounded else self.n

    @property
    def matrix(self) -> np.ndarray:
        """The (n+1) x 4 matrix [x, a, b, c]"""
        m = np.column_stack((self.x, self.a, self.b, self.c))
        m.setflags(write=False)
        return m

    def rows(self) -> List[List[float]]:
        return [list(r) for r in zip(self._xs, self._as, self._bs, self._cs)]

    def breakpoint(self, j: int) -> float:
        return self._xs[j]

    def coefficients(self, k: int) -> tuple:
        return self._as[k], self._bs[k], self._cs[k]

    def domain(self) -> Domain:
        if self.is_needle:
            return Domain(self._xs[0], self._xs[0])
        lo = self._xs[0] if self.is_left_bounded else -INF
        hi = self._xs[-2] if self.is_right_bounded else INF
        return Domain(lo, hi)

    def in_domain(self, x: float) -> bool:
        return self.domain().contains(x)

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def piece_value(self, k: int, x: float) -> float:
        """Value of the quadratic formula of piece k at x (ignores the piece's interval)"""
        return (self._as[k] * x + self._bs[k]) * x + self._cs[k]

    def derivative(self, k: int, x: float) -> float:
        """2 a_k x + b_k"""
        return 2.0 * self._as[k] * x + self._bs[k]

    def locate(self, x: float) -> int:
        """Smallest i with x <= x_i, without a domain check"""
        return bisect.bisect_left(self._xs, x)

    def piece_index(self, x: float) -> int:
        """Smallest i with x <= x_i for x in dom(f), found by binary search

        Raises:
            OutOfDomainError: x is outside dom(f)
        """
        if not self.in_domain(x):
            raise OutOfDomainError(f"x={format_number(x)} is outside the domain {self._domain_text()}")
        return self.locate(x)

    def evaluate(self, x: float) -> float:
        """f(x); +inf outside the domain"""
        if math.isnan(x):
            return math.nan
        if self.is_needle:
            return self._cs[0] if x == self._xs[0] else INF
        if not math.isfinite(x) or not self.in_domain(x):
            return INF
        return self.piece_value(max(self.locate(x), self.first_piece), x)

    __call__ = evaluate

    def value_at_breakpoint(self, j: int) -> float:
        """f(x_j), using the finite side at a domain boundary"""
        return self.piece_value(max(j, self.first_piece), self._xs[j])

    def breakpoint_slope(self, i: int) -> float:
        """s_i = 2 a_i x_i + b_i, the derivative of piece i at its right end

        Raises:
            InfiniteBreakpointError: x_i is the +inf sentinel
        """
        if not math.isfinite(self._xs[i]):
            raise InfiniteBreakpointError(f"breakpoint {i} is infinite")
        return self.derivative(i, self._xs[i])

    def subdifferential(self, x: float) -> Interval:
        """The convex subdifferential (the eps = 0 case)"""
        if not self.in_domain(x) or not math.isfinite(x):
            return Interval.empty_set()
        if self.is_needle:
            return Interval.whole_line()
        dom = self.domain()
        if x == dom.lo:
            return Interval(-INF, self.derivative(self.first_piece, x))
        if x == dom.hi:
            return Interval(self.derivative(self.last_piece, x), INF)
        i = self.locate(x)
        left = self.derivative(i, x)
        right = self.derivative(i + 1, x) if x == self._xs[i] else left
        return Interval(left, max(left, right))

    # ------------------------------------------------------------------
    # Transformations
    # ------------------------------------------------------------------

    def reflect(self) -> 'PlqFunction':
        """h(x) = f(-x): breakpoints negated and reversed, b negated"""
        if self.is_needle:
            return PlqFunction(-self.x, self.a, -self.b, self.c)
        xs = np.append(-self.x[-2::-1], INF)
        return PlqFunction(xs, self.a[::-1], -self.b[::-1], self.c[::-1])

    def _domain_text(self) -> str:
        dom = self.domain()
        return f"[{format_number(dom.lo)}, {format_number(dom.hi)}]"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlqFunction):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ("x", "a", "b", "c")
        )

    __hash__ = None

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(format_number(v) for v in row) for row in self.rows()[:6])
        more = " ..." if self.n >= 6 else ""
        return f"PlqFunction(pieces={self.n + 1}, rows=[{rows}{more}])"


RawRows = Union[PlqFunction, np.ndarray, Iterable[Sequence[float]]]


def validate(raw_rows: RawRows, tol: Tolerance = DEFAULT_TOLERANCE) -> PlqFunction:
    """Check a raw PLQ matrix and return it as an immutable PlqFunction

    Args:
        raw_rows: Rows (x, a, b, c), or an existing PlqFunction
        tol: Tolerance for the continuity and slope checks

    Returns:
        The validated function

    Raises:
        PlqValidationError: one of its subclasses, naming the offending row
    """
    if isinstance(raw_rows, PlqFunction):
        raw_rows = raw_rows.rows()
    rows = _coerce_rows(raw_rows)
    n = len(rows) - 1
    xs = [r[0] for r in rows]
    a_s = [r[1] for r in rows]
    bs = [r[2] for r in rows]
    cs = [r[3] for r in rows]

    if n == 0:
        _validate_single_row(xs[0], a_s[0], bs[0], cs[0])
        return PlqFunction(xs, a_s, bs, cs)

    for i in range(n):
        if not math.isfinite(xs[i]):
            raise BadInfinityConventionError(
                f"row {i}: only the last breakpoint may be infinite, got {format_number(xs[i])}", row=i)
    if xs[n] != INF:
        raise BadInfinityConventionError(
            f"row {n}: the last breakpoint must be +inf, got {format_number(xs[n])}", row=n)
    for i in range(1, n):
        if not xs[i - 1] < xs[i]:
            raise NotSortedError(
                f"row {i}: breakpoints must increase strictly "
                f"({format_number(xs[i - 1])} then {format_number(xs[i])})", row=i)

    for i in range(n + 1):
        if not (math.isfinite(a_s[i]) and math.isfinite(bs[i])):
            raise BadInfinityConventionError(f"row {i}: a and b must be finite", row=i)
        if cs[i] == -INF:
            raise BadInfinityConventionError(f"row {i}: c may not be -inf", row=i)
        if cs[i] == INF:
            if i not in (0, n):
                raise BadInfinityConventionError(
                    f"row {i}: only the first and last pieces may be +inf", row=i)
            if a_s[i] != 0 or bs[i] != 0:
                raise BadInfinityConventionError(
                    f"row {i}: an infinite piece must have a = b = 0", row=i)
    if n == 1 and cs[0] == INF and cs[1] == INF:
        raise BadInfinityConventionError("the function is +inf everywhere", row=1)

    first = 1 if cs[0] == INF else 0
    last = n - 1 if cs[n] == INF else n
    for i in range(first, last + 1):
        if a_s[i] < 0:
            raise NonConvexPieceError(
                f"row {i}: quadratic coefficient {format_number(a_s[i])} is negative", row=i)

    for j in range(first, last):
        x = xs[j]
        left_terms = (a_s[j] * x * x, bs[j] * x, cs[j])
        right_terms = (a_s[j + 1] * x * x, bs[j + 1] * x, cs[j + 1])
        left_value, right_value = sum(left_terms), sum(right_terms)
        if not tol.close(left_value, right_value, *left_terms, *right_terms):
            raise DiscontinuousError(
                f"row {j + 1}: pieces {j} and {j + 1} disagree at x={format_number(x)} "
                f"({format_number(left_value)} vs {format_number(right_value)})", row=j + 1)
        left_slope = 2.0 * a_s[j] * x + bs[j]
        right_slope = 2.0 * a_s[j + 1] * x + bs[j + 1]
        if not tol.leq(left_slope, right_slope, 2.0 * a_s[j] * x, bs[j], 2.0 * a_s[j + 1] * x, bs[j + 1]):
            raise SlopeDecreasingError(
                f"row {j + 1}: slope drops from {format_number(left_slope)} to "
                f"{format_number(right_slope)} at x={format_number(x)}", row=j + 1)

    return PlqFunction(xs, a_s, bs, cs)


def _coerce_rows(raw_rows) -> List[List[float]]:
    rows = []
    for idx, raw in enumerate(raw_rows):
        values = list(raw)
        if len(values) != 4:
            raise MalformedRowError(f"row {idx}: expected 4 entries (x a b c), got {len(values)}", row=idx)
        try:
            row = [float(v) for v in values]
        except (TypeError, ValueError) as e:
            raise MalformedRowError(f"row {idx}: {e}", row=idx) from e
        if any(math.isnan(v) for v in row):
            raise MalformedRowError(f"row {idx}: NaN is not allowed", row=idx)
        rows.append(row)
    if not rows:
        raise EmptyInputError("a PLQ matrix needs at least one row")
    return rows


def _validate_single_row(x: float, a: float, b: float, c: float) -> None:
    if x == -INF:
        raise BadInfinityConventionError("row 0: breakpoint may not be -inf", row=0)
    if not math.isfinite(c):
        raise BadInfinityConventionError("row 0: a single piece needs a finite constant", row=0)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise BadInfinityConventionError("row 0: a and b must be finite", row=0)
    if math.isfinite(x) and (a != 0 or b != 0):
        raise BadInfinityConventionError("row 0: a needle function must have a = b = 0", row=0)
    if a < 0:
        raise NonConvexPieceError(f"row 0: quadratic coefficient {format_number(a)} is negative", row=0)
