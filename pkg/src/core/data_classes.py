"""Core data classes for epsilon-subdifferential computations"""

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Tuple


def format_number(value: float) -> str:
    """Shortest round-trip text for a float ('inf', '-inf', 'nan', '2' not '2.0')"""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = repr(value + 0.0)  # folds -0.0 into 0.0
    if text.endswith(".0"):
        text = text[:-2]
    return text


@dataclass(frozen=True)
class Interval:
    """Closed extended-real interval [lo, hi], possibly empty or unbounded

    Attributes:
        lo: Lower end (may be -inf)
        hi: Upper end (may be +inf)
        empty: True for the empty set; lo/hi are then NaN
    """
    lo: float
    hi: float
    empty: bool = False

    def __post_init__(self):
        if not self.empty and not self.lo <= self.hi:
            raise ValueError(f"Interval bounds out of order: [{self.lo}, {self.hi}]")

    @classmethod
    def empty_set(cls) -> 'Interval':
        return cls(math.nan, math.nan, True)

    @classmethod
    def point(cls, value: float) -> 'Interval':
        return cls(value, value)

    @classmethod
    def whole_line(cls) -> 'Interval':
        return cls(-math.inf, math.inf)

    def contains(self, s: float, slack: float = 0.0) -> bool:
        if self.empty:
            return False
        return self.lo - slack <= s <= self.hi + slack

    def issubset(self, other: 'Interval', slack: float = 0.0) -> bool:
        """Endpoint-wise containment of self in other"""
        if self.empty:
            return True
        if other.empty:
            return False
        return other.lo - slack <= self.lo and self.hi <= other.hi + slack

    def deviation(self, other: 'Interval') -> float:
        """Largest relative endpoint gap |u - v| / max(1, |u|, |v|)

        Infinite endpoints must match exactly (else inf); two empty sets are 0 apart.
        """
        if self.empty or other.empty:
            return 0.0 if self.empty and other.empty else math.inf
        worst = 0.0
        for u, v in ((self.lo, other.lo), (self.hi, other.hi)):
            if u == v:
                continue
            if not (math.isfinite(u) and math.isfinite(v)):
                return math.inf
            worst = max(worst, abs(u - v) / max(1.0, abs(u), abs(v)))
        return worst

    def __str__(self) -> str:
        if self.empty:
            return "empty"
        return f"[{format_number(self.lo)}, {format_number(self.hi)}]"


@dataclass(frozen=True)
class Domain:
    """Closure of the set where f is finite

    Attributes:
        lo: Left end d_lo (-inf when unbounded)
        hi: Right end d_hi (+inf when unbounded)
    """
    lo: float
    hi: float

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class SupportLine:
    """The affine map s -> eps - f(xbar) + s * xbar in slope space

    Attributes:
        slope: xbar
        intercept: eps - f(xbar)
    """
    slope: float
    intercept: float

    def __call__(self, s: float) -> float:
        return self.intercept + self.slope * s

    def mirrored(self) -> 'SupportLine':
        """The support line of x -> f(-x) at -xbar"""
        return SupportLine(-self.slope, self.intercept)


@dataclass(frozen=True)
class ConjugatePoint:
    """A point (s, f*(s)) read off the primal breakpoint x with s in df(x)

    Attributes:
        s: Slope
        ystar: Conjugate value s * x - f(x)
        x: Primal point
    """
    s: float
    ystar: float
    x: float


class RowType(IntEnum):
    """How a lower-bound table row evaluates inf of the eps-subdifferential"""
    SMOOTH = 1    # tangent to a quadratic piece
    KINK = 2      # pivoting on a breakpoint
    CONSTANT = 3  # constant value v


@dataclass(frozen=True)
class LowerBoundRow:
    """One row [x, t, it, ib, v] of a lower-bound table

    The row is valid on (previous row x, x]. Irrelevant fields hold None
    (indices) or NaN (v).

    Attributes:
        x: Right end of the validity interval
        t: Row type
        it: Index of the tangent piece (t=1) or tangent breakpoint (t=2)
        ib: Index of the piece containing xbar (t=1, 2)
        v: Constant value (t=3)
    """
    x: float
    t: RowType
    it: Optional[int] = None
    ib: Optional[int] = None
    v: float = math.nan

    @property
    def tangent_index(self) -> int:
        assert self.it is not None, f"row {self} has no tangent index"
        return self.it

    @property
    def piece_index(self) -> int:
        assert self.ib is not None, f"row {self} has no xbar piece index"
        return self.ib

    @property
    def value(self) -> float:
        assert self.t == RowType.CONSTANT and not math.isnan(self.v), f"row {self} has no constant value"
        return self.v

    def same_fields(self, other: 'LowerBoundRow') -> bool:
        """Field-for-field equality treating NaN as equal to NaN"""
        def same(u: float, v: float) -> bool:
            return (math.isnan(u) and math.isnan(v)) or u == v
        return (
            same(self.x, other.x)
            and self.t == other.t
            and self.it == other.it
            and self.ib == other.ib
            and same(self.v, other.v)
        )

    def __repr__(self) -> str:
        return (
            f"[{format_number(self.x)}, {int(self.t)}, {self.it}, {self.ib}, "
            f"{format_number(self.v)}]"
        )


@dataclass(frozen=True)
class TangentSolveInput:
    """Inputs of the tangent equation linking xt and xbar

    The tangent line touches piece `it` at xt (slope p'_it(xt)); xbar lies on
    piece `ib`. Only the abscissa being solved from needs to be set.

    Attributes:
        xt: Tangency abscissa, known when solve_for_xbar is True
        it: Piece whose derivative gives the tangent slope
        ib: Piece holding xbar
        xbar: Abscissa on piece ib, known when solve_for_xbar is False
        solve_for_xbar: True to solve for xbar given xt, False for the reverse
    """
    xt: float
    it: int
    ib: int
    xbar: float = math.nan
    solve_for_xbar: bool = True

    def __post_init__(self):
        known = self.xt if self.solve_for_xbar else self.xbar
        if math.isnan(known):
            name = "xt" if self.solve_for_xbar else "xbar"
            raise ValueError(f"TangentSolveInput needs {name} to solve from")


@dataclass(frozen=True)
class ConstantPiece:
    """g(x) = v"""
    v: float

    def __call__(self, x: float) -> float:
        return self.v


@dataclass(frozen=True)
class RationalPiece:
    """g(x) = (n2 x^2 + n1 x + n0) / (x - pole)"""
    numerator: Tuple[float, float, float]
    pole: float

    def __call__(self, x: float) -> float:
        n2, n1, n0 = self.numerator
        return ((n2 * x + n1) * x + n0) / (x - self.pole)


@dataclass(frozen=True)
class SqrtQuadraticPiece:
    """g(x) = l1 x + l0 + sign * sqrt(r2 x^2 + r1 x + r0)"""
    linear: Tuple[float, float]
    sign: int
    radicand: Tuple[float, float, float]

    def __call__(self, x: float) -> float:
        l1, l0 = self.linear
        r2, r1, r0 = self.radicand
        return l1 * x + l0 + self.sign * math.sqrt(max(0.0, (r2 * x + r1) * x + r0))


@dataclass
class SearchStats:
    """Counts conjugate-point probes made by the pointwise search

    Attributes:
        probes: Number of conjugate points evaluated
        queries: Number of endpoint searches run
    """
    probes: int = 0
    queries: int = 0


@dataclass
class BenchRow:
    """One line of the benchmark report

    Attributes:
        pieces: Number of pieces of the generated function
        oracle_median: Median seconds per query for the conjugate scan
        fast_median: Median seconds per query for the dichotomic search
        build_seconds: Seconds spent building the lower-bound table
        build_operations: Sweep operation count
        rss_mb: Resident memory after the row, in MiB
    """
    pieces: int
    oracle_median: float
    fast_median: float
    build_seconds: float
    build_operations: int
    rss_mb: float

    @property
    def ratio(self) -> float:
        if not self.fast_median > 0:
            return math.nan
        return self.oracle_median / self.fast_median
