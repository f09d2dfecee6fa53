"""Pointwise eps-subdifferential in logarithmic time

The eps-subdifferential of f at xbar is the level set {s : f*(s) <= l(s)} of
the conjugate below the support line l(s) = eps - f(xbar) + s * xbar. The
conjugate is never built: at a breakpoint x_j with left slope s_j the
conjugate value is s_j * x_j - f(x_j), and between consecutive slopes it is
either affine (slope x_j) or the conjugate of a single quadratic piece. A
dichotomic search over breakpoints left of xbar brackets the lower end; a
closed form finishes it. The upper end is the lower end of x -> f(-x) at
-xbar, read through a reflected view so no O(n) copy is made.
"""

import bisect
import logging
import math
from typing import Optional, Tuple

from ..core.data_classes import ConjugatePoint, Interval, SearchStats, SupportLine, format_number
from ..core.errors import NoCrossingError, NonPositiveEpsilonError, OutOfDomainError
from ..core.plq_function import PlqFunction
from ..core.tolerance import DEFAULT_TOLERANCE, Tolerance

_logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"


def check_epsilon(eps: float) -> None:
    """Raise NonPositiveEpsilonError unless eps is finite and positive"""
    if not (math.isfinite(eps) and eps > 0):
        raise NonPositiveEpsilonError(f"eps must be a finite positive number, got {format_number(eps)}")


class _View:
    """Read-only access to f, or to h(x) = f(-x) when mirrored, in O(1) per call"""

    __slots__ = ("f", "mirrored", "n", "_xs", "_as", "_bs", "_cs")

    def __init__(self, f: PlqFunction, mirrored: bool):
        self.f = f
        self.mirrored = mirrored
        self.n = f.n
        self._xs, self._as, self._bs, self._cs = f._xs, f._as, f._bs, f._cs

    def x(self, j: int) -> float:
        if j >= self.n:
            return math.inf
        return -self._xs[self.n - 1 - j] if self.mirrored else self._xs[j]

    def piece(self, k: int) -> Tuple[float, float, float]:
        if self.mirrored:
            k = self.n - k
            return self._as[k], -self._bs[k], self._cs[k]
        return self._as[k], self._bs[k], self._cs[k]

    def is_infinite(self, k: int) -> bool:
        return self.piece(k)[2] == math.inf

    def deriv(self, k: int, x: float) -> float:
        a, b, _ = self.piece(k)
        return 2.0 * a * x + b

    def value(self, k: int, x: float) -> float:
        a, b, c = self.piece(k)
        return (a * x + b) * x + c

    def locate(self, x: float) -> int:
        """Smallest i with x <= x_i"""
        if self.mirrored:
            return self.n - bisect.bisect_right(self._xs, -x, 0, self.n)
        return bisect.bisect_left(self._xs, x)

    def conjugate_point(self, j: int) -> ConjugatePoint:
        x = self.x(j)
        y = self.value(j + 1 if self.is_infinite(j) else j, x)
        s = self.deriv(j, x)
        return ConjugatePoint(s=s, ystar=s * x - y, x=x)


def support_line(f: PlqFunction, xbar: float, eps: float) -> SupportLine:
    """The support line s -> eps - f(xbar) + s * xbar

    Raises:
        OutOfDomainError: xbar is outside dom(f)
        NonPositiveEpsilonError: eps <= 0
    """
    check_epsilon(eps)
    fx = f.evaluate(xbar)
    if not math.isfinite(fx):
        raise OutOfDomainError(f"xbar={format_number(xbar)} is outside the domain")
    return SupportLine(slope=xbar, intercept=eps - fx)


def conjugate_point(f: PlqFunction, i: int) -> ConjugatePoint:
    """(s_i, s_i x_i - f(x_i), x_i) with s_i = 2 a_i x_i + b_i

    Raises:
        InfiniteBreakpointError: x_i is the +inf sentinel
    """
    s = f.breakpoint_slope(i)
    x = f.breakpoint(i)
    return ConjugatePoint(s=s, ystar=s * x - f.evaluate(x), x=x)


def intersection(
    f: PlqFunction,
    l: int,
    u: int,
    line: SupportLine,
    side: str = LEFT,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> float:
    """Crossing of f* with the support line inside the bracket [s_l, s_u]

    For side='left', returns inf{s in [s_l, s_u] : f*(s) <= line(s)}, with the
    search having certified f*(s_l) > line(s_l) and f*(s_u) <= line(s_u).
    For side='right' the same is done on x -> f(-x) against the mirrored
    line and the result is negated, giving the sup. l = -1 stands for the
    unbounded conjugate tail left of s_0.

    Raises:
        NoCrossingError: u != l + 1, or no crossing can be located
    """
    if u != l + 1:
        raise NoCrossingError(f"bracket ({l}, {u}) is not a pair of consecutive breakpoints")
    if side == LEFT:
        return _intersection(_View(f, False), l, u, line, tol)
    return -_intersection(_View(f, True), l, u, line.mirrored(), tol)


def _intersection(view: _View, l: int, u: int, line: SupportLine, tol: Tolerance) -> float:
    xbar = line.slope
    upper = view.deriv(u, min(view.x(u), xbar))
    lower = -math.inf
    k = 0
    if l >= 0:
        # f* is affine with slope x_l on [s_l, r_l].
        point = view.conjugate_point(l)
        right_slope = view.deriv(l + 1, point.x)
        root = (point.ystar - point.s * point.x - line.intercept) / (xbar - point.x)
        start = point.s if math.isfinite(point.s) and not view.is_infinite(l) else -math.inf
        if root <= right_slope:
            return max(root, start)
        lower, k = right_slope, l + 1

    a, b, _ = view.piece(k)
    if a == 0:
        # Conjugate of a linear piece is finite at s = b only.
        return min(max(b, lower), upper)
    excess = view.value(k, xbar) + line.intercept
    if excess < 0:
        if excess >= -tol.slack(view.value(k, xbar), line.intercept):
            excess = 0.0
        elif line(upper) >= _conjugate_of_piece(view, k, upper):
            _logger.warning("no crossing found in bracket (%d, %d); using its upper end", l, u)
            return upper
        else:
            raise NoCrossingError(f"support line never meets the conjugate in bracket ({l}, {u})")
    root = b + 2.0 * a * xbar - 2.0 * math.sqrt(a * excess)
    return min(max(root, lower), upper)


def _conjugate_of_piece(view: _View, k: int, s: float) -> float:
    a, b, c = view.piece(k)
    return (s - b) ** 2 / (4.0 * a) - c


def _lower_end(
    view: _View,
    xbar: float,
    line: SupportLine,
    tol: Tolerance,
    stats: Optional[SearchStats],
) -> float:
    if stats is not None:
        stats.queries += 1
    left_bounded = view.is_infinite(0) and view.n > 0
    if left_bounded and xbar <= view.x(0):
        return -math.inf

    i = view.locate(xbar)
    # Breakpoint 0 of a left-bounded function sits at slope -inf: always infeasible.
    lo = 0 if left_bounded else -1
    hi = i
    while hi - lo > 1:
        m = (lo + hi) // 2
        point = view.conjugate_point(m)
        if stats is not None:
            stats.probes += 1
        if point.ystar > line(point.s):
            lo = m
        else:
            hi = m
    return _intersection(view, lo, hi, line, tol)


def eps_subdifferential(
    f: PlqFunction,
    xbar: float,
    eps: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    stats: Optional[SearchStats] = None,
) -> Interval:
    """The eps-subdifferential [s_lo, s_hi] of f at xbar in O(log n)

    Args:
        f: Validated convex PLQ function
        xbar: Point of evaluation
        eps: Positive tolerance of the eps-subgradient inequality
        tol: Numerical tolerance policy
        stats: Optional probe counter

    Returns:
        The interval; empty outside dom(f); s_lo = -inf at a finite left
        domain end, s_hi = +inf at a finite right end, the whole line for a
        needle at its point

    Raises:
        NonPositiveEpsilonError: eps <= 0
    """
    check_epsilon(eps)
    if not math.isfinite(xbar) or not f.in_domain(xbar):
        return Interval.empty_set()
    if f.is_needle:
        return Interval.whole_line()
    line = SupportLine(slope=xbar, intercept=eps - f.evaluate(xbar))
    s_lo = _lower_end(_View(f, False), xbar, line, tol, stats)
    s_hi = -_lower_end(_View(f, True), -xbar, line.mirrored(), tol, stats)
    if s_hi < s_lo:
        # Only reachable through rounding on a near-degenerate tangency.
        s_lo = s_hi = 0.5 * (s_lo + s_hi)
    return Interval(s_lo, s_hi)
