"""Reference implementations used to check the fast paths

Builds the conjugate explicitly and reads the eps-subdifferential off it as a
level set in O(n), and decides eps-subgradient membership by minimising
f(y) - s y piece by piece. Nothing here depends on the search or sweep code.
"""

import logging
import math
from typing import List, Optional, Tuple

from ..core.data_classes import Interval, format_number
from ..core.errors import NonPositiveEpsilonError, OutOfDomainError
from ..core.plq_function import PlqFunction, validate
from ..core.tolerance import DEFAULT_TOLERANCE, Tolerance

_logger = logging.getLogger(__name__)

INF = math.inf

# (s_lo, s_hi, A, B, C): f*(s) = A s^2 + B s + C on [s_lo, s_hi]
Segment = Tuple[float, float, float, float, float]


def _piece_ends(f: PlqFunction, k: int) -> Tuple[float, float]:
    lo = f.breakpoint(k - 1) if k > 0 else -INF
    hi = f.breakpoint(k) if k < f.n else INF
    return lo, hi


def _slope_at(f: PlqFunction, k: int, x: float) -> float:
    """Derivative of piece k at x, +-inf at an infinite end of a quadratic piece"""
    if math.isfinite(x):
        return f.derivative(k, x)
    if f.a[k] > 0:
        return x
    return float(f.b[k])


def _segments(f: PlqFunction) -> List[Segment]:
    first, last = f.first_piece, f.last_piece
    segments: List[Segment] = []

    def add(lo: float, hi: float, a: float, b: float, c: float) -> None:
        if hi > lo:
            segments.append((lo, hi, a, b, c))

    if f.is_left_bounded:
        d = f.breakpoint(0)
        add(-INF, f.derivative(1, d), 0.0, d, -f.value_at_breakpoint(0))

    for k in range(first, last + 1):
        if k > first:
            j = k - 1
            x = f.breakpoint(j)
            add(f.derivative(j, x), f.derivative(k, x), 0.0, x, -f.piece_value(k, x))
        a, b, c = f.coefficients(k)
        if a > 0:
            lo, hi = _piece_ends(f, k)
            add(_slope_at(f, k, lo), _slope_at(f, k, hi), 1.0 / (4.0 * a), -b / (2.0 * a), b * b / (4.0 * a) - c)

    if f.is_right_bounded:
        d = f.breakpoint(f.n - 1)
        add(f.derivative(last, d), INF, 0.0, d, -f.piece_value(last, d))
    return segments


def conjugate(f: PlqFunction, tol: Tolerance = DEFAULT_TOLERANCE) -> PlqFunction:
    """The convex conjugate f*(s) = sup_x s x - f(x), built in one pass

    Quadratic pieces map to quadratic pieces, kinks and finite domain ends to
    affine pieces, linear pieces to conjugate breakpoints. An affine f gives a
    needle and a needle gives an affine function.
    """
    if f.is_needle:
        return validate([[INF, 0.0, f.breakpoint(0), -float(f.c[0])]], tol)

    segments = _segments(f)
    if not segments:
        # Affine: every piece shares slope b_0.
        return validate([[float(f.b[0]), 0.0, 0.0, -float(f.c[f.first_piece])]], tol)

    rows: List[List[float]] = []
    start, end = segments[0][0], segments[-1][1]
    if math.isfinite(start):
        rows.append([start, 0.0, 0.0, INF])
    for _, hi, a, b, c in segments:
        rows.append([hi, a, b, c])
    if math.isfinite(end):
        rows.append([INF, 0.0, 0.0, INF])
    _logger.debug("conjugate: %d pieces -> %d pieces", f.n + 1, len(rows))
    return validate(rows, tol)


def _roots(a: float, b: float, c: float, tol: Tolerance) -> Optional[Tuple[float, float]]:
    """Real roots r1 <= r2 of a s^2 + b s + c (a > 0), None when there are none"""
    disc = b * b - 4.0 * a * c
    if disc < 0:
        if disc < -tol.slack(b * b, 4.0 * a * c):
            return None
        disc = 0.0
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if q == 0:
        return 0.0, 0.0
    r1, r2 = q / a, c / q
    return (r1, r2) if r1 <= r2 else (r2, r1)


def _level_set_on_piece(
    lo: float, hi: float, a: float, b: float, c: float, tol: Tolerance,
) -> Optional[Tuple[float, float]]:
    """{s in [lo, hi] : a s^2 + b s + c <= 0}"""
    if a > 0:
        roots = _roots(a, b, c, tol)
        if roots is None:
            return None
        left, right = max(lo, roots[0]), min(hi, roots[1])
    elif b != 0:
        root = -c / b
        left, right = (lo, min(hi, root)) if b > 0 else (max(lo, root), hi)
    else:
        if c > tol.slack(c):
            return None
        left, right = lo, hi
    if left > right:
        return None
    return left, right


def eps_sub_reference(
    f: PlqFunction,
    xbar: float,
    eps: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    conj: Optional[PlqFunction] = None,
) -> Interval:
    """d_eps f(xbar) as the level set {s : f*(s) <= eps - f(xbar) + s xbar}, in O(n)

    Args:
        conj: conjugate(f), when the caller already has it; built here otherwise

    Raises:
        NonPositiveEpsilonError: eps <= 0
    """
    if not (math.isfinite(eps) and eps > 0):
        raise NonPositiveEpsilonError(f"eps must be a finite positive number, got {format_number(eps)}")
    fx = f.evaluate(xbar)
    if not math.isfinite(fx):
        return Interval.empty_set()

    g = conjugate(f, tol) if conj is None else conj
    shift = eps - fx
    if g.is_needle:
        s0 = g.breakpoint(0)
        return Interval.point(s0) if g.c[0] <= shift + s0 * xbar else Interval.empty_set()

    lo_all, hi_all = INF, -INF
    for k in range(g.first_piece, g.last_piece + 1):
        lo, hi = _piece_ends(g, k)
        a, b, c = g.coefficients(k)
        part = _level_set_on_piece(lo, hi, a, b - xbar, c - shift, tol)
        if part is not None:
            lo_all, hi_all = min(lo_all, part[0]), max(hi_all, part[1])
    if lo_all > hi_all:
        _logger.warning("empty level set at xbar=%s although xbar is in the domain", format_number(xbar))
        return Interval.empty_set()
    return Interval(lo_all, hi_all)


def _min_shifted(f: PlqFunction, s: float) -> float:
    """min over dom(f) of f(y) - s y, -inf when unbounded below"""
    if f.is_needle:
        return float(f.c[0]) - s * f.breakpoint(0)
    best = INF
    for k in range(f.first_piece, f.last_piece + 1):
        a, b, c = f.coefficients(k)
        lo, hi = _piece_ends(f, k)
        slope = b - s
        if a > 0:
            y = min(max(-slope / (2.0 * a), lo), hi)
        elif slope > 0:
            if lo == -INF:
                return -INF
            y = lo
        elif slope < 0:
            if hi == INF:
                return -INF
            y = hi
        else:
            best = min(best, c)
            continue
        best = min(best, (a * y + slope) * y + c)
    return best


def is_eps_subgradient(
    f: PlqFunction,
    xbar: float,
    eps: float,
    s: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    """True iff f(y) >= f(xbar) + s (y - xbar) - eps for every y

    Raises:
        OutOfDomainError: xbar is outside dom(f)
    """
    fx = f.evaluate(xbar)
    if not math.isfinite(fx):
        raise OutOfDomainError(f"xbar={format_number(xbar)} is outside the domain")
    if not math.isfinite(s):
        return False
    lowest = _min_shifted(f, s)
    target = fx - s * xbar - eps
    return lowest >= target - tol.slack(lowest, fx, s * xbar, eps)
