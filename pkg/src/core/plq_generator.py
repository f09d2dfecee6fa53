"""Seeded generators of convex PLQ test functions"""

import math
from typing import List, Sequence

import numpy as np

from .plq_function import PlqFunction, validate

# Sampling ranges; wide enough to exercise both piece types, narrow enough
# to keep breakpoints and slopes away from near ties.
CURVATURE_RANGE = (0.1, 2.0)
GAP_RANGE = (0.5, 1.5)
KINK_RANGE = (0.1, 1.0)
FIRST_SLOPE_RANGE = (-1.0, 1.0)

# Kinks the mixed generator draws besides KINK_RANGE: smooth joins (or a
# redundant breakpoint between two linear pieces) and near ties.
DEGENERATE_KINKS = (0.0, 1e-10, 1e-6)
LINEAR_SHARE = 0.5


def _check_pieces(pieces: int, left_bounded: bool, right_bounded: bool) -> None:
    needed = 1 + int(left_bounded) + int(right_bounded)
    if pieces < needed:
        raise ValueError(f"need at least {needed} pieces for these bounds, got {pieces}")


def _centred_breakpoints(rng: np.random.Generator, n: int) -> np.ndarray:
    xs = np.cumsum(rng.uniform(*GAP_RANGE, size=n))
    if n:
        xs -= 0.5 * (xs[0] + xs[-1])
    return xs


def _assemble(
    xs: np.ndarray,
    curvatures: Sequence[float],
    kinks: Sequence[float],
    first_slope: float,
    left_bounded: bool,
    right_bounded: bool,
) -> PlqFunction:
    """Chain pieces so values match and slopes jump by the given kinks

    Piece 0 is anchored at its right end with derivative first_slope and value
    0 at x_0; each later piece starts where the previous one ended.
    """
    pieces = len(curvatures)
    n = pieces - 1
    a0 = float(curvatures[0])
    if n == 0:
        return validate([[math.inf, a0, first_slope, 0.0]])

    x0 = float(xs[0])
    b0 = first_slope - 2.0 * a0 * x0
    c0 = -(a0 * x0 + b0) * x0
    rows = [[x0, a0, b0, c0]]
    slope, value = first_slope, 0.0
    for k in range(1, pieces):
        left = float(xs[k - 1])
        right = float(xs[k]) if k < n else math.inf
        slope += float(kinks[k - 1])
        a = float(curvatures[k])
        b = slope - 2.0 * a * left
        c = value - (a * left + b) * left
        rows.append([right, a, b, c])
        if k < n:
            slope = 2.0 * a * right + b
            value = (a * right + b) * right + c

    if left_bounded:
        rows[0] = [rows[0][0], 0.0, 0.0, math.inf]
    if right_bounded:
        rows[-1] = [math.inf, 0.0, 0.0, math.inf]
    return validate(rows)


def generate_convex_plq(
    pieces: int,
    seed: int,
    left_bounded: bool = False,
    right_bounded: bool = False,
) -> PlqFunction:
    """Build a convex PLQ function whose pieces alternate quadratic / linear

    Piece 0 is quadratic, piece 1 linear, and so on. Slopes increase across
    every breakpoint by a kink drawn from KINK_RANGE, and the breakpoints are
    centred on 0. The same (pieces, seed, flags) always gives the same matrix.

    Args:
        pieces: Number of pieces (rows of the matrix), at least 1
        seed: Seed for numpy's default generator
        left_bounded: Replace the first piece by +inf (domain starts at x_0)
        right_bounded: Replace the last piece by +inf (domain ends at x_{n-1})

    Returns:
        A validated PlqFunction
    """
    _check_pieces(pieces, left_bounded, right_bounded)
    rng = np.random.default_rng(seed)
    n = pieces - 1
    xs = _centred_breakpoints(rng, n)
    curvatures = rng.uniform(*CURVATURE_RANGE, size=pieces)
    curvatures[1::2] = 0.0
    kinks = rng.uniform(*KINK_RANGE, size=n)
    first_slope = float(rng.uniform(*FIRST_SLOPE_RANGE))
    return _assemble(xs, curvatures, kinks, first_slope, left_bounded, right_bounded)


def generate_mixed_plq(
    pieces: int,
    seed: int,
    left_bounded: bool = False,
    right_bounded: bool = False,
) -> PlqFunction:
    """Build a convex PLQ function with piece types and kinks drawn independently

    Each piece is linear with probability LINEAR_SHARE, so the first piece may
    be linear and linear pieces may follow one another. Each kink is one of
    DEGENERATE_KINKS or a draw from KINK_RANGE with equal odds, which gives
    smooth quadratic joins, redundant breakpoints and near-tie kinks.

    Args:
        pieces: Number of pieces (rows of the matrix), at least 1
        seed: Seed for numpy's default generator
        left_bounded: Replace the first piece by +inf (domain starts at x_0)
        right_bounded: Replace the last piece by +inf (domain ends at x_{n-1})

    Returns:
        A validated PlqFunction
    """
    _check_pieces(pieces, left_bounded, right_bounded)
    rng = np.random.default_rng(seed)
    n = pieces - 1
    xs = _centred_breakpoints(rng, n)
    curvatures = rng.uniform(*CURVATURE_RANGE, size=pieces)
    curvatures[rng.random(pieces) < LINEAR_SHARE] = 0.0
    choices = np.append(DEGENERATE_KINKS, np.nan)
    kinks = rng.choice(choices, size=n)
    regular = np.isnan(kinks)
    kinks[regular] = rng.uniform(*KINK_RANGE, size=int(regular.sum()))
    first_slope = float(rng.uniform(*FIRST_SLOPE_RANGE))
    return _assemble(xs, curvatures, kinks, first_slope, left_bounded, right_bounded)


def random_domain_points(f: PlqFunction, count: int, rng: np.random.Generator, margin: float = 1.0) -> List[float]:
    """count points drawn uniformly from dom(f), plus the finite domain ends

    Unbounded ends are cut `margin` beyond the outermost breakpoint.
    """
    dom = f.domain()
    if dom.is_point:
        return [dom.lo]
    inner_lo = f.breakpoint(0) if f.n > 0 else 0.0
    inner_hi = f.breakpoint(f.n - 1) if f.n > 0 else 0.0
    lo = dom.lo if math.isfinite(dom.lo) else inner_lo - margin
    hi = dom.hi if math.isfinite(dom.hi) else inner_hi + margin
    points = rng.uniform(lo, hi, size=count).tolist()
    points.extend(end for end in (dom.lo, dom.hi) if math.isfinite(end))
    return points
