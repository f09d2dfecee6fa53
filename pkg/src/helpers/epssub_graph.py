"""Graph of the eps-subdifferential in linear time

inf d_eps f(xbar) is the slope of the line through (xbar, f(xbar) - eps) that
touches the graph of f from the left. As xbar moves right the touching point
moves right too, through a sequence of states: tangent to a quadratic piece
(smooth), pivoting on a breakpoint (kink), or escaping to -inf along a linear
first piece (constant). A single sweep walks the states and the piece
holding xbar together and records where each state hands over to the next,
giving a table of rows [x, t, it, ib, v] that is evaluated lazily.

The upper end is the negated lower end of h(x) = f(-x) at -xbar, so a graph
is just two lower tables.
"""

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.data_classes import (
    ConstantPiece,
    Interval,
    LowerBoundRow,
    RationalPiece,
    RowType,
    SqrtQuadraticPiece,
    TangentSolveInput,
    format_number,
)
from ..core.errors import NoRootError, RootOutsidePieceError, UnsortedInputError
from ..core.plq_function import PlqFunction
from ..core.tolerance import DEFAULT_TOLERANCE, Tolerance
from .epssub_point import check_epsilon

_logger = logging.getLogger(__name__)

ClosedForm = Union[ConstantPiece, RationalPiece, SqrtQuadraticPiece]


@dataclass(frozen=True, eq=False)
class LowerBoundTable:
    """Lazy encoding of xbar -> inf d_eps f(xbar)

    Row k is valid on (rows[k-1].x, rows[k].x]; the last row ends at +inf.
    Indices it/ib are 0-based row indices of the function's matrix.

    Attributes:
        rows: Table rows, x strictly increasing
        function: The function the table was built from
        eps: Epsilon it was built for
        operations: Sweep loop iterations plus tangent solves
    """
    rows: Tuple[LowerBoundRow, ...]
    function: PlqFunction
    eps: float
    operations: int = 0
    xs: List[float] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "xs", [row.x for row in self.rows])

    def __len__(self) -> int:
        return len(self.rows)

    def __repr__(self) -> str:
        return f"LowerBoundTable(eps={format_number(self.eps)}, rows={list(self.rows)})"


@dataclass(frozen=True, eq=False)
class EpsSubGraph:
    """Lower tables of f and of h(x) = f(-x); together they give gph d_eps f

    Attributes:
        lower: Table of inf d_eps f
        upper_source: Table of inf d_eps h, read at -xbar and negated
        eps: Epsilon of both tables
    """
    lower: LowerBoundTable
    upper_source: LowerBoundTable
    eps: float


@dataclass(frozen=True)
class _State:
    """Where the touching point sits, and the line that ends that state

    end is (x_e, k_e): the state is left once xbar reaches the point where
    f - eps meets the tangent of piece k_e at x_e. None means it is never left.
    """
    t: RowType
    it: Optional[int] = None
    v: float = math.nan
    end: Optional[Tuple[float, int]] = None


def _is_kink(f: PlqFunction, j: int, tol: Tolerance) -> bool:
    x = f.breakpoint(j)
    left, right = f.derivative(j, x), f.derivative(j + 1, x)
    return not tol.close(left, right, 2.0 * f.a[j] * x, 2.0 * f.a[j + 1] * x, f.b[j], f.b[j + 1])


def _tangent_states(f: PlqFunction, tol: Tolerance) -> Iterator[_State]:
    """States of the touching point, left to right"""
    first, last = f.first_piece, f.last_piece

    def smooth(k: int) -> _State:
        end = None if k == last else (f.breakpoint(k), k)
        return _State(RowType.SMOOTH, it=k, end=end)

    if f.is_left_bounded:
        # The boundary pivots from slope -inf up to the first finite piece.
        yield _State(RowType.KINK, it=0, end=(f.breakpoint(0), 1))
        if f.a[1] > 0:
            yield smooth(1)
    elif f.a[0] > 0:
        yield smooth(0)
    else:
        end = None if last == 0 else (f.breakpoint(0), 0)
        yield _State(RowType.CONSTANT, v=float(f.b[0]), end=end)

    for k in range(first + 1, last + 1):
        if _is_kink(f, k - 1, tol):
            yield _State(RowType.KINK, it=k - 1, end=(f.breakpoint(k - 1), k))
        if f.a[k] > 0:
            yield smooth(k)


class _Sweep:
    """Row builder shared by the states of one build_lower_table call"""

    def __init__(self, f: PlqFunction, eps: float, tol: Tolerance):
        self.f = f
        self.eps = eps
        self.tol = tol
        self.rows: List[LowerBoundRow] = []
        self.ib = f.first_piece
        self.operations = 0
        self.finished = False

    def emit(self, x: float, state: _State) -> None:
        if state.t == RowType.CONSTANT:
            row = LowerBoundRow(x, state.t, v=state.v)
        else:
            row = LowerBoundRow(x, state.t, state.it, self.ib)
        if self.rows:
            last = self.rows[-1].x
            if x <= last + self.tol.slack(last, x):
                if x < last - self.tol.slack(last, x):
                    _logger.warning("dropping out-of-order row %r after x=%s", row, format_number(last))
                else:
                    _logger.debug("dropping empty row %r", row)
                return
        self.rows.append(row)

    def finish(self, state: _State) -> None:
        self.emit(math.inf, state)
        self.finished = True

    def close(self, state: _State) -> None:
        """Emit the rows of one state, advancing ib over every piece it spans"""
        f, last = self.f, self.f.last_piece
        if state.end is not None:
            xe, ke = state.end
            ye, se = f.piece_value(ke, xe), f.derivative(ke, xe)
        # xbar stays strictly right of the touching point.
        if state.t == RowType.SMOOTH:
            self.ib = max(self.ib, state.it)
        elif state.t == RowType.KINK:
            self.ib = max(self.ib, state.it + 1)
        assert self.ib <= last, f"piece index {self.ib} ran past the last finite piece {last}"

        while True:
            self.operations += 1
            ib = self.ib
            right_end = f.breakpoint(ib) if ib < f.n else math.inf
            if state.end is None:
                if ib == last:
                    self.finish(state)
                    return
                if state.t != RowType.CONSTANT:
                    self.emit(right_end, state)
                self.ib += 1
                continue

            if math.isfinite(right_end):
                gap = f.piece_value(ib, right_end) - (ye + se * (right_end - xe))
                if gap < self.eps:
                    if ib == last:
                        self.finish(state)
                        return
                    if state.t != RowType.CONSTANT:
                        self.emit(right_end, state)
                    self.ib += 1
                    continue

            self.operations += 1
            try:
                xb = solve_tangent(f, TangentSolveInput(xt=xe, it=ke, ib=ib), self.eps, self.tol)
            except NoRootError:
                if math.isfinite(right_end):
                    _logger.warning(
                        "no crossing on piece %d although f - eps passes the tangent there; using x=%s",
                        ib, format_number(right_end))
                    self.emit(right_end, state)
                    return
                # Parallel to the unbounded last piece: the state lasts forever.
                self.finish(state)
                return
            self.emit(xb, state)
            return


def compute_xb(
    f: PlqFunction,
    solve: TangentSolveInput,
    eps: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> float:
    """xbar > xt on piece ib where f - eps meets the tangent of piece it at xt

    Solves a_ib xbar^2 + b_ib xbar + c_ib - eps = s (xbar - xt) + p_it(xt)
    with s = 2 a_it xt + b_it, keeping the larger root.

    Raises:
        NoRootError: no real root, or the line is parallel to a linear piece ib
        RootOutsidePieceError: the root misses piece ib by more than root_slack
    """
    it, ib, xt = solve.it, solve.ib, solve.xt
    a, b, c = f.coefficients(ib)
    s = f.derivative(it, xt)
    yt = f.piece_value(it, xt)
    lin = b - s
    const = c - eps + s * xt - yt

    if a == 0:
        if tol.close(b, s):
            raise NoRootError(f"tangent slope {format_number(s)} is parallel to piece {ib}")
        root = -const / lin
        if root < xt:
            raise NoRootError(f"piece {ib} moves away from the tangent line at xt={format_number(xt)}")
    else:
        disc = lin * lin - 4.0 * a * const
        if disc < 0:
            if disc < -tol.slack(lin * lin, 4.0 * a * const):
                raise NoRootError(f"piece {ib} never reaches the tangent line (discriminant {format_number(disc)})")
            _logger.warning("clamping discriminant %s to 0 on piece %d", format_number(disc), ib)
            disc = 0.0
        sq = math.sqrt(disc)
        root = (-lin + sq) / (2.0 * a) if lin <= 0 else (2.0 * const) / (-lin - sq)

    return _restrict_to_piece(f, ib, root, tol)


def _restrict_to_piece(f: PlqFunction, k: int, root: float, tol: Tolerance) -> float:
    lo = f.breakpoint(k - 1) if k > 0 else -math.inf
    hi = f.breakpoint(k) if k < f.n else math.inf
    if lo <= root <= hi:
        return root
    bound = lo if root < lo else hi
    if abs(root - bound) > tol.root_slack * (1.0 + abs(bound)):
        raise RootOutsidePieceError(
            f"root {format_number(root)} is outside piece {k} [{format_number(lo)}, {format_number(hi)}]")
    _logger.warning("clamping root %s onto piece %d", format_number(root), k)
    return bound


def compute_xt(
    f: PlqFunction,
    xbar: float,
    ib: int,
    it: int,
    eps: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    check: bool = False,
) -> float:
    """Touching point xt < xbar on quadratic piece it of the line through (xbar, p_ib(xbar) - eps)

    xt = xbar - sqrt((p_it(xbar) - p_ib(xbar) + eps) / a_it)

    Args:
        check: Clamp xt onto piece it, raising if it misses by more than
            root_slack; left False during evaluation

    Raises:
        NoRootError: piece it is linear
        RootOutsidePieceError: only with check=True
    """
    a = f.a[it]
    if not a > 0:
        raise NoRootError(f"piece {it} is linear; no tangency point")
    radicand = (f.piece_value(it, xbar) - f.piece_value(ib, xbar) + eps) / a
    xt = xbar - math.sqrt(max(0.0, radicand))
    if check:
        return _restrict_to_piece(f, it, xt, tol)
    return xt


def solve_tangent(
    f: PlqFunction,
    solve: TangentSolveInput,
    eps: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    check: bool = False,
) -> float:
    """Solve the tangent equation in the direction solve.solve_for_xbar names

    Returns compute_xb(f, solve, eps) when solving for xbar, otherwise
    compute_xt(f, solve.xbar, solve.ib, solve.it, eps).

    Raises:
        NoRootError: see compute_xb / compute_xt
        RootOutsidePieceError: see compute_xb / compute_xt
    """
    if solve.solve_for_xbar:
        return compute_xb(f, solve, eps, tol)
    return compute_xt(f, solve.xbar, solve.ib, solve.it, eps, tol, check)


def build_lower_table(f: PlqFunction, eps: float, tol: Tolerance = DEFAULT_TOLERANCE) -> LowerBoundTable:
    """Table of inf d_eps f over the whole domain, in O(n)

    Args:
        f: Validated convex PLQ function
        eps: Positive epsilon
        tol: Numerical tolerance policy

    Returns:
        The table; rows cover (-inf, +inf]

    Raises:
        NonPositiveEpsilonError: eps <= 0
    """
    check_epsilon(eps)
    if f.n == 0:
        if f.is_needle:
            rows = [LowerBoundRow(math.inf, RowType.CONSTANT, v=-math.inf)]
        elif f.a[0] == 0:
            rows = [LowerBoundRow(math.inf, RowType.CONSTANT, v=float(f.b[0]))]
        else:
            rows = [LowerBoundRow(math.inf, RowType.SMOOTH, 0, 0)]
        return LowerBoundTable(rows, f, eps)

    sweep = _Sweep(f, eps, tol)
    if f.is_left_bounded:
        # x <= d_lo: empty left of the domain, -inf at d_lo
        sweep.rows.append(LowerBoundRow(f.breakpoint(0), RowType.CONSTANT))
    for state in _tangent_states(f, tol):
        sweep.close(state)
        if sweep.finished:
            break
    if not sweep.finished:
        last = sweep.rows[-1]
        _logger.debug("sweep ended at x=%s; extending the last row to inf", format_number(last.x))
        sweep.rows[-1] = LowerBoundRow(math.inf, last.t, last.it, last.ib, last.v)

    _logger.debug("lower table: %d pieces -> %d rows, %d operations", f.n + 1, len(sweep.rows), sweep.operations)
    return LowerBoundTable(sweep.rows, f, eps, sweep.operations)


def _row_value(table: LowerBoundTable, row: LowerBoundRow, xbar: float) -> float:
    f, eps = table.function, table.eps
    if row.t == RowType.CONSTANT:
        return row.value
    ib = row.piece_index
    if row.t == RowType.KINK:
        it = row.tangent_index
        xt = f.breakpoint(it)
        return (f.piece_value(ib, xbar) - eps - f.value_at_breakpoint(it)) / (xbar - xt)
    it = row.tangent_index
    xt = solve_tangent(f, TangentSolveInput(math.nan, it, ib, xbar=xbar, solve_for_xbar=False), eps)
    return f.derivative(it, xt)


def _outside(f: PlqFunction, xbar: float) -> Optional[float]:
    """None, -inf, or NaN meaning "look it up in the table" """
    if not math.isfinite(xbar) or not f.in_domain(xbar):
        return None
    if f.is_needle or (f.is_left_bounded and xbar == f.breakpoint(0)):
        return -math.inf
    return math.nan


def eval_lower(table: LowerBoundTable, xbar: float) -> Optional[float]:
    """inf d_eps f(xbar) in O(log rows); None when xbar is outside dom(f)"""
    early = _outside(table.function, xbar)
    if early is None or not math.isnan(early):
        return early
    k = bisect.bisect_left(table.xs, xbar)
    return _row_value(table, table.rows[k], xbar)


def eval_lower_grid(table: LowerBoundTable, xs: Sequence[float]) -> List[Optional[float]]:
    """eval_lower over a sorted grid

    Walks the grid and the table rows together when that is cheaper than a
    binary search per point (m log2(rows) > rows + m).

    Raises:
        UnsortedInputError: xs is not sorted ascending
    """
    grid = np.asarray(xs, dtype=float)
    m = grid.size
    if m == 0:
        return []
    if np.isnan(grid).any() or np.any(np.diff(grid) < 0):
        raise UnsortedInputError("evaluation grid must be sorted ascending and free of NaN")

    rows = len(table)
    merge = m * math.log2(rows) > rows + m if rows > 1 else False
    out: List[Optional[float]] = []
    k = 0
    for xbar in grid.tolist():
        early = _outside(table.function, xbar)
        if early is None or not math.isnan(early):
            out.append(early)
            continue
        if merge:
            while table.xs[k] < xbar:
                k += 1
        else:
            k = bisect.bisect_left(table.xs, xbar)
        out.append(_row_value(table, table.rows[k], xbar))
    return out


def build_graph(f: PlqFunction, eps: float, tol: Tolerance = DEFAULT_TOLERANCE) -> EpsSubGraph:
    """Lower tables of f and of its reflection

    Raises:
        NonPositiveEpsilonError: eps <= 0
    """
    lower = build_lower_table(f, eps, tol)
    upper_source = build_lower_table(f.reflect(), eps, tol)
    return EpsSubGraph(lower, upper_source, eps)


def eval_graph(graph: EpsSubGraph, xbar: float) -> Interval:
    """d_eps f(xbar) = [inf, sup] read from the two tables; empty outside dom(f)"""
    lo = eval_lower(graph.lower, xbar)
    if lo is None:
        return Interval.empty_set()
    hi = -eval_lower(graph.upper_source, -xbar)
    if hi < lo:
        lo = hi = 0.5 * (lo + hi)
    return Interval(lo, hi)


def _sample_point(table: LowerBoundTable, k: int) -> float:
    hi = table.rows[k].x
    lo = table.rows[k - 1].x if k > 0 else -math.inf
    if math.isfinite(lo) and math.isfinite(hi):
        x = 0.5 * (lo + hi)
    elif math.isfinite(hi):
        x = hi - 1.0
    elif math.isfinite(lo):
        x = lo + 1.0
    else:
        x = 0.0
    dom = table.function.domain()
    return min(max(x, dom.lo), dom.hi)


def classify_piece(table: LowerBoundTable, k: int) -> ClosedForm:
    """Closed form of inf d_eps f on row k

    Constant for t=3; (p_ib(x) - eps - f(x_it)) / (x - x_it) for t=2;
    2 a x + b -/+ sqrt(4 a (p_it - p_ib + eps)(x)) for t=1 with a, b from piece
    it, the sign matched against eval_lower at a sample point of the row.
    """
    row = table.rows[k]
    f, eps = table.function, table.eps
    if row.t == RowType.CONSTANT:
        return ConstantPiece(row.v)
    if row.t == RowType.KINK:
        it, ib = row.tangent_index, row.piece_index
        a, b, c = f.coefficients(ib)
        return RationalPiece((a, b, c - eps - f.value_at_breakpoint(it)), f.breakpoint(it))

    it, ib = row.tangent_index, row.piece_index
    at, bt, ct = f.coefficients(it)
    ab, bb, cb = f.coefficients(ib)
    linear = (2.0 * at, bt)
    radicand = (4.0 * at * (at - ab), 4.0 * at * (bt - bb), 4.0 * at * (ct - cb + eps))
    minus = SqrtQuadraticPiece(linear, -1, radicand)
    x = _sample_point(table, k)
    reference = eval_lower(table, x)
    if reference is None or not math.isfinite(reference):
        return minus
    plus = SqrtQuadraticPiece(linear, 1, radicand)
    return minus if abs(minus(x) - reference) <= abs(plus(x) - reference) else plus


# Window used for a domain end at infinity when sampling
DEFAULT_WINDOW = (-10.0, 10.0)


def sample_graph(
    graph: EpsSubGraph,
    m: int,
    window: Tuple[float, float] = DEFAULT_WINDOW,
) -> Tuple[List[float], List[Optional[float]], List[Optional[float]]]:
    """m evenly spaced points of dom(f) within window, with both bounds at each

    Returns:
        (xs, lower, upper); empty lists when the domain misses the window
    """
    dom = graph.lower.function.domain()
    lo, hi = max(dom.lo, window[0]), min(dom.hi, window[1])
    if m <= 0 or lo > hi:
        return [], [], []
    xs = np.linspace(lo, hi, m)
    lower = eval_lower_grid(graph.lower, xs)
    mirrored = eval_lower_grid(graph.upper_source, -xs[::-1])
    upper = [None if v is None else -v for v in reversed(mirrored)]
    return xs.tolist(), lower, upper
