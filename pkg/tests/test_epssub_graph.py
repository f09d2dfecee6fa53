"""Test the linear-time graph of the eps-subdifferential"""

import logging
import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.data_classes import (
    ConstantPiece,
    LowerBoundRow,
    RationalPiece,
    RowType,
    SqrtQuadraticPiece,
    TangentSolveInput,
)
from src.core.errors import NonPositiveEpsilonError, NoRootError, RootOutsidePieceError, UnsortedInputError
from src.core.plq_function import validate
from src.core.plq_generator import generate_convex_plq, generate_mixed_plq, random_domain_points
from src.helpers.epssub_graph import (
    build_graph,
    build_lower_table,
    classify_piece,
    compute_xb,
    compute_xt,
    eval_graph,
    eval_lower,
    eval_lower_grid,
    sample_graph,
    solve_tangent,
)
from src.helpers.epssub_point import eps_subdifferential
from src.helpers.table_csv import rows_match

INF = math.inf
NAN = math.nan

ABS = validate([[0, 0, -1, 0], [INF, 0, 1, 0]])
SQUARE = validate([[INF, 1, 0, 0]])
SQ_RESTRICTED = validate([[0, 0, 0, INF], [INF, 1, 0, 0]])
KINKED = validate([[1, 1, 0, 0], [INF, 0, 2, -1]])
NEEDLE = validate([[0, 0, 0, 0]])


def assert_rows(table, expected):
    rows = [LowerBoundRow(x, RowType(t), it, ib, v) for x, t, it, ib, v in expected]
    assert rows_match(table.rows, rows), f"expected {rows}, got {list(table.rows)}"


def test_tables():
    """Test hand-computed lower-bound tables"""
    print("Testing build_lower_table...")

    assert_rows(build_lower_table(ABS, 0.5), [(0.25, 3, None, None, -1), (INF, 2, 0, 1, NAN)])
    assert_rows(build_lower_table(SQUARE, 1.0), [(INF, 1, 0, 0, NAN)])
    assert_rows(build_lower_table(NEEDLE, 1.0), [(INF, 3, None, None, -INF)])
    assert_rows(build_lower_table(validate([[INF, 0, 2, 1]]), 1.0), [(INF, 3, None, None, 2)])
    assert_rows(
        build_lower_table(SQ_RESTRICTED, 1.0),
        [(0, 3, None, None, NAN), (1, 2, 0, 1, NAN), (INF, 1, 1, 1, NAN)],
    )

    with pytest.raises(NonPositiveEpsilonError):
        build_lower_table(ABS, 0)

    print("  [PASS] build_lower_table tests passed")


def test_degenerate_shapes():
    """Test a redundant breakpoint, a linear first piece and smooth joins"""
    print("Testing degenerate shapes...")

    # |x| with a redundant breakpoint at 1: the last piece is parallel to the kink's tangent
    redundant = validate([[0, 0, -1, 0], [1, 0, 1, 0], [INF, 0, 1, 0]])
    table = build_lower_table(redundant, 0.5)
    assert_rows(table, [(0.25, 3, None, None, -1), (1, 2, 0, 1, NAN), (INF, 2, 0, 2, NAN)])
    assert eval_lower(table, 2.0) == 0.75, "same bound as |x| beyond the redundant breakpoint"

    # -x then x^2 - x, joined smoothly at 0
    linear_first = validate([[0, 0, -1, 0], [INF, 1, -1, 0]])
    assert_rows(build_lower_table(linear_first, 1.0), [(1, 3, None, None, -1), (INF, 1, 1, 1, NAN)])
    assert eval_lower(build_lower_table(linear_first, 1.0), 2.0) == 1.0

    # x^2 then 2 x^2, joined smoothly at 0
    curvature_jump = validate([[0, 1, 0, 0], [INF, 2, 0, 0]])
    assert_rows(
        build_lower_table(curvature_jump, 1.0),
        [(0, 1, 0, 0, NAN), (math.sqrt(8) / 4, 1, 0, 1, NAN), (INF, 1, 1, 1, NAN)],
    )

    for f, eps in ((redundant, 0.5), (linear_first, 1.0), (curvature_jump, 1.0)):
        graph = build_graph(f, eps)
        for xbar in (-3.0, -0.5, 0.0, 0.1, 0.5, 0.9, 1.0, 1.5, 4.0):
            got, want = eval_graph(graph, xbar), eps_subdifferential(f, xbar, eps)
            assert got.deviation(want) <= 1e-10, f"{f} at {xbar}: graph {got} vs pointwise {want}"

    print("  [PASS] degenerate shape tests passed")


def test_mixed_tables():
    """Test graph endpoints on generated functions with mixed piece types and tiny kinks"""
    print("Testing mixed tables...")

    for seed in range(40):
        bounds = {"left_bounded": seed % 4 in (1, 3), "right_bounded": seed % 4 in (2, 3)}
        f = generate_mixed_plq(3 + seed % 15, 500 + seed, **bounds)
        rng = np.random.default_rng(seed)
        for eps in (1e-3, 1.0):
            graph = build_graph(f, eps)
            xs = [row.x for row in graph.lower.rows]
            assert xs[-1] == INF and all(u < v for u, v in zip(xs, xs[1:])), f"bad row ends {xs}"
            for xbar in random_domain_points(f, 8, rng):
                got, want = eval_graph(graph, xbar), eps_subdifferential(f, xbar, eps)
                assert got.deviation(want) <= 1e-8, f"{f} at xbar={xbar}, eps={eps}: {got} vs {want}"

    print("  [PASS] mixed table tests passed")


def test_table_shape():
    """Test row ordering, coverage and size on generated functions"""
    print("Testing table shape...")

    for seed in range(20):
        pieces = 5 + 7 * seed
        f = generate_convex_plq(pieces, seed, left_bounded=seed % 2 == 1, right_bounded=seed % 4 == 2)
        table = build_lower_table(f, 0.5)
        xs = [row.x for row in table.rows]
        assert xs[-1] == INF, "the last row reaches +inf"
        assert all(u < v for u, v in zip(xs, xs[1:])), f"row ends must increase, got {xs}"
        assert len(table) <= 3 * pieces + 2, f"{len(table)} rows for {pieces} pieces"
        for row in table.rows:
            if row.t != RowType.CONSTANT:
                assert f.first_piece <= row.piece_index <= f.last_piece, f"ib out of range in {row}"

    print("  [PASS] table shape tests passed")


def test_compute_xb():
    """Test the forward tangent equation"""
    print("Testing compute_xb...")

    assert compute_xb(SQUARE, TangentSolveInput(xt=0, it=0, ib=0), 1.0) == 1.0, "x^2 - 1 meets y = 0 at 1"
    assert compute_xb(ABS, TangentSolveInput(xt=0, it=0, ib=1), 0.5) == 0.25
    assert compute_xb(KINKED, TangentSolveInput(xt=0, it=0, ib=1), 1.0) == 1.0

    with pytest.raises(NoRootError):
        compute_xb(ABS, TangentSolveInput(xt=0, it=1, ib=1), 0.5)
    with pytest.raises(RootOutsidePieceError):
        compute_xb(KINKED, TangentSolveInput(xt=1, it=0, ib=0), 1.0)

    print("  [PASS] compute_xb tests passed")


def test_compute_xt():
    """Test the backward tangent equation"""
    print("Testing compute_xt...")

    assert compute_xt(SQUARE, 0.0, 0, 0, 1.0) == -1.0
    assert compute_xt(SQUARE, 1.0, 0, 0, 1.0) == 0.0
    with pytest.raises(NoRootError):
        compute_xt(ABS, 1.0, 1, 0, 0.5)

    assert compute_xt(KINKED, 2.0, 0, 0, 0.25) == 1.5, "unchecked xt may leave its piece"
    with pytest.raises(RootOutsidePieceError):
        compute_xt(KINKED, 2.0, 0, 0, 0.25, check=True)

    print("  [PASS] compute_xt tests passed")


def test_solve_tangent():
    """Test both directions of the tangent equation through one input type"""
    print("Testing solve_tangent...")

    assert solve_tangent(SQUARE, TangentSolveInput(xt=0, it=0, ib=0), 1.0) == 1.0
    backward = TangentSolveInput(NAN, 0, 0, xbar=1.0, solve_for_xbar=False)
    assert solve_tangent(SQUARE, backward, 1.0) == 0.0, "the reverse of the x^2 solve"
    with pytest.raises(RootOutsidePieceError):
        solve_tangent(KINKED, TangentSolveInput(NAN, 0, 0, xbar=2.0, solve_for_xbar=False), 0.25, check=True)

    with pytest.raises(ValueError):
        TangentSolveInput(NAN, 0, 0)
    with pytest.raises(ValueError):
        TangentSolveInput(0.0, 0, 0, solve_for_xbar=False)

    print("  [PASS] solve_tangent tests passed")


def test_clamp_warning(caplog):
    """Test that a root just outside its piece is clamped with a warning"""
    print("Testing root clamping...")

    with caplog.at_level(logging.WARNING, logger="src.helpers.epssub_graph"):
        xt = compute_xt(KINKED, 1.5 + 1e-8, 0, 0, 0.25, check=True)
    assert xt == 1.0, f"root should be clamped onto x_0 = 1, got {xt}"
    assert "clamping root" in caplog.text, "clamp should be logged"

    print("  [PASS] root clamping tests passed")


def test_sweep_end_logged_at_debug(caplog):
    """Test that extending a sweep that stops short of +inf is a debug record"""
    print("Testing sweep end logging...")

    # Slope 0 then 1e-8 at x = 1000: a near tie, so no kink state follows the last tangent
    near_tie = validate([[1000, 1, -2000, 1e6], [INF, 0, 1e-8, -1e-5]])
    with caplog.at_level(logging.DEBUG, logger="src.helpers.epssub_graph"):
        table = build_lower_table(near_tie, 1.0)
    assert table.rows[-1].x == INF, "the last row is extended to +inf"
    ended = [r for r in caplog.records if "sweep ended" in r.getMessage()]
    assert ended and all(r.levelno == logging.DEBUG for r in ended), "sweep end should be a debug record"
    assert not [r for r in caplog.records if r.levelno >= logging.WARNING], "valid input should not warn"

    print("  [PASS] sweep end logging tests passed")


def test_eval_lower():
    """Test pointwise evaluation of the table"""
    print("Testing eval_lower...")

    table = build_lower_table(ABS, 0.5)
    assert eval_lower(table, 0.1) == -1
    assert eval_lower(table, 0.5) == 0
    assert eval_lower(table, 2.0) == 0.75

    assert eval_lower(build_lower_table(SQUARE, 1.0), 3.0) == 4.0
    restricted = build_lower_table(SQ_RESTRICTED, 1.0)
    assert eval_lower(restricted, 0.0) == -INF, "left domain end gives -inf"
    assert eval_lower(restricted, -1.0) is None, "outside the domain gives None"
    assert eval_lower(restricted, 0.5) == -1.5
    assert eval_lower(build_lower_table(NEEDLE, 1.0), 0.0) == -INF
    assert eval_lower(table, NAN) is None

    print("  [PASS] eval_lower tests passed")


def test_eval_lower_grid():
    """Test grid evaluation, merged and bisected"""
    print("Testing eval_lower_grid...")

    table = build_lower_table(ABS, 0.5)
    assert eval_lower_grid(table, [0.1, 0.2, 0.5, 2.0]) == [-1, -1, 0, 0.75]
    assert eval_lower_grid(table, []) == []
    with pytest.raises(UnsortedInputError):
        eval_lower_grid(table, [1.0, 0.0])
    with pytest.raises(UnsortedInputError):
        eval_lower_grid(table, [0.0, NAN])

    f = generate_convex_plq(60, 4, left_bounded=True)
    table = build_lower_table(f, 0.3)
    grid = np.linspace(f.breakpoint(0) - 1, f.breakpoint(f.n - 1) + 1, 2000)
    assert eval_lower_grid(table, grid) == [eval_lower(table, x) for x in grid], \
        "merged walk should match per-point lookup"

    print("  [PASS] eval_lower_grid tests passed")


def test_graph():
    """Test both bounds read from the graph"""
    print("Testing build_graph / eval_graph...")

    graph = build_graph(ABS, 0.5)
    assert rows_match(graph.lower.rows, graph.upper_source.rows), "|x| is even so both tables agree"
    for xbar, expected in ((0.5, (0, 1)), (0.0, (-1, 1)), (-0.5, (-1, 0))):
        got = eval_graph(graph, xbar)
        assert (got.lo, got.hi) == expected, f"at {xbar}: expected {expected}, got {got}"

    got = eval_graph(build_graph(SQ_RESTRICTED, 1.0), 0.0)
    assert (got.lo, got.hi) == (-INF, 2), f"expected (-inf, 2], got {got}"
    assert eval_graph(build_graph(SQ_RESTRICTED, 1.0), -1.0).empty

    for seed in range(15):
        f = generate_convex_plq(4 + 3 * seed, 100 + seed, left_bounded=seed % 3 == 1, right_bounded=seed % 3 == 2)
        graph = build_graph(f, 0.7)
        for xbar in random_domain_points(f, 10, np.random.default_rng(seed)):
            fast = eps_subdifferential(f, xbar, 0.7)
            assert eval_graph(graph, xbar).deviation(fast) <= 1e-6, \
                f"seed {seed}, xbar={xbar}: graph {eval_graph(graph, xbar)} vs pointwise {fast}"

    print("  [PASS] graph tests passed")


def test_classify_piece():
    """Test closed forms of table rows"""
    print("Testing classify_piece...")

    form = classify_piece(build_lower_table(SQUARE, 1.0), 0)
    assert isinstance(form, SqrtQuadraticPiece)
    assert form.linear == (2.0, 0.0) and form.radicand == (0.0, 0.0, 4.0) and form.sign == -1
    assert form(3.0) == 4.0

    table = build_lower_table(ABS, 0.5)
    assert classify_piece(table, 0) == ConstantPiece(-1)
    kink = classify_piece(table, 1)
    assert isinstance(kink, RationalPiece) and kink.pole == 0
    assert kink(2.0) == 0.75

    f = generate_convex_plq(30, 6)
    table = build_lower_table(f, 0.4)
    for k, row in enumerate(table.rows):
        lo = table.rows[k - 1].x if k > 0 else row.x - 2.0
        hi = row.x if math.isfinite(row.x) else lo + 2.0
        form = classify_piece(table, k)
        for x in np.linspace(lo, hi, 7)[1:-1]:
            assert math.isclose(form(x), eval_lower(table, x), rel_tol=1e-9, abs_tol=1e-9), \
                f"row {k} ({row}) closed form disagrees at x={x}"

    print("  [PASS] classify_piece tests passed")


def test_sample_graph():
    """Test evenly spaced samples of both bounds"""
    print("Testing sample_graph...")

    xs, lower, upper = sample_graph(build_graph(ABS, 0.5), 5, (-1.0, 1.0))
    assert xs == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert lower == [-1, -1, -1, 0, 0.5], f"unexpected lower samples {lower}"
    assert upper == [-0.5, 0, 1, 1, 1], f"unexpected upper samples {upper}"

    xs, lower, upper = sample_graph(build_graph(SQ_RESTRICTED, 1.0), 3, (-2.0, 2.0))
    assert xs[0] == 0.0, "sampling starts at the domain end"
    assert lower[0] == -INF
    assert sample_graph(build_graph(SQ_RESTRICTED, 1.0), 4, (-3.0, -1.0)) == ([], [], [])

    print("  [PASS] sample_graph tests passed")


def test_operation_count():
    """Test that the sweep does linear work"""
    print("Testing operation counts...")

    small = build_lower_table(generate_convex_plq(4000, 1), 1.0).operations
    large = build_lower_table(generate_convex_plq(40000, 1), 1.0).operations
    assert 8 <= large / small <= 12, f"operation ratio {large / small} is not linear"

    print("  [PASS] operation count tests passed")


def main():
    """Run all tests"""
    print("\n" + "="*60)
    print("Running Graph Tests")
    print("="*60 + "\n")

    test_tables()
    test_table_shape()
    test_degenerate_shapes()
    test_mixed_tables()
    test_compute_xb()
    test_compute_xt()
    test_solve_tangent()
    test_eval_lower()
    test_eval_lower_grid()
    test_graph()
    test_classify_piece()
    test_sample_graph()
    test_operation_count()

    print("\n" + "="*60)
    print("All tests passed!")
    print("="*60 + "\n")


if __name__ == "__main__":
    main()
