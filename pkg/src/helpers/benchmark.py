"""Timing comparison of the linear reference against the logarithmic search"""

import logging
import math
import time
from typing import Callable, List, Sequence

import numpy as np

from ..core.data_classes import BenchRow, format_number
from ..core.plq_generator import generate_convex_plq
from ..core.utils.monitor import ResourceMonitor
from .epssub_graph import build_lower_table
from .epssub_point import eps_subdifferential
from .oracle import eps_sub_reference

_logger = logging.getLogger(__name__)

BENCH_EPS = 1.0


def _median_seconds(fn: Callable[[float], object], points: Sequence[float]) -> float:
    if len(points) == 0:
        return math.nan
    times = []
    for x in points:
        start = time.perf_counter()
        fn(x)
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def run_benchmark(sizes: Sequence[int], queries: int, seed: int, eps: float = BENCH_EPS) -> List[BenchRow]:
    """Time `queries` pointwise queries per size under both algorithms, plus one table build

    Args:
        sizes: Piece counts to generate
        queries: Pointwise queries per size (0 allowed)
        seed: Seed for the generator and the query points
        eps: Epsilon of every query

    Returns:
        One BenchRow per size, in input order
    """
    monitor = ResourceMonitor()
    results = []
    for pieces in sizes:
        f = generate_convex_plq(pieces, seed)
        rng = np.random.default_rng(seed)
        lo, hi = (f.breakpoint(0), f.breakpoint(f.n - 1)) if f.n > 0 else (-1.0, 1.0)
        points = rng.uniform(lo, hi, size=queries).tolist()

        oracle_median = _median_seconds(lambda x: eps_sub_reference(f, x, eps), points)
        fast_median = _median_seconds(lambda x: eps_subdifferential(f, x, eps), points)
        monitor.lap()
        table = build_lower_table(f, eps)
        build_seconds = monitor.lap()

        row = BenchRow(
            pieces=pieces,
            oracle_median=oracle_median,
            fast_median=fast_median,
            build_seconds=build_seconds,
            build_operations=table.operations,
            rss_mb=monitor.rss_mb(),
        )
        _logger.debug("bench row: %s", row)
        results.append(row)
    return results


def format_report(rows: Sequence[BenchRow]) -> str:
    """Fixed-width table of the benchmark rows with the growth from first to last size"""
    header = f"{'pieces':>8} {'oracle_s':>12} {'fast_s':>12} {'ratio':>9} {'build_s':>10} {'build_ops':>10} {'rss_mb':>8}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.pieces:>8} {r.oracle_median:>12.3e} {r.fast_median:>12.3e} {r.ratio:>9.1f} "
            f"{r.build_seconds:>10.3e} {r.build_operations:>10} {r.rss_mb:>8.1f}"
        )
    if len(rows) >= 2:
        first, last = rows[0], rows[-1]

        def growth(a: float, b: float) -> str:
            return format_number(round(b / a, 2)) if a > 0 and math.isfinite(a) and math.isfinite(b) else "nan"

        lines.append(
            f"growth {first.pieces} -> {last.pieces}: oracle x{growth(first.oracle_median, last.oracle_median)}, "
            f"fast x{growth(first.fast_median, last.fast_median)}, "
            f"build ops x{growth(first.build_operations, last.build_operations)}"
        )
    return "\n".join(lines)
