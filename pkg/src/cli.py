"""Command-line front end

Usage:
    python -m src.cli eval FILE X
    python -m src.cli esub FILE XBAR EPS [--oracle | --check]
    python -m src.cli graph FILE EPS [--table OUT] [--sample M OUT] [--xrange LO HI] [--script OUT.gp]
    python -m src.cli gen N SEED OUT [--left-bounded] [--right-bounded]
    python -m src.cli bench --sizes N N [N ...] --queries Q --seed S
    python -m src.cli check [--count C] [--max-pieces P] [--seed S]

Exit codes: 0 success, 2 usage or input error, 3 verification mismatch.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from .core.data_classes import format_number
from .core.errors import PlqError
from .core.plq_generator import generate_convex_plq, generate_mixed_plq, random_domain_points
from .core.utils.logs import configure_logging
from .helpers.benchmark import format_report, run_benchmark
from .helpers.epssub_graph import DEFAULT_WINDOW, build_graph, eval_graph, sample_graph
from .helpers.epssub_point import eps_subdifferential
from .helpers.oracle import conjugate, eps_sub_reference
from .helpers.plq_loader import load_plq, save_plq
from .helpers.table_csv import write_gnuplot_script, write_sample_csv, write_table_csv

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MISMATCH = 3

# Largest endpoint deviation accepted by --check and the check command
CHECK_THRESHOLD = 1e-6
CHECK_EPSILONS = (1e-3, 0.1, 1.0, 10.0)


def cmd_eval(args: argparse.Namespace) -> int:
    f = load_plq(args.file)
    print(format_number(f.evaluate(args.x)))
    return EXIT_OK


def cmd_esub(args: argparse.Namespace) -> int:
    f = load_plq(args.file)
    if args.oracle:
        print(eps_sub_reference(f, args.xbar, args.eps))
        return EXIT_OK
    fast = eps_subdifferential(f, args.xbar, args.eps)
    print(fast)
    if args.check:
        reference = eps_sub_reference(f, args.xbar, args.eps)
        deviation = fast.deviation(reference)
        print(f"oracle {reference}, max deviation {format_number(deviation)}")
        if deviation > CHECK_THRESHOLD:
            _logger.error("esub mismatch at xbar=%s: fast %s vs oracle %s", format_number(args.xbar), fast, reference)
            return EXIT_MISMATCH
    return EXIT_OK


def cmd_graph(args: argparse.Namespace) -> int:
    f = load_plq(args.file)
    graph = build_graph(f, args.eps)
    if args.table:
        write_table_csv(args.table, {"lower": graph.lower.rows, "upper": graph.upper_source.rows})
        print(f"wrote {args.table} ({len(graph.lower)} lower rows, {len(graph.upper_source)} upper rows)")
    if args.sample:
        count, out = int(args.sample[0]), args.sample[1]
        window = tuple(args.xrange) if args.xrange else DEFAULT_WINDOW
        xs, lower, upper = sample_graph(graph, count, window)
        write_sample_csv(out, xs, lower, upper)
        print(f"wrote {out} ({len(xs)} samples)")
        if args.script:
            write_gnuplot_script(args.script, out, args.eps)
            print(f"wrote {args.script}")
    if not args.table and not args.sample:
        for row in graph.lower.rows:
            print(row)
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    f = generate_convex_plq(args.n, args.seed, args.left_bounded, args.right_bounded)
    save_plq(f, args.out)
    print(f"wrote {args.out} ({f.n + 1} pieces)")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    rows = run_benchmark(args.sizes, args.queries, args.seed)
    print(format_report(rows))
    return EXIT_OK


def run_check(count: int, max_pieces: int, seed: int, points: int = 5) -> float:
    """Largest endpoint deviation among pointwise, graph, and oracle over a generated corpus

    Instances come in groups of four (one per domain shape); groups switch
    between generate_convex_plq and generate_mixed_plq.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(count):
        pieces = int(rng.integers(3, max_pieces + 1)) if max_pieces >= 3 else 3
        make = generate_convex_plq if (i // 4) % 2 == 0 else generate_mixed_plq
        f = make(pieces, seed + i, left_bounded=i % 4 in (1, 3), right_bounded=i % 4 in (2, 3))
        conj = conjugate(f)
        xbars = random_domain_points(f, points, rng)
        for eps in CHECK_EPSILONS:
            graph = build_graph(f, eps)
            for xbar in xbars:
                fast = eps_subdifferential(f, xbar, eps)
                reference = eps_sub_reference(f, xbar, eps, conj=conj)
                gaps = (fast.deviation(reference), fast.deviation(eval_graph(graph, xbar)))
                if max(gaps) > worst:
                    worst = max(gaps)
                    _logger.debug("new worst %s at instance %d, xbar=%s, eps=%s",
                                  format_number(worst), i, format_number(xbar), format_number(eps))
    return worst


def cmd_check(args: argparse.Namespace) -> int:
    worst = run_check(args.count, args.max_pieces, args.seed)
    print(f"{args.count} instances, max deviation {format_number(worst)}")
    if worst > CHECK_THRESHOLD:
        _logger.error("check failed: deviation %s above %s", format_number(worst), format_number(CHECK_THRESHOLD))
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src.cli",
        description="Epsilon-subdifferentials of convex piecewise linear-quadratic functions",
    )
    parser.add_argument("--log-level", default="WARNING", help="Logging level (default: WARNING)")
    parser.add_argument("--log-file", default=None, help="Also append log records to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="Print f(x)")
    p.add_argument("file", help="PLQ file")
    p.add_argument("x", type=float)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("esub", help="Print the eps-subdifferential at XBAR")
    p.add_argument("file", help="PLQ file")
    p.add_argument("xbar", type=float)
    p.add_argument("eps", type=float)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--oracle", action="store_true", help="Use the linear-time reference instead")
    mode.add_argument("--check", action="store_true", help="Run both and report the deviation")
    p.set_defaults(handler=cmd_esub)

    p = sub.add_parser("graph", help="Build the graph tables; write CSV and plot data")
    p.add_argument("file", help="PLQ file")
    p.add_argument("eps", type=float)
    p.add_argument("--table", metavar="OUT", help="Write both lower-bound tables to this CSV")
    p.add_argument("--sample", nargs=2, metavar=("M", "OUT"), help="Write M samples x,lower,upper to OUT")
    p.add_argument("--xrange", nargs=2, type=float, metavar=("LO", "HI"),
                   help=f"Sampling window (default: {DEFAULT_WINDOW[0]:g} {DEFAULT_WINDOW[1]:g})")
    p.add_argument("--script", metavar="OUT.gp", help="Write a gnuplot script for the sample (needs --sample)")
    p.set_defaults(handler=cmd_graph)

    p = sub.add_parser("gen", help="Write a random convex PLQ function")
    p.add_argument("n", type=int, help="Number of pieces")
    p.add_argument("seed", type=int)
    p.add_argument("out", help="Output PLQ file")
    p.add_argument("--left-bounded", action="store_true", dest="left_bounded")
    p.add_argument("--right-bounded", action="store_true", dest="right_bounded")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("bench", help="Time the reference scan against the logarithmic search")
    p.add_argument("--sizes", nargs="+", type=int, required=True)
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("check", help="Compare pointwise, graph, and reference results on a generated corpus")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--max-pieces", type=int, default=50, dest="max_pieces")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_check)
    return parser


def _validate_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.command == "graph":
        if args.script and not args.sample:
            parser.error("--script needs --sample")
        if args.sample:
            try:
                int(args.sample[0])
            except ValueError:
                parser.error(f"--sample M must be an integer, got {args.sample[0]!r}")
    if args.command == "bench":
        if len(args.sizes) < 2:
            parser.error("--sizes needs at least two values to show a trend")
        if args.queries < 0:
            parser.error("--queries must be >= 0")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate_args(parser, args)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        configure_logging(args.log_level, args.log_file)
        return args.handler(args)
    except (PlqError, ValueError, OSError) as e:
        _logger.error("%s: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
