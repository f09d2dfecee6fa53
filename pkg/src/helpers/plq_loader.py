"""Reader and writer for the PLQ text format

One piece per line, four whitespace-separated tokens "x a b c". Blank lines
and lines starting with '#' are skipped. inf, +inf and -inf are accepted in
any case.

Example:
    # |x|
    0   0 -1 0
    inf 0  1 0
"""

import math
from pathlib import Path
from typing import List, Union

from ..core.data_classes import format_number
from ..core.errors import PlqParseError, PlqValidationError
from ..core.plq_function import PlqFunction, validate
from ..core.tolerance import DEFAULT_TOLERANCE, Tolerance

PathLike = Union[str, Path]


def _parse_token(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise PlqParseError(f"cannot read {token!r} as a number", line) from None
    if math.isnan(value):
        raise PlqParseError("NaN is not allowed", line)
    return value


def parse_plq_text(text: str, tol: Tolerance = DEFAULT_TOLERANCE) -> PlqFunction:
    """Parse and validate PLQ text

    Args:
        text: File contents
        tol: Tolerance handed to validate

    Returns:
        The validated function

    Raises:
        PlqParseError: a line is malformed, or a validation rule fails
            (reported on the source line of the offending row)
    """
    rows: List[List[float]] = []
    source_lines: List[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 4:
            raise PlqParseError(f"expected 4 numbers (x a b c), got {len(tokens)}", line_no)
        rows.append([_parse_token(t, line_no) for t in tokens])
        source_lines.append(line_no)

    if not rows:
        raise PlqParseError("no pieces found", max(1, len(text.splitlines())))
    try:
        return validate(rows, tol)
    except PlqValidationError as e:
        row = e.row if e.row is not None else len(rows) - 1
        raise PlqParseError(str(e), source_lines[row]) from e


def load_plq(path: PathLike, tol: Tolerance = DEFAULT_TOLERANCE) -> PlqFunction:
    """Read a PLQ file

    Raises:
        FileNotFoundError: path does not exist
        PlqParseError: see parse_plq_text
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"PLQ file '{path}' does not exist")
    return parse_plq_text(path.read_text(encoding="utf-8"), tol)


def dump_plq(f: PlqFunction) -> str:
    """PLQ text for f, one row per line, shortest round-trip numbers"""
    return "".join(" ".join(format_number(v) for v in row) + "\n" for row in f.rows())


def save_plq(f: PlqFunction, path: PathLike) -> Path:
    """Write f to path and return the path"""
    path = Path(path)
    path.write_text(dump_plq(f), encoding="utf-8")
    return path
