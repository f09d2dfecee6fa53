"""CSV files for lower-bound tables and graph samples, plus a gnuplot script

Table files have the header x,t,it,ib,v and an optional side column
(lower/upper). Indices are written 1-based; irrelevant entries are nan.
"""

import csv
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

from ..core.data_classes import LowerBoundRow, RowType, format_number
from ..core.errors import PlqParseError

PathLike = Union[str, Path]

TABLE_FIELDS = ["x", "t", "it", "ib", "v"]
SAMPLE_FIELDS = ["x", "lower", "upper"]


def _index_text(index: Optional[int]) -> str:
    return "nan" if index is None else str(index + 1)


def _row_fields(row: LowerBoundRow) -> List[str]:
    return [
        format_number(row.x),
        str(int(row.t)),
        _index_text(row.it),
        _index_text(row.ib),
        format_number(row.v),
    ]


def write_table_csv(path: PathLike, tables: Mapping[str, Sequence[LowerBoundRow]]) -> Path:
    """Write one or more tables to a CSV file

    Args:
        path: Output file
        tables: Rows keyed by side name; a single key "lower" writes the
            plain five-column layout, anything else adds a side column

    Returns:
        The path written
    """
    path = Path(path)
    with_side = list(tables) != ["lower"]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TABLE_FIELDS + (["side"] if with_side else []))
        for side, rows in tables.items():
            for row in rows:
                writer.writerow(_row_fields(row) + ([side] if with_side else []))
    return path


def _parse_index(token: str, line: int) -> Optional[int]:
    if token.strip().lower() == "nan":
        return None
    try:
        value = int(token)
    except ValueError:
        raise PlqParseError(f"cannot read index {token!r}", line) from None
    if value < 1:
        raise PlqParseError(f"indices are 1-based, got {value}", line)
    return value - 1


def _parse_float(token: str, line: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise PlqParseError(f"cannot read {token!r} as a number", line) from None


def read_table_csv(path: PathLike) -> Dict[str, List[LowerBoundRow]]:
    """Read a table CSV back into rows keyed by side ("lower" when there is no side column)

    Raises:
        PlqParseError: bad header, field count, or value
    """
    tables: Dict[str, List[LowerBoundRow]] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:5] != TABLE_FIELDS:
            raise PlqParseError(f"expected header {','.join(TABLE_FIELDS)}", 1)
        with_side = len(header) == 6
        for line, fields in enumerate(reader, start=2):
            if not fields:
                continue
            if len(fields) != len(header):
                raise PlqParseError(f"expected {len(header)} fields, got {len(fields)}", line)
            try:
                t = RowType(int(fields[1]))
            except ValueError:
                raise PlqParseError(f"unknown row type {fields[1]!r}", line) from None
            row = LowerBoundRow(
                x=_parse_float(fields[0], line),
                t=t,
                it=_parse_index(fields[2], line),
                ib=_parse_index(fields[3], line),
                v=_parse_float(fields[4], line),
            )
            side = fields[5] if with_side else "lower"
            tables.setdefault(side, []).append(row)
    return tables


def _sample_text(value: Optional[float]) -> str:
    return "nan" if value is None else format_number(value)


def write_sample_csv(
    path: PathLike,
    xs: Sequence[float],
    lower: Sequence[Optional[float]],
    upper: Sequence[Optional[float]],
) -> Path:
    """Write x,lower,upper rows; points outside the domain get nan"""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SAMPLE_FIELDS)
        for x, lo, hi in zip(xs, lower, upper):
            writer.writerow([format_number(x), _sample_text(lo), _sample_text(hi)])
    return path


def write_gnuplot_script(path: PathLike, sample_path: PathLike, eps: float) -> Path:
    """Gnuplot script shading the band between the lower and upper curves of a sample CSV"""
    path = Path(path)
    data = Path(sample_path).name if Path(sample_path).parent == path.parent else str(sample_path)
    title = f"eps = {format_number(eps)}"
    lines = [
        "set datafile separator ','",
        "set datafile missing 'nan'",
        f"set title \"graph of the eps-subdifferential, {title}\"",
        "set xlabel 'x'",
        "set ylabel 's'",
        "set key top left",
        f"plot '{data}' using 1:2:3 skip 1 with filledcurves fc rgb '#c6dbef' title 'band', \\",
        f"     '{data}' using 1:2 skip 1 with lines lw 2 lc rgb '#08519c' title 'lower', \\",
        f"     '{data}' using 1:3 skip 1 with lines lw 2 lc rgb '#cb181d' title 'upper'",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def rows_match(left: Sequence[LowerBoundRow], right: Sequence[LowerBoundRow]) -> bool:
    """Field-for-field equality of two row lists (NaN equal to NaN)"""
    return len(left) == len(right) and all(a.same_fields(b) for a, b in zip(left, right))
