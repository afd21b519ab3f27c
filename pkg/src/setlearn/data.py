"""CSV ingestion and emission.

Input: comma or whitespace delimited numeric tables, optional header row,
optional label column; ``#`` lines are skipped, so every table this
package emits can be read back.  Errors carry row/column diagnostics.

Output: RFC-4180-style CSV with a ``#``-prefixed metadata header, ``\\n``
line endings and all floats printed with 9 significant digits.  Output is
byte-deterministic unless a timestamp line is requested.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import DataError

__all__ = ["Dataset", "load_csv", "write_table", "fmt_value"]


@dataclass(frozen=True, eq=False)
class Dataset:
    """A rectangular numeric table split into points and optional labels."""

    points: np.ndarray
    labels: np.ndarray  # or None
    source: str

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


def load_csv(path, header=False, label_col=None):
    """Read a numeric table; nonzero values in ``label_col`` mark positives.

    The delimiter is sniffed per line (comma if present, else whitespace).
    Raises DataError with the offending row and column on ragged or
    non-numeric input, or on an empty file.
    """
    rows = []
    first_data_line = True
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if first_data_line and header:
                first_data_line = False
                continue
            first_data_line = False
            cells = [c for c in (line.split(",") if "," in line else line.split()) if c != ""]
            values = []
            for col, cell in enumerate(cells, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}: row {lineno}, column {col}: "
                        f"could not parse {cell.strip()!r} as a number") from None
            rows.append((lineno, values))
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0][1])
    for lineno, values in rows:
        if len(values) != width:
            raise DataError(
                f"{path}: row {lineno} has {len(values)} columns, expected {width}")
    table = np.asarray([v for _, v in rows], dtype=float)
    if not np.all(np.isfinite(table)):
        bad = np.argwhere(~np.isfinite(table))[0]
        raise DataError(
            f"{path}: non-finite value at row {rows[bad[0]][0]}, column {bad[1] + 1}")
    labels = None
    if label_col is not None:
        col = int(label_col)
        if not 0 <= col < width:
            raise DataError(
                f"{path}: label column {col} out of range for {width} columns")
        labels = table[:, col] != 0.0
        table = np.delete(table, col, axis=1)
        if table.shape[1] == 0:
            raise DataError(f"{path}: no feature columns left after removing labels")
    return Dataset(points=table, labels=labels, source=str(path))


def fmt_value(v):
    """Render one CSV cell: ints verbatim, bools as 0/1, floats with %.9g."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.9g}"


def write_table(path, title, meta, columns, rows, timestamp=True, footer=None):
    """Write a CSV table with a ``#`` metadata header.

    ``meta`` is a list of key=value strings recorded as comments;
    ``rows`` yields tuples matching ``columns``; ``footer`` lines (e.g.
    summary fractions computed after the rows) are appended as comments.
    """
    lines = [f"# {title}"]
    if timestamp:
        now = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        lines.append(f"# generated={now}")
    lines.extend(f"# {entry}" for entry in meta)
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} does not match header {len(columns)}")
        lines.append(",".join(fmt_value(v) for v in row))
    if footer:
        lines.extend(f"# {entry}" for entry in footer)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
