"""Reading paired observations from delimited text files."""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from pathlib import Path

from .data import PairedSample, summarize
from .errors import DomainError

__all__ = ["DataFile", "DataFileError", "read_pairs"]


class DataFileError(DomainError):
    """The data file is unreadable or malformed."""


@dataclass
class DataFile:
    path: str
    delimiter: str = ","
    header: bool | None = None  # None: auto-detect
    x_column: str | int = 1
    y_column: str | int = 2


def _float(token: str) -> float | None:
    try:
        v = float(token.strip())
    except ValueError:
        return None
    return v


def _resolve(col, header_row):
    if isinstance(col, int) or (isinstance(col, str) and col.strip().isdigit()):
        idx = int(col) - 1
        if idx < 0:
            raise DataFileError(f"column numbers start at 1, got {col}")
        return idx
    if header_row is None:
        raise DataFileError(f"column {col!r} given by name but the file has no header")
    names = [h.strip() for h in header_row]
    if col not in names:
        raise DataFileError(f"column {col!r} not found in header {names}")
    return names.index(col)


def read_pairs(spec: DataFile) -> tuple[PairedSample, str]:
    """Parse ``spec`` and return the sample with the SHA-256 of the raw bytes.

    A header is assumed when the first non-blank row does not parse as
    numbers in the selected columns, unless ``spec.header`` forces it.
    """
    try:
        raw = Path(spec.path).read_bytes()
    except OSError as exc:
        raise DataFileError(f"cannot read {spec.path}: {exc.strerror or exc}") from None
    digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError:
        raise DataFileError(f"{spec.path} is not valid UTF-8") from None
    rows = [(i + 1, r) for i, r in enumerate(csv.reader(io.StringIO(text), delimiter=spec.delimiter))
            if any(cell.strip() for cell in r)]
    if not rows:
        raise DataFileError(f"{spec.path} contains no data rows")

    first = rows[0][1]
    header = spec.header
    if header is None:
        try:
            xi, yi = _resolve(spec.x_column, None), _resolve(spec.y_column, None)
            header = (max(xi, yi) >= len(first)
                      or _float(first[xi]) is None or _float(first[yi]) is None)
        except DataFileError:
            header = True
    header_row = first if header else None
    xi = _resolve(spec.x_column, header_row)
    yi = _resolve(spec.y_column, header_row)
    body = rows[1:] if header else rows

    xs, ys = [], []
    for lineno, row in body:
        if max(xi, yi) >= len(row):
            raise DataFileError(f"line {lineno}: expected at least {max(xi, yi) + 1} columns")
        x, y = _float(row[xi]), _float(row[yi])
        if x is None or y is None:
            raise DataFileError(f"line {lineno}: non-numeric value in {row!r}")
        if not (math.isfinite(x) and math.isfinite(y)):
            raise DataFileError(f"line {lineno}: non-finite value in {row!r}")
        xs.append(x)
        ys.append(y)
    if not xs:
        raise DataFileError(f"{spec.path} has a header but no data rows")
    return summarize(xs, ys), digest
