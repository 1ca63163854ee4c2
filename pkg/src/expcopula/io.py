"""CSV ingestion and deterministic JSON report emission."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from ._exceptions import DataError
from .inference import MIN_OBSERVATIONS, ObservationSet

__all__ = ["CsvSchema", "IngestResult", "RunReport", "ingest_csv", "emit_report", "write_csv"]


class SchemaError(DataError):
    """The CSV layout does not match the requested schema."""


@dataclass(frozen=True)
class CsvSchema:
    """How to read paired observations from a CSV file.

    ``has_header=None`` auto-detects a header: the first non-blank row is
    a header when its x or y cell does not parse as a number.
    """

    delimiter: str = ","
    has_header: bool | None = None
    x_column: int = 0
    y_column: int = 1

    def __post_init__(self) -> None:
        if len(self.delimiter) != 1:
            raise SchemaError(f"delimiter must be a single character, got {self.delimiter!r}")
        if self.x_column == self.y_column:
            raise SchemaError("x_column and y_column must differ")
        if self.x_column < 0 or self.y_column < 0:
            raise SchemaError("column indices must be nonnegative")


@dataclass(frozen=True)
class IngestResult:
    data: ObservationSet
    rows_read: int
    rows_skipped: int
    header: list[str] | None
    diagnostics: list[str] = field(default_factory=list)


def _number(cell: str) -> float | None:
    try:
        value = float(cell)
    except ValueError:
        return None
    return value


def ingest_csv(path: str | Path, schema: CsvSchema = CsvSchema(), strict: bool = True) -> IngestResult:
    """Read paired positive observations.

    In strict mode any row that fails to parse or lies outside the Rayleigh
    support aborts the read with a message naming the row. In lenient mode
    such rows are skipped and counted.

    Raises
    ------
    OSError
        If the file cannot be read.
    SchemaError
        If a row is narrower than the requested columns (strict mode).
    DataError
        On bad rows in strict mode, or when fewer than five rows survive.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh, delimiter=schema.delimiter), start=1)]
    rows = [(lineno, row) for lineno, row in rows if any(cell.strip() for cell in row)]
    width = max(schema.x_column, schema.y_column) + 1

    header = None
    if rows:
        first = rows[0][1]
        if schema.has_header is None:
            is_header = len(first) >= width and (
                _number(first[schema.x_column]) is None or _number(first[schema.y_column]) is None
            )
        else:
            is_header = schema.has_header
        if is_header:
            header = [cell.strip() for cell in first]
            rows = rows[1:]

    xs, ys, diagnostics = [], [], []
    for lineno, row in rows:
        if len(row) < width:
            problem = f"row {lineno}: expected at least {width} columns, found {len(row)}"
            if strict:
                raise SchemaError(problem)
            diagnostics.append(problem)
            continue
        x, y = _number(row[schema.x_column]), _number(row[schema.y_column])
        if x is None or y is None:
            problem = f"row {lineno}: non-numeric value in {row!r}"
        elif not (math.isfinite(x) and math.isfinite(y) and x > 0 and y > 0):
            problem = f"row {lineno}: values must be finite and positive, got x={x}, y={y}"
        else:
            xs.append(x)
            ys.append(y)
            continue
        if strict:
            raise DataError(problem)
        diagnostics.append(problem)

    if len(xs) < MIN_OBSERVATIONS:
        raise DataError(f"{path}: {len(xs)} usable rows, need at least {MIN_OBSERVATIONS}")
    return IngestResult(ObservationSet(np.array(xs), np.array(ys)), len(rows), len(diagnostics), header, diagnostics)


def write_csv(rows: np.ndarray, columns: Iterable[str], out) -> None:
    """Write a numeric table with full round-trip precision."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(columns))
    for row in np.asarray(rows, dtype=float):
        writer.writerow([repr(float(v)) for v in row])


@dataclass
class RunReport:
    """Everything a CLI invocation prints on stdout.

    ``wall_time`` stays ``None`` unless timing was requested, so that
    reports are byte-reproducible by default.
    """

    command: str
    parameters: dict
    results: Any
    version: str
    seed: int | None = None
    wall_time: float | None = None

    def as_dict(self) -> dict:
        out = {
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "version": self.version,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.wall_time is not None:
            out["wall_time_s"] = self.wall_time
        return out


def _format_number(value: float, pretty: bool) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    if pretty:
        if value != 0.0 and abs(value) < 5e-5:
            return f"{value:.4g}"
        text = f"{value:.4f}".rstrip("0").rstrip(".")
        return "0" if text in ("-0", "") else text
    return format(value, ".17g")


def _encode(obj: Any, pretty: bool, indent: int) -> str:
    pad = "  " * (indent + 1) if pretty else ""
    close = "  " * indent if pretty else ""
    nl = "\n" if pretty else ""
    sep = ": " if pretty else ":"
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_number(float(obj), pretty)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}{sep}{_encode(obj[k], pretty, indent + 1)}" for k in sorted(obj, key=str)]
        return "{" + nl + ("," + nl).join(items) + nl + close + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if pretty and all(isinstance(v, (int, float, np.number)) for v in seq):
            return "[" + ", ".join(_encode(v, pretty, indent + 1) for v in seq) + "]"
        items = [f"{pad}{_encode(v, pretty, indent + 1)}" for v in seq]
        return "[" + nl + ("," + nl).join(items) + nl + close + "]"
    if hasattr(obj, "as_dict"):
        return _encode(obj.as_dict(), pretty, indent)
    if hasattr(obj, "_asdict"):
        return _encode(obj._asdict(), pretty, indent)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def emit_report(report: RunReport | dict, pretty: bool = False) -> str:
    """Serialise a report as JSON with sorted keys.

    Machine mode writes every float with 17 significant digits, which
    round-trips exactly; pretty mode rounds to 4 decimals for reading.
    """
    payload = report.as_dict() if isinstance(report, RunReport) else report
    return _encode(payload, pretty, 0) + "\n"
