"""Typed columnar dataset with CSV ingestion/export and join provenance.

Cells are kept as the raw strings read from CSV (None for empty fields);
numbers are parsed to doubles only when aggregation needs them, so export
preserves the uploaded text.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import uuid
from dataclasses import dataclass, field, replace

from .errors import CsvError, LengthMismatch, RaggedRows, UnknownColumn
from .plans import JoinPlan
from .values import parse_datetime

COLUMN_TYPES = ("string", "number", "datetime")


@dataclass(frozen=True)
class Column:
    name: str
    ctype: str
    cells: tuple[str | None, ...]
    provenance: JoinPlan | None = None
    enabled: bool = True

    @property
    def is_augmented(self) -> bool:
        return self.provenance is not None


@dataclass(frozen=True)
class Dataset:
    id: str
    columns: tuple[Column, ...]
    row_count: int

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise UnknownColumn(name)

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def content_hash(self) -> str:
        return hashlib.sha256(export_csv(self)).hexdigest()


def _parses_as_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _parses_as_datetime(text: str) -> bool:
    try:
        parse_datetime(text)
        return True
    except ValueError:
        return False


def _infer_type(cells: list[str | None]) -> str:
    present = [c for c in cells if c is not None]
    if present and all(_parses_as_number(c) for c in present):
        return "number"
    if present and all(_parses_as_datetime(c) for c in present):
        return "datetime"
    return "string"


def import_csv(data: bytes | str, has_header: bool = True, delimiter: str = ",") -> Dataset:
    """Parse CSV into a dataset, inferring one type per column."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        records = list(csv.reader(io.StringIO(text), delimiter=delimiter))
    except csv.Error as exc:
        raise CsvError(0, str(exc))
    while records and not records[-1]:
        records.pop()  # trailing blank lines are terminators, not rows
    if not records:
        raise CsvError(0, "empty CSV")

    width = len(records[0])
    records = [r if r else [""] * width for r in records]  # interior blank line = null row
    for i, rec in enumerate(records):
        if len(rec) != width:
            raise RaggedRows(i + 1)

    if has_header:
        names, rows = records[0], records[1:]
        if len(set(names)) != len(names):
            raise CsvError(1, "duplicate column names")
    else:
        names, rows = [f"col_{i}" for i in range(width)], records

    columns = []
    for i, name in enumerate(names):
        cells = [row[i] if row[i] != "" else None for row in rows]
        columns.append(Column(name=name, ctype=_infer_type(cells), cells=tuple(cells)))
    return Dataset(id=uuid.uuid4().hex, columns=tuple(columns), row_count=len(rows))


def export_csv(d: Dataset) -> bytes:
    """Enabled columns only; nulls written as empty fields."""
    cols = [c for c in d.columns if c.enabled]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([c.name for c in cols])
    for i in range(d.row_count):
        writer.writerow([c.cells[i] if c.cells[i] is not None else "" for c in cols])
    return buf.getvalue().encode("utf-8")


def add_augmented_column(
    d: Dataset,
    name: str,
    values: list[str | None],
    ctype: str,
    plan: JoinPlan,
) -> Dataset:
    if len(values) != d.row_count:
        raise LengthMismatch(f"{len(values)} values for {d.row_count} rows")
    existing = set(d.column_names())
    unique = name
    n = 2
    while unique in existing:
        unique = f"{name} ({n})"
        n += 1
    col = Column(name=unique, ctype=ctype, cells=tuple(values), provenance=plan)
    return replace(d, columns=d.columns + (col,))


def set_enabled(d: Dataset, column_name: str, flag: bool) -> Dataset:
    cols = tuple(
        replace(c, enabled=flag) if c.name == column_name else c for c in d.columns
    )
    if cols == d.columns and column_name not in d.column_names():
        raise UnknownColumn(column_name)
    return replace(d, columns=cols)


def head(d: Dataset, n: int) -> Dataset:
    take = min(n, d.row_count)
    cols = tuple(
        replace(c, cells=c.cells[:take]) for c in d.columns if c.enabled
    )
    return replace(d, columns=cols, row_count=take)


def plan_sidecar(d: Dataset) -> bytes:
    """JSON sidecar listing every augmented column's join plan."""
    entries = [
        {"column": c.name, "plan": c.provenance.to_json()}
        for c in d.columns
        if c.provenance is not None
    ]
    return json.dumps({"augmented_columns": entries}, indent=2).encode("utf-8")
