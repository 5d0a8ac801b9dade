"""In-memory typed tables and their CSV round-trip.

CSV dialect: RFC-4180 quoting, UTF-8, mandatory header row, "\n" line ends.
An empty cell is null (an error when the column is not nullable).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .errors import HeaderMismatchError, RuntimeTypeError
from .schema import TableSchema
from .values import (
    FLOAT_TOLERANCE,
    kind_of,
    sort_key,
    text_to_value,
    value_to_text,
    values_equal,
)


@dataclass(frozen=True)
class Relation:
    schema: TableSchema
    rows: tuple[tuple, ...]

    def __post_init__(self):
        width = len(self.schema.columns)
        for r, row in enumerate(self.rows, start=1):
            if len(row) != width:
                raise RuntimeTypeError(
                    f"row {r} has {len(row)} values, schema has {width} columns"
                )
            for col, value in zip(self.schema.columns, row):
                if value is None:
                    if not col.type.nullable:
                        raise RuntimeTypeError(
                            f"row {r}: null in non-nullable column {col.name!r}"
                        )
                elif kind_of(value) != col.type.kind:
                    raise RuntimeTypeError(
                        f"row {r}, column {col.name!r}: expected {col.type.kind}, "
                        f"got {kind_of(value)}"
                    )

    def __len__(self) -> int:
        return len(self.rows)


def load_csv(source, schema: TableSchema) -> Relation:
    """Load a CSV file path or text stream against a schema.

    Header names must match the schema's columns case-insensitively and may
    appear in any order; cells parse per column type.
    """
    if hasattr(source, "read"):
        return _load(source, schema)
    # utf-8-sig: spreadsheet exports often lead with a BOM
    with open(source, newline="", encoding="utf-8-sig") as fh:
        return _load(fh, schema)


def _load(stream, schema: TableSchema) -> Relation:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise HeaderMismatchError("missing header row") from None

    folded = [h.strip().lower() for h in header]
    expected = {c.name.lower() for c in schema.columns}
    if len(set(folded)) != len(folded):
        raise HeaderMismatchError(f"duplicate header column in {header}")
    if set(folded) != expected:
        missing = sorted(expected - set(folded))
        extra = sorted(set(folded) - expected)
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if extra:
            parts.append(f"unexpected {extra}")
        raise HeaderMismatchError(f"header mismatch: {'; '.join(parts)}")

    # permutation: output column index -> csv field index
    positions = [folded.index(c.name.lower()) for c in schema.columns]

    rows = []
    for rownum, record in enumerate(reader, start=1):
        if not record:
            record = [""]  # a blank line is one empty field, null for width 1
        if len(record) != len(header):
            raise HeaderMismatchError(
                f"row {rownum} has {len(record)} fields, header has {len(header)}"
            )
        row = tuple(
            text_to_value(record[pos], col.type, rownum, col.name)
            for pos, col in zip(positions, schema.columns)
        )
        rows.append(row)
    return Relation(schema, tuple(rows))


def relation_to_csv(relation: Relation) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(relation.schema.column_names)
    for row in relation.rows:
        writer.writerow([value_to_text(v) for v in row])
    return out.getvalue()


def _normalize(relation: Relation) -> tuple[tuple[str, ...], list[tuple]]:
    """Columns sorted by (case-folded) name, rows reordered to match."""
    order = sorted(range(len(relation.schema.columns)),
                   key=lambda i: relation.schema.columns[i].name.lower())
    names = tuple(relation.schema.columns[i].name.lower() for i in order)
    rows = [tuple(row[i] for i in order) for row in relation.rows]
    return names, rows


def _row_key(row: tuple):
    return tuple(sort_key(v) for v in row)


def canonically_equal(a: Relation, b: Relation, ordered: bool = False,
                      tolerance: float = FLOAT_TOLERANCE) -> bool:
    """Result comparison used by the optimizer tests and the evaluator.

    Column order is normalized by name; unless `ordered`, rows compare as a
    multiset under the canonical total order (null < bool < numeric < text <
    date). Floats compare with an absolute tolerance.
    """
    names_a, rows_a = _normalize(a)
    names_b, rows_b = _normalize(b)
    if names_a != names_b or len(rows_a) != len(rows_b):
        return False
    if not ordered:
        rows_a = sorted(rows_a, key=_row_key)
        rows_b = sorted(rows_b, key=_row_key)
    return all(
        values_equal(x, y, tolerance)
        for ra, rb in zip(rows_a, rows_b)
        for x, y in zip(ra, rb)
    )
