"""Value model: the six cell kinds and their ordering/promotion rules.

Cells are plain Python values: None, bool, int, float, str, datetime.date.
bool must always be tested before int (bool subclasses int in Python).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from datetime import date

KINDS = ("bool", "int", "float", "text", "date")

NUMERIC_KINDS = frozenset({"int", "float"})
ORDERED_KINDS = frozenset({"int", "float", "text", "date"})

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")

# rank used by the canonical total order over values
_KIND_RANK = {"null": 0, "bool": 1, "int": 2, "float": 2, "text": 3, "date": 4}

FLOAT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ColumnType:
    kind: str
    nullable: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown column kind: {self.kind!r}")

    def __str__(self) -> str:
        return self.kind + ("?" if self.nullable else "")


def kind_of(value) -> str:
    """Kind name of a cell value; 'null' for None."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    if isinstance(value, str):
        return "text"
    if isinstance(value, date):
        return "date"
    raise TypeError(f"unsupported cell value: {value!r}")


def parse_date(text: str) -> date:
    """Strict YYYY-MM-DD; raises ValueError otherwise."""
    if not _DATE_RE.match(text):
        raise ValueError(f"not an ISO calendar date: {text!r}")
    return date.fromisoformat(text)


def is_date_literal(value) -> bool:
    if not isinstance(value, str):
        return False
    try:
        parse_date(value)
        return True
    except ValueError:
        return False


def promote(a: str, b: str) -> str | None:
    """Common kind of two compatible column kinds, or None."""
    if a == b:
        return a
    if a in NUMERIC_KINDS and b in NUMERIC_KINDS:
        return "float"
    return None


def sort_key(value):
    """Key realizing the canonical total order:
    null < bool < int/float (numeric order) < text (bytewise) < date.
    """
    if value is None:
        return (0,)
    k = kind_of(value)
    rank = _KIND_RANK[k]
    if k == "bool":
        return (rank, 1 if value else 0)
    if k in ("int", "float"):
        return (rank, float(value))
    if k == "text":
        return (rank, value)
    return (rank, value.toordinal())


def values_equal(a, b, tolerance: float = FLOAT_TOLERANCE) -> bool:
    """Equality under the canonical comparison: numerics compare cross-kind
    with an absolute tolerance, everything else exactly."""
    ka, kb = kind_of(a), kind_of(b)
    if ka == "null" or kb == "null":
        return ka == kb
    if ka == "bool" or kb == "bool":
        return ka == kb and a == b
    if ka in NUMERIC_KINDS and kb in NUMERIC_KINDS:
        return abs(float(a) - float(b)) <= tolerance
    if ka != kb:
        return False
    return a == b


def value_to_text(value) -> str:
    """Cell -> CSV text. None -> empty cell; bools lowercase; dates ISO."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def text_to_value(text: str, ctype: ColumnType, row: int, column: str):
    """CSV text -> cell per the column type. Empty cell is null."""
    from .errors import NullInNonNullableError, TypeParseError

    if text == "":
        if not ctype.nullable:
            raise NullInNonNullableError(row, column)
        return None
    kind = ctype.kind
    try:
        if kind == "bool":
            if text == "true":
                return True
            if text == "false":
                return False
            raise ValueError(text)
        if kind == "int":
            return int(text, 10)
        if kind == "float":
            value = float(text)
            if not math.isfinite(value):
                raise ValueError(text)  # cells are finite decimals
            return value
        if kind == "date":
            return parse_date(text)
        return text
    except ValueError:
        raise TypeParseError(row, column, text, kind) from None
