"""Static analysis: output-schema inference and predicate type checking.

Runs before any row is touched. Fails rather than guesses: every unknown
name, type clash, union incompatibility or name collision is an error here,
so execution over a consistent database cannot hit a type fault.

Derived expressions produce a schema named "result"; only Scan yields the
catalog schema verbatim. Column descriptions/synonyms ride along through
operators that preserve the column, which lets fuzzy resolution work against
derived schemas too.
"""

from __future__ import annotations

from . import ast
from .errors import (
    DuplicateOutputColumnError,
    InvalidDivisionError,
    NotUnionCompatibleError,
    TypeMismatchError,
)
from .schema import Catalog, Column, TableSchema
from .values import (
    NUMERIC_KINDS,
    ORDERED_KINDS,
    ColumnType,
    is_date_literal,
    kind_of,
    promote,
)

RESULT_NAME = "result"


def term_kind(term: ast.Term, schema: TableSchema) -> str:
    """Kind of a predicate term against a schema; validates as it goes."""
    if isinstance(term, ast.ColumnRef):
        return schema.find(term.name).type.kind
    if isinstance(term, ast.Literal):
        return kind_of(term.value)
    # Lower
    inner = term_kind(term.term, schema)
    if inner != "text":
        raise TypeMismatchError(f"lower() requires a text operand, got {inner}")
    return "text"


def _comparable(left: ast.Term, lk: str, right: ast.Term, rk: str,
                ordered: bool) -> bool:
    """Compatibility of a comparison's operand kinds, including the one
    coercion we allow: a text literal spelling YYYY-MM-DD against a date."""
    if lk == "null" or rk == "null":
        return True
    if lk == "date" and rk == "text":
        return isinstance(right, ast.Literal) and is_date_literal(right.value)
    if rk == "date" and lk == "text":
        return isinstance(left, ast.Literal) and is_date_literal(left.value)
    if lk != rk and not (lk in NUMERIC_KINDS and rk in NUMERIC_KINDS):
        return False
    if ordered:
        return lk in ORDERED_KINDS
    return True


def check_predicate(pred: ast.Predicate, schema: TableSchema) -> None:
    """Raises UnknownColumn/TypeMismatch if the predicate cannot be typed."""
    if isinstance(pred, ast.Comparison):
        lk = term_kind(pred.left, schema)
        rk = term_kind(pred.right, schema)
        ordered = pred.op not in ("==", "!=")
        if not _comparable(pred.left, lk, pred.right, rk, ordered):
            raise TypeMismatchError(
                f"cannot compare {lk} {pred.op} {rk}"
            )
    elif isinstance(pred, ast.InList):
        ck = schema.find(pred.column).type.kind
        for v in pred.values:
            vk = kind_of(v)
            if vk == "null":
                continue
            if ck == "date":
                if not is_date_literal(v):
                    raise TypeMismatchError(
                        f"membership list for date column {pred.column!r} "
                        f"holds a non-date {vk}"
                    )
                continue
            if promote(ck, vk) is None:
                raise TypeMismatchError(
                    f"membership list for {ck} column {pred.column!r} holds a {vk}"
                )
    elif isinstance(pred, ast.Contains):
        tk = term_kind(pred.term, schema)
        if tk != "text":
            raise TypeMismatchError(f"contains() requires a text operand, got {tk}")
    elif isinstance(pred, ast.Not):
        check_predicate(pred.child, schema)
    else:  # And / Or
        check_predicate(pred.left, schema)
        check_predicate(pred.right, schema)


def _unique_output(columns: list[Column], context: str) -> tuple[Column, ...]:
    seen: set[str] = set()
    for col in columns:
        folded = col.name.lower()
        if folded in seen:
            raise DuplicateOutputColumnError(col.name, context)
        seen.add(folded)
    return tuple(columns)


def _union_schema(op: str, left: TableSchema, right: TableSchema) -> TableSchema:
    if len(left.columns) != len(right.columns):
        raise NotUnionCompatibleError(
            f"{op}: column counts differ ({len(left.columns)} vs {len(right.columns)})"
        )
    out = []
    for lc, rc in zip(left.columns, right.columns):
        kind = promote(lc.type.kind, rc.type.kind)
        if kind is None:
            raise NotUnionCompatibleError(
                f"{op}: column {lc.name!r} is {lc.type.kind}, "
                f"paired with {rc.type.kind}"
            )
        out.append(Column(
            lc.name,
            ColumnType(kind, lc.type.nullable or rc.type.nullable),
            lc.description,
            lc.synonyms,
        ))
    return TableSchema(RESULT_NAME, tuple(out))


def _aggregate_column(agg: ast.Aggregate, schema: TableSchema) -> Column:
    if agg.fn not in ast.AGG_FNS:
        raise TypeMismatchError(f"unknown aggregate function {agg.fn!r}")
    if agg.fn == "count_star":
        return Column(agg.name, ColumnType("int"))
    assert agg.column is not None
    col = schema.find(agg.column)
    kind = col.type.kind
    if agg.fn == "count":
        return Column(agg.name, ColumnType("int"))
    if agg.fn in ("sum", "avg"):
        if kind not in NUMERIC_KINDS:
            raise TypeMismatchError(f"{agg.fn}({agg.column}) requires numeric input, got {kind}")
        out_kind = "float" if agg.fn == "avg" else kind
        return Column(agg.name, ColumnType(out_kind, nullable=True))
    # min / max need a total order
    if kind not in ORDERED_KINDS:
        raise TypeMismatchError(f"{agg.fn}({agg.column}) requires an ordered type, got {kind}")
    return Column(agg.name, ColumnType(kind, nullable=True))


def infer_schema(expr: ast.RaExpr, catalog: Catalog) -> TableSchema:
    """Output schema of an expression against a catalog.

    Deterministic and total over well-formed expressions; raises one of the
    static errors otherwise. Never returns duplicate column names.
    """
    if isinstance(expr, ast.Scan):
        return catalog.find(expr.table)

    if isinstance(expr, ast.Select):
        child = infer_schema(expr.child, catalog)
        check_predicate(expr.predicate, child)
        return TableSchema(RESULT_NAME, child.columns)

    if isinstance(expr, ast.Project):
        child = infer_schema(expr.child, catalog)
        cols = [child.find(name) for name in expr.columns]
        return TableSchema(RESULT_NAME, _unique_output(cols, "projection"))

    if isinstance(expr, ast.Rename):
        child = infer_schema(expr.child, catalog)
        mapping: dict[str, str] = {}
        for old, new in expr.pairs:
            canonical = child.find(old).name
            if canonical in mapping:
                raise DuplicateOutputColumnError(old, "rename source")
            mapping[canonical] = new
        # a renamed column sheds its synonyms: the new name is a new identity
        out = [
            Column(mapping[c.name], c.type, c.description)
            if c.name in mapping
            else c
            for c in child.columns
        ]
        return TableSchema(RESULT_NAME, _unique_output(out, "rename"))

    if isinstance(expr, (ast.Union_, ast.Minus, ast.Intersect)):
        op = type(expr).__name__.rstrip("_").lower()
        return _union_schema(op, infer_schema(expr.left, catalog),
                             infer_schema(expr.right, catalog))

    if isinstance(expr, (ast.Times, ast.Join)):
        left = infer_schema(expr.left, catalog)
        right = infer_schema(expr.right, catalog)
        combined = TableSchema(
            RESULT_NAME,
            _unique_output(list(left.columns) + list(right.columns), "product"),
        )
        if isinstance(expr, ast.Join):
            check_predicate(expr.predicate, combined)
        return combined

    if isinstance(expr, ast.Divide):
        left = infer_schema(expr.left, catalog)
        right = infer_schema(expr.right, catalog)
        if len(right.columns) >= len(left.columns):
            raise InvalidDivisionError(
                "divisor columns must be a strict subset of the dividend's"
            )
        left_names = {c.name.lower() for c in left.columns}
        for rc in right.columns:
            if rc.name.lower() not in left_names:
                raise InvalidDivisionError(
                    f"divisor column {rc.name!r} not present in the dividend"
                )
            lc = left.find(rc.name)
            if promote(lc.type.kind, rc.type.kind) is None:
                raise InvalidDivisionError(
                    f"divisor column {rc.name!r} is {rc.type.kind}, "
                    f"dividend has {lc.type.kind}"
                )
        divisor_names = {c.name.lower() for c in right.columns}
        keep = [c for c in left.columns if c.name.lower() not in divisor_names]
        return TableSchema(RESULT_NAME, tuple(keep))

    if isinstance(expr, ast.GroupBy):
        child = infer_schema(expr.child, catalog)
        out = [child.find(k) for k in expr.keys]
        for agg in expr.aggregates:
            out.append(_aggregate_column(agg, child))
        if not expr.aggregates:
            raise TypeMismatchError("groupby requires at least one aggregate")
        return TableSchema(RESULT_NAME, _unique_output(out, "groupby output"))

    if isinstance(expr, ast.Distinct):
        child = infer_schema(expr.child, catalog)
        return TableSchema(RESULT_NAME, child.columns)

    if isinstance(expr, ast.Sort):
        child = infer_schema(expr.child, catalog)
        for key in expr.keys:
            child.find(key.column)
        return TableSchema(RESULT_NAME, child.columns)

    if isinstance(expr, ast.Limit):
        if expr.count < 0:
            raise TypeMismatchError("limit count must be non-negative")
        child = infer_schema(expr.child, catalog)
        return TableSchema(RESULT_NAME, child.columns)

    raise TypeError(f"not an RA expression: {expr!r}")
