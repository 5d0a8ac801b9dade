"""Plan compilation and execution.

compile_plan turns a type-checked expression into a tree of physical
operators with resolved column indices; execute evaluates it over in-memory
relations. All validation is static: by the time a plan runs, unknown names
and type clashes are impossible, so execution is straight-line row pushing.

Semantics:
  - bag semantics for scan/select/project/rename/join/times/sort/limit;
  - set semantics (no duplicate output rows) for union/minus/intersect/divide
    and distinct;
  - any comparison with null is false; count(col) counts non-null values;
    sum/avg/min/max skip nulls and yield null for an all-null group;
  - groupby with no keys over empty input yields one row (0 for counts,
    null for the rest); with keys it yields no rows;
  - divide with an empty divisor returns the dividend projected onto the
    non-divisor columns, deduplicated (the quantifier is vacuously true);
  - sort is stable; joins emit left-major, right-minor order.

Each node carries a rows_in counter (rows that entered it during the last
execution). Counters are reset at the start of execute, so a single Plan
instance should not be executed concurrently; compile one plan per task.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass

from . import ast
from .errors import RuntimeTypeError, UnknownTableError
from .infer import infer_schema
from .relation import Relation
from .schema import Catalog, TableSchema
from .values import parse_date

_OPS = {
    "==": operator.eq, "!=": operator.ne,
    "<": operator.lt, "<=": operator.le,
    ">": operator.gt, ">=": operator.ge,
}


# --- predicate compilation ---

def _const(value):
    return lambda row: value


def _compile_term(term: ast.Term, schema: TableSchema):
    """Returns (row -> value, kind)."""
    if isinstance(term, ast.ColumnRef):
        idx = schema.index_of(term.name)
        kind = schema.columns[idx].type.kind
        return (lambda row: row[idx]), kind
    if isinstance(term, ast.Literal):
        from .values import kind_of
        return _const(term.value), kind_of(term.value)
    inner, _ = _compile_term(term.term, schema)

    def lowered(row):
        v = inner(row)
        return None if v is None else v.lower()

    return lowered, "text"


def _numeric(fn):
    def wrapped(row):
        v = fn(row)
        return None if v is None else float(v)
    return wrapped


def compile_predicate(pred: ast.Predicate, schema: TableSchema):
    """Predicate -> (row -> bool). Assumes check_predicate already passed."""
    if isinstance(pred, ast.Comparison):
        lf, lk = _compile_term(pred.left, schema)
        rf, rk = _compile_term(pred.right, schema)
        # the single allowed coercion: text literal against a date operand
        if lk == "date" and rk == "text":
            rf, rk = _const(parse_date(pred.right.value)), "date"
        elif rk == "date" and lk == "text":
            lf, lk = _const(parse_date(pred.left.value)), "date"
        if {lk, rk} == {"int", "float"}:
            lf, rf = _numeric(lf), _numeric(rf)
        op = _OPS[pred.op]

        def compare(row):
            a = lf(row)
            if a is None:
                return False
            b = rf(row)
            if b is None:
                return False
            return op(a, b)

        return compare

    if isinstance(pred, ast.InList):
        idx = schema.index_of(pred.column)
        kind = schema.columns[idx].type.kind
        members = set()
        for v in pred.values:
            if v is None:
                continue  # null never matches
            if kind == "date":
                members.add(parse_date(v))
            elif kind in ("int", "float"):
                members.add(float(v))
            else:
                members.add(v)
        if kind in ("int", "float"):
            return lambda row: row[idx] is not None and float(row[idx]) in members
        return lambda row: row[idx] is not None and row[idx] in members

    if isinstance(pred, ast.Contains):
        fn, _ = _compile_term(pred.term, schema)
        needle = pred.needle
        return lambda row: (v := fn(row)) is not None and needle in v

    if isinstance(pred, ast.Not):
        inner = compile_predicate(pred.child, schema)
        return lambda row: not inner(row)

    if isinstance(pred, ast.And):
        left = compile_predicate(pred.left, schema)
        right = compile_predicate(pred.right, schema)
        return lambda row: left(row) and right(row)

    left = compile_predicate(pred.left, schema)
    right = compile_predicate(pred.right, schema)
    return lambda row: left(row) or right(row)


# --- physical nodes ---

class Node:
    schema: TableSchema

    def __init__(self, schema: TableSchema, children: tuple["Node", ...]):
        self.schema = schema
        self.children = children
        self.rows_in = 0

    def reset(self):
        self.rows_in = 0
        for child in self.children:
            child.reset()

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def rows(self, db: dict[str, Relation]) -> list[tuple]:
        raise NotImplementedError


class ScanNode(Node):
    def __init__(self, schema: TableSchema, table: str):
        super().__init__(schema, ())
        self.table = table

    def rows(self, db):
        relation = db.get(self.table)
        if relation is None:
            raise UnknownTableError(self.table)
        if relation.schema.column_names != self.schema.column_names:
            raise RuntimeTypeError(
                f"table {self.table!r} does not match its cataloged schema"
            )
        out = list(relation.rows)
        self.rows_in += len(out)
        return out


class SelectNode(Node):
    def __init__(self, schema, child, predicate):
        super().__init__(schema, (child,))
        self.predicate = predicate

    def rows(self, db):
        incoming = self.children[0].rows(db)
        self.rows_in += len(incoming)
        pred = self.predicate
        return [row for row in incoming if pred(row)]


class ProjectNode(Node):
    def __init__(self, schema, child, indices):
        super().__init__(schema, (child,))
        self.indices = indices

    def rows(self, db):
        incoming = self.children[0].rows(db)
        self.rows_in += len(incoming)
        idx = self.indices
        return [tuple(row[i] for i in idx) for row in incoming]


class RenameNode(Node):
    def __init__(self, schema, child):
        super().__init__(schema, (child,))

    def rows(self, db):
        incoming = self.children[0].rows(db)
        self.rows_in += len(incoming)
        return incoming


def _dedupe(rows):
    return list(dict.fromkeys(rows))


def _coercers(out_schema: TableSchema, child: TableSchema):
    """Per-column adapters onto the promoted union kinds (int -> float)."""
    fns = []
    for out, col in zip(out_schema.columns, child.columns):
        if out.type.kind == "float" and col.type.kind == "int":
            fns.append(lambda v: None if v is None else float(v))
        else:
            fns.append(None)
    if all(fn is None for fn in fns):
        return None
    return fns


def _apply_coercers(rows, fns):
    if fns is None:
        return rows
    return [
        tuple(v if fn is None else fn(v) for fn, v in zip(fns, row))
        for row in rows
    ]


class SetOpNode(Node):
    def __init__(self, schema, left, right, op):
        super().__init__(schema, (left, right))
        self.op = op
        self.coerce_left = _coercers(schema, left.schema)
        self.coerce_right = _coercers(schema, right.schema)

    def rows(self, db):
        left = self.children[0].rows(db)
        right = self.children[1].rows(db)
        self.rows_in += len(left) + len(right)
        left = _apply_coercers(left, self.coerce_left)
        right = _apply_coercers(right, self.coerce_right)
        if self.op == "union":
            return _dedupe(left + right)
        rset = set(right)
        if self.op == "minus":
            return [row for row in _dedupe(left) if row not in rset]
        return [row for row in _dedupe(left) if row in rset]


class TimesNode(Node):
    def __init__(self, schema, left, right):
        super().__init__(schema, (left, right))

    def rows(self, db):
        left = self.children[0].rows(db)
        right = self.children[1].rows(db)
        self.rows_in += len(left) + len(right)
        return [lr + rr for lr in left for rr in right]


class JoinNode(Node):
    """Hash join on equality conjuncts when present, else nested loop.

    Output order is left-major, right-minor either way, so a stable sort
    above the join is deterministic regardless of strategy.
    """

    def __init__(self, schema, left, right, eq_pairs, residual):
        super().__init__(schema, (left, right))
        self.eq_pairs = eq_pairs      # [(left idx, right idx, as_float)]
        self.residual = residual      # row -> bool over the combined row, or None

    def rows(self, db):
        left = self.children[0].rows(db)
        right = self.children[1].rows(db)
        self.rows_in += len(left) + len(right)
        residual = self.residual

        if not self.eq_pairs:
            combined = [lr + rr for lr in left for rr in right]
            if residual is None:
                return combined
            return [row for row in combined if residual(row)]

        def key(row, idxs):
            parts = []
            for i, as_float in idxs:
                v = row[i]
                if v is None:
                    return None  # null keys never join
                parts.append(float(v) if as_float else v)
            return tuple(parts)

        lidx = [(li, fl) for li, _, fl in self.eq_pairs]
        ridx = [(ri, fl) for _, ri, fl in self.eq_pairs]
        table: dict = {}
        for rr in right:
            k = key(rr, ridx)
            if k is not None:
                table.setdefault(k, []).append(rr)
        out = []
        for lr in left:
            k = key(lr, lidx)
            if k is None:
                continue
            for rr in table.get(k, ()):
                row = lr + rr
                if residual is None or residual(row):
                    out.append(row)
        return out


class DivideNode(Node):
    def __init__(self, schema, left, right, keep_idx, div_idx, div_coerce, r_coerce):
        super().__init__(schema, (left, right))
        self.keep_idx = keep_idx
        self.div_idx = div_idx          # dividend indices aligned to divisor columns
        self.div_coerce = div_coerce    # per divisor column: coerce dividend cell
        self.r_coerce = r_coerce        # per divisor column: coerce divisor cell

    def rows(self, db):
        left = self.children[0].rows(db)
        right = self.children[1].rows(db)
        self.rows_in += len(left) + len(right)

        def adapt(values, fns):
            return tuple(v if fn is None else fn(v) for fn, v in zip(fns, values))

        divisors = _dedupe([adapt(row, self.r_coerce) for row in right])
        pairs = set()
        keeps = []
        for row in left:
            keep = tuple(row[i] for i in self.keep_idx)
            div = adapt(tuple(row[i] for i in self.div_idx), self.div_coerce)
            pairs.add((keep, div))
            keeps.append(keep)
        return [k for k in _dedupe(keeps)
                if all((k, d) in pairs for d in divisors)]


class GroupByNode(Node):
    def __init__(self, schema, child, key_idx, aggs):
        super().__init__(schema, (child,))
        self.key_idx = key_idx
        self.aggs = aggs  # [(fn name, input idx or None)]

    @staticmethod
    def _aggregate(fn, idx, rows):
        if fn == "count_star":
            return len(rows)
        values = [row[idx] for row in rows if row[idx] is not None]
        if fn == "count":
            return len(values)
        if not values:
            return None
        if fn == "sum":
            return sum(values)
        if fn == "avg":
            return sum(values) / len(values)
        if fn == "min":
            return min(values)
        return max(values)

    def rows(self, db):
        incoming = self.children[0].rows(db)
        self.rows_in += len(incoming)
        if not self.key_idx:
            if not incoming:
                return [tuple(0 if fn in ("count_star", "count") else None
                              for fn, _ in self.aggs)]
            return [tuple(self._aggregate(fn, idx, incoming)
                          for fn, idx in self.aggs)]
        groups: dict[tuple, list] = {}
        for row in incoming:
            groups.setdefault(tuple(row[i] for i in self.key_idx), []).append(row)
        return [
            key + tuple(self._aggregate(fn, idx, rows) for fn, idx in self.aggs)
            for key, rows in groups.items()
        ]


class DistinctNode(Node):
    def __init__(self, schema, child):
        super().__init__(schema, (child,))

    def rows(self, db):
        incoming = self.children[0].rows(db)
        self.rows_in += len(incoming)
        return _dedupe(incoming)


class SortNode(Node):
    def __init__(self, schema, child, keys):
        super().__init__(schema, (child,))
        self.keys = keys  # [(column idx, descending)]

    def rows(self, db):
        rows = self.children[0].rows(db)
        self.rows_in += len(rows)
        # successive stable passes, last key first; nulls sort smallest
        for idx, descending in reversed(self.keys):
            rows = sorted(rows,
                          key=lambda r: (r[idx] is not None, r[idx]),
                          reverse=descending)
        return rows


class LimitNode(Node):
    def __init__(self, schema, child, count):
        super().__init__(schema, (child,))
        self.count = count

    def rows(self, db):
        incoming = self.children[0].rows(db)
        self.rows_in += len(incoming)
        return incoming[: self.count]


@dataclass
class Plan:
    root: Node
    schema: TableSchema

    def nodes(self):
        return self.root.walk()

    def rows_into_products(self) -> int:
        """Total rows that entered Times/Join nodes in the last execution."""
        return sum(n.rows_in for n in self.nodes()
                   if isinstance(n, (TimesNode, JoinNode)))


# --- compilation ---

def _split_conjuncts(pred: ast.Predicate) -> list[ast.Predicate]:
    if isinstance(pred, ast.And):
        return _split_conjuncts(pred.left) + _split_conjuncts(pred.right)
    return [pred]


def _rebuild_and(conjuncts: list[ast.Predicate]) -> ast.Predicate:
    pred = conjuncts[0]
    for c in conjuncts[1:]:
        pred = ast.And(pred, c)
    return pred


def _build(expr: ast.RaExpr, catalog: Catalog) -> Node:
    schema = infer_schema(expr, catalog)

    if isinstance(expr, ast.Scan):
        return ScanNode(schema, schema.name)

    if isinstance(expr, ast.Select):
        child = _build(expr.child, catalog)
        return SelectNode(schema, child,
                          compile_predicate(expr.predicate, child.schema))

    if isinstance(expr, ast.Project):
        child = _build(expr.child, catalog)
        indices = tuple(child.schema.index_of(c) for c in expr.columns)
        return ProjectNode(schema, child, indices)

    if isinstance(expr, ast.Rename):
        return RenameNode(schema, _build(expr.child, catalog))

    if isinstance(expr, (ast.Union_, ast.Minus, ast.Intersect)):
        op = {ast.Union_: "union", ast.Minus: "minus",
              ast.Intersect: "intersect"}[type(expr)]
        return SetOpNode(schema, _build(expr.left, catalog),
                         _build(expr.right, catalog), op)

    if isinstance(expr, ast.Times):
        return TimesNode(schema, _build(expr.left, catalog),
                         _build(expr.right, catalog))

    if isinstance(expr, ast.Join):
        left = _build(expr.left, catalog)
        right = _build(expr.right, catalog)
        eq_pairs = []
        residual: list[ast.Predicate] = []
        for conjunct in _split_conjuncts(expr.predicate):
            pair = _equi_pair(conjunct, left.schema, right.schema)
            if pair is not None:
                eq_pairs.append(pair)
            else:
                residual.append(conjunct)
        residual_fn = (compile_predicate(_rebuild_and(residual), schema)
                       if residual else None)
        return JoinNode(schema, left, right, eq_pairs, residual_fn)

    if isinstance(expr, ast.Divide):
        left = _build(expr.left, catalog)
        right = _build(expr.right, catalog)
        divisor_names = {c.name.lower() for c in right.schema.columns}
        keep_idx = tuple(i for i, c in enumerate(left.schema.columns)
                         if c.name.lower() not in divisor_names)
        div_idx = tuple(left.schema.index_of(c.name)
                        for c in right.schema.columns)
        div_coerce, r_coerce = [], []
        for rc in right.schema.columns:
            lk = left.schema.find(rc.name).type.kind
            rk = rc.type.kind
            promote_left = lk == "int" and rk == "float"
            promote_right = rk == "int" and lk == "float"
            div_coerce.append(
                (lambda v: None if v is None else float(v)) if promote_left else None
            )
            r_coerce.append(
                (lambda v: None if v is None else float(v)) if promote_right else None
            )
        return DivideNode(schema, left, right, keep_idx, div_idx,
                          tuple(div_coerce), tuple(r_coerce))

    if isinstance(expr, ast.GroupBy):
        child = _build(expr.child, catalog)
        key_idx = tuple(child.schema.index_of(k) for k in expr.keys)
        aggs = tuple(
            (a.fn, None if a.column is None else child.schema.index_of(a.column))
            for a in expr.aggregates
        )
        return GroupByNode(schema, child, key_idx, aggs)

    if isinstance(expr, ast.Distinct):
        return DistinctNode(schema, _build(expr.child, catalog))

    if isinstance(expr, ast.Sort):
        child = _build(expr.child, catalog)
        keys = tuple((child.schema.index_of(k.column), k.descending)
                     for k in expr.keys)
        return SortNode(schema, child, keys)

    if isinstance(expr, ast.Limit):
        return LimitNode(schema, _build(expr.child, catalog), expr.count)

    raise TypeError(f"not an RA expression: {expr!r}")


def _equi_pair(pred: ast.Predicate, left: TableSchema, right: TableSchema):
    """(left idx, right idx, as_float) for `a == b` across the two sides."""
    if not (isinstance(pred, ast.Comparison) and pred.op == "=="
            and isinstance(pred.left, ast.ColumnRef)
            and isinstance(pred.right, ast.ColumnRef)):
        return None
    a, b = pred.left.name, pred.right.name
    if left.has(a) and right.has(b):
        li, ri = left.index_of(a), right.index_of(b)
    elif left.has(b) and right.has(a):
        li, ri = left.index_of(b), right.index_of(a)
    else:
        return None
    as_float = {left.columns[li].type.kind,
                right.columns[ri].type.kind} == {"int", "float"}
    return li, ri, as_float


def compile_plan(expr: ast.RaExpr, catalog: Catalog) -> Plan:
    """Single-pass compilation of a type-checked expression."""
    infer_schema(expr, catalog)  # fail fast with the static taxonomy
    root = _build(expr, catalog)
    return Plan(root, root.schema)


def execute(plan: Plan, database: dict[str, Relation]) -> Relation:
    """Evaluate a plan over a database (table name -> Relation).

    Deterministic; populates the per-node rows_in counters."""
    plan.root.reset()
    rows = plan.root.rows(database)
    return Relation(plan.schema, tuple(rows))
