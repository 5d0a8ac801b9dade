"""Relational-algebra abstract syntax.

Expression nodes, predicate trees and aggregate specs. All nodes are frozen
dataclasses compared structurally, which is what the parser/printer round-trip
property checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# --- predicate terms ---

@dataclass(frozen=True)
class ColumnRef:
    name: str


@dataclass(frozen=True)
class Literal:
    # None | bool | int | float | str -- the kinds the grammar can spell
    value: object


@dataclass(frozen=True)
class Lower:
    term: "Term"


Term = Union[ColumnRef, Literal, Lower]


# --- predicates ---

COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Comparison:
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class InList:
    column: str
    values: tuple[object, ...]


@dataclass(frozen=True)
class Contains:
    term: Term
    needle: str


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Not:
    child: "Predicate"


Predicate = Union[Comparison, InList, Contains, And, Or, Not]


# --- aggregates and sort keys ---

AGG_FNS = ("count_star", "count", "sum", "avg", "min", "max")


@dataclass(frozen=True)
class Aggregate:
    fn: str
    column: str | None  # None only for count_star
    name: str           # explicit output column name


@dataclass(frozen=True)
class SortKey:
    column: str
    descending: bool = False


# --- expression nodes ---

@dataclass(frozen=True)
class Scan:
    table: str


@dataclass(frozen=True)
class Select:
    predicate: Predicate
    child: "RaExpr"


@dataclass(frozen=True)
class Project:
    columns: tuple[str, ...]
    child: "RaExpr"


@dataclass(frozen=True)
class Rename:
    pairs: tuple[tuple[str, str], ...]  # (old, new)
    child: "RaExpr"


@dataclass(frozen=True)
class Union_:
    left: "RaExpr"
    right: "RaExpr"


@dataclass(frozen=True)
class Minus:
    left: "RaExpr"
    right: "RaExpr"


@dataclass(frozen=True)
class Intersect:
    left: "RaExpr"
    right: "RaExpr"


@dataclass(frozen=True)
class Times:
    left: "RaExpr"
    right: "RaExpr"


@dataclass(frozen=True)
class Divide:
    left: "RaExpr"
    right: "RaExpr"


@dataclass(frozen=True)
class Join:
    predicate: Predicate
    left: "RaExpr"
    right: "RaExpr"


@dataclass(frozen=True)
class GroupBy:
    keys: tuple[str, ...]
    aggregates: tuple[Aggregate, ...]
    child: "RaExpr"


@dataclass(frozen=True)
class Distinct:
    child: "RaExpr"


@dataclass(frozen=True)
class Sort:
    keys: tuple[SortKey, ...]
    child: "RaExpr"


@dataclass(frozen=True)
class Limit:
    count: int
    child: "RaExpr"


RaExpr = Union[
    Scan, Select, Project, Rename,
    Union_, Minus, Intersect, Times, Divide, Join,
    GroupBy, Distinct, Sort, Limit,
]

BINARY_NODES = (Union_, Minus, Intersect, Times, Divide, Join)
UNARY_NODES = (Select, Project, Rename, GroupBy, Distinct, Sort, Limit)


def children(expr: RaExpr) -> tuple[RaExpr, ...]:
    if isinstance(expr, Scan):
        return ()
    if isinstance(expr, BINARY_NODES):
        return (expr.left, expr.right)
    return (expr.child,)


def walk(expr: RaExpr):
    """Pre-order traversal."""
    yield expr
    for child in children(expr):
        yield from walk(child)


def term_columns(term: Term) -> set[str]:
    if isinstance(term, ColumnRef):
        return {term.name}
    if isinstance(term, Lower):
        return term_columns(term.term)
    return set()


def predicate_columns(pred: Predicate) -> set[str]:
    """All column names referenced by a predicate."""
    if isinstance(pred, Comparison):
        return term_columns(pred.left) | term_columns(pred.right)
    if isinstance(pred, InList):
        return {pred.column}
    if isinstance(pred, Contains):
        return term_columns(pred.term)
    if isinstance(pred, Not):
        return predicate_columns(pred.child)
    return predicate_columns(pred.left) | predicate_columns(pred.right)


def map_term_columns(term: Term, rename) -> Term:
    if isinstance(term, ColumnRef):
        return ColumnRef(rename(term.name))
    if isinstance(term, Lower):
        return Lower(map_term_columns(term.term, rename))
    return term


def map_predicate_columns(pred: Predicate, rename) -> Predicate:
    """Rebuild a predicate with every column reference passed through `rename`."""
    if isinstance(pred, Comparison):
        return Comparison(pred.op,
                          map_term_columns(pred.left, rename),
                          map_term_columns(pred.right, rename))
    if isinstance(pred, InList):
        return InList(rename(pred.column), pred.values)
    if isinstance(pred, Contains):
        return Contains(map_term_columns(pred.term, rename), pred.needle)
    if isinstance(pred, Not):
        return Not(map_predicate_columns(pred.child, rename))
    if isinstance(pred, And):
        return And(map_predicate_columns(pred.left, rename),
                   map_predicate_columns(pred.right, rename))
    return Or(map_predicate_columns(pred.left, rename),
              map_predicate_columns(pred.right, rename))
