"""Canonical text form of RA expressions.

format_ra is the inverse of parse: parse(format_ra(e)) is structurally equal
to e for every well-formed tree. Predicates print with the fewest parentheses
that still reconstruct the exact tree shape under the left-associative
grammar.
"""

from __future__ import annotations

from . import ast

# precedence: or < and < not < atom
_PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = 1, 2, 3, 4


def format_literal(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _format_term(term: ast.Term) -> str:
    if isinstance(term, ast.ColumnRef):
        return term.name
    if isinstance(term, ast.Literal):
        return format_literal(term.value)
    return f"lower({_format_term(term.term)})"


def _pred_level(pred: ast.Predicate) -> int:
    if isinstance(pred, ast.Or):
        return _PREC_OR
    if isinstance(pred, ast.And):
        return _PREC_AND
    if isinstance(pred, ast.Not):
        return _PREC_NOT
    return _PREC_ATOM


def format_predicate(pred: ast.Predicate) -> str:
    if isinstance(pred, ast.Comparison):
        return f"{_format_term(pred.left)} {pred.op} {_format_term(pred.right)}"
    if isinstance(pred, ast.InList):
        items = ", ".join(format_literal(v) for v in pred.values)
        return f"{pred.column} in [{items}]"
    if isinstance(pred, ast.Contains):
        return f"contains({_format_term(pred.term)}, {format_literal(pred.needle)})"
    if isinstance(pred, ast.Not):
        child = format_predicate(pred.child)
        if _pred_level(pred.child) < _PREC_NOT:
            child = f"({child})"
        return f"not {child}"
    # And / Or: left-associative, so the left child may share this level but
    # the right child must be strictly tighter to survive a reparse.
    level = _pred_level(pred)
    op = "and" if isinstance(pred, ast.And) else "or"
    left = format_predicate(pred.left)
    if _pred_level(pred.left) < level:
        left = f"({left})"
    right = format_predicate(pred.right)
    if _pred_level(pred.right) <= level:
        right = f"({right})"
    return f"{left} {op} {right}"


def _format_aggregate(agg: ast.Aggregate) -> str:
    if agg.fn == "count_star":
        call = "count(*)"
    elif agg.fn == "count":
        call = f"count({agg.column})"
    else:
        call = f"{agg.fn}({agg.column})"
    return f"{call} as {agg.name}"


def format_ra(expr: ast.RaExpr) -> str:
    """Canonical grammar text for a well-formed expression."""
    if isinstance(expr, ast.Scan):
        return expr.table
    if isinstance(expr, ast.Select):
        return f"select[{format_predicate(expr.predicate)}]({format_ra(expr.child)})"
    if isinstance(expr, ast.Project):
        return f"project[{', '.join(expr.columns)}]({format_ra(expr.child)})"
    if isinstance(expr, ast.Rename):
        pairs = ", ".join(f"{old} -> {new}" for old, new in expr.pairs)
        return f"rename[{pairs}]({format_ra(expr.child)})"
    if isinstance(expr, ast.Union_):
        return f"union({format_ra(expr.left)}, {format_ra(expr.right)})"
    if isinstance(expr, ast.Minus):
        return f"minus({format_ra(expr.left)}, {format_ra(expr.right)})"
    if isinstance(expr, ast.Intersect):
        return f"intersect({format_ra(expr.left)}, {format_ra(expr.right)})"
    if isinstance(expr, ast.Times):
        return f"times({format_ra(expr.left)}, {format_ra(expr.right)})"
    if isinstance(expr, ast.Divide):
        return f"divide({format_ra(expr.left)}, {format_ra(expr.right)})"
    if isinstance(expr, ast.Join):
        return (f"join[{format_predicate(expr.predicate)}]"
                f"({format_ra(expr.left)}, {format_ra(expr.right)})")
    if isinstance(expr, ast.GroupBy):
        keys = ", ".join(expr.keys)
        aggs = ", ".join(_format_aggregate(a) for a in expr.aggregates)
        return f"groupby[{keys}; {aggs}]({format_ra(expr.child)})"
    if isinstance(expr, ast.Distinct):
        return f"distinct({format_ra(expr.child)})"
    if isinstance(expr, ast.Sort):
        keys = ", ".join(
            f"{k.column} desc" if k.descending else k.column for k in expr.keys
        )
        return f"sort[{keys}]({format_ra(expr.child)})"
    if isinstance(expr, ast.Limit):
        return f"limit[{expr.count}]({format_ra(expr.child)})"
    raise TypeError(f"not an RA expression: {expr!r}")
