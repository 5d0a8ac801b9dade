"""Heuristic rewriter that moves data-reduction work early in the plan.

Rules, applied to a fixed point under a 10,000-step budget:

  1. split conjunctive selections;
  2. push selections below times/join/union/minus/intersect/distinct/sort
     where column references permit;
  3. fuse a selection over a cartesian product into a join when the predicate
     spans both sides;
  4. prune projection columns downward, inserting narrowing projections
     directly above scans;
  5. collapse adjacent projections;
  6. collapse distinct over distinct.

No cost model: rewrites are unconditional. Every rewrite preserves the output
schema and the evaluation result on every database instance.
"""

from __future__ import annotations

from . import ast
from .infer import infer_schema
from .schema import Catalog

BUDGET = 10_000


class _Budget:
    def __init__(self, steps: int):
        self.steps = steps

    def spend(self) -> bool:
        if self.steps <= 0:
            return False
        self.steps -= 1
        return True


def _folded_names(expr: ast.RaExpr, catalog: Catalog) -> set[str]:
    return {c.name.lower() for c in infer_schema(expr, catalog).columns}


def _fold(names) -> set[str]:
    return {n.lower() for n in names}


def _rewrite_select(expr: ast.Select, catalog: Catalog, budget: _Budget):
    """One applicable select rule at this node, or None."""
    pred, child = expr.predicate, expr.child

    # rule 1: split conjunctions
    if isinstance(pred, ast.And):
        if not budget.spend():
            return None
        conjuncts = []
        stack = [pred]
        while stack:
            p = stack.pop()
            if isinstance(p, ast.And):
                stack.extend((p.right, p.left))
            else:
                conjuncts.append(p)
        inner = child
        for c in reversed(conjuncts):
            inner = ast.Select(c, inner)
        return inner

    refs = _fold(ast.predicate_columns(pred))

    if isinstance(child, (ast.Times, ast.Join)):
        left_cols = _folded_names(child.left, catalog)
        right_cols = _folded_names(child.right, catalog)
        if refs and refs <= left_cols:
            if not budget.spend():
                return None
            pushed = ast.Select(pred, child.left)
            if isinstance(child, ast.Times):
                return ast.Times(pushed, child.right)
            return ast.Join(child.predicate, pushed, child.right)
        if refs and refs <= right_cols:
            if not budget.spend():
                return None
            pushed = ast.Select(pred, child.right)
            if isinstance(child, ast.Times):
                return ast.Times(child.left, pushed)
            return ast.Join(child.predicate, child.left, pushed)
        # rule 3: predicate spans both sides of a product
        if (isinstance(child, ast.Times)
                and refs & left_cols and refs & right_cols):
            if not budget.spend():
                return None
            return ast.Join(pred, child.left, child.right)
        return None

    if isinstance(child, ast.Union_):
        if not budget.spend():
            return None
        lschema = infer_schema(child.left, catalog)
        rschema = infer_schema(child.right, catalog)
        mapping = {lc.name.lower(): rc.name
                   for lc, rc in zip(lschema.columns, rschema.columns)}
        remapped = ast.map_predicate_columns(
            pred, lambda n: mapping.get(n.lower(), n)
        )
        return ast.Union_(ast.Select(pred, child.left),
                          ast.Select(remapped, child.right))

    if isinstance(child, (ast.Minus, ast.Intersect)):
        # σp(A − B) = σp(A) − B, and likewise for intersection
        if not budget.spend():
            return None
        return type(child)(ast.Select(pred, child.left), child.right)

    if isinstance(child, ast.Distinct):
        if not budget.spend():
            return None
        return ast.Distinct(ast.Select(pred, child.child))

    if isinstance(child, ast.Sort):
        if not budget.spend():
            return None
        return ast.Sort(child.keys, ast.Select(pred, child.child))

    return None


def _rewrite_node(expr: ast.RaExpr, catalog: Catalog, budget: _Budget):
    if isinstance(expr, ast.Select):
        return _rewrite_select(expr, catalog, budget)
    # rule 5: adjacent projections
    if isinstance(expr, ast.Project) and isinstance(expr.child, ast.Project):
        if not budget.spend():
            return None
        return ast.Project(expr.columns, expr.child.child)
    # rule 6: nested distinct
    if isinstance(expr, ast.Distinct) and isinstance(expr.child, ast.Distinct):
        if not budget.spend():
            return None
        return ast.Distinct(expr.child.child)
    return None


def _rebuild(expr: ast.RaExpr, new_children: tuple) -> ast.RaExpr:
    if isinstance(expr, ast.BINARY_NODES):
        return type(expr)(*(
            (expr.predicate,) if isinstance(expr, ast.Join) else ()
        ), *new_children)
    if isinstance(expr, ast.Select):
        return ast.Select(expr.predicate, new_children[0])
    if isinstance(expr, ast.Project):
        return ast.Project(expr.columns, new_children[0])
    if isinstance(expr, ast.Rename):
        return ast.Rename(expr.pairs, new_children[0])
    if isinstance(expr, ast.GroupBy):
        return ast.GroupBy(expr.keys, expr.aggregates, new_children[0])
    if isinstance(expr, ast.Distinct):
        return ast.Distinct(new_children[0])
    if isinstance(expr, ast.Sort):
        return ast.Sort(expr.keys, new_children[0])
    if isinstance(expr, ast.Limit):
        return ast.Limit(expr.count, new_children[0])
    return expr


def _pass(expr: ast.RaExpr, catalog: Catalog, budget: _Budget):
    """Bottom-up: rewrite children first, then this node. Returns
    (expr, changed)."""
    old_children = ast.children(expr)
    if old_children:
        rebuilt = []
        changed = False
        for child in old_children:
            new_child, child_changed = _pass(child, catalog, budget)
            changed |= child_changed
            rebuilt.append(new_child)
        if changed:
            expr = _rebuild(expr, tuple(rebuilt))
    else:
        changed = False

    rewritten = _rewrite_node(expr, catalog, budget)
    if rewritten is not None:
        return rewritten, True
    return expr, changed


def _prune(expr: ast.RaExpr, required: set[str] | None,
           catalog: Catalog, budget: _Budget) -> ast.RaExpr:
    """Rule 4. `required` holds case-folded column names needed above this
    node; None means every column is needed."""
    if isinstance(expr, ast.Scan):
        schema = infer_schema(expr, catalog)
        if required is None:
            return expr
        keep = [c.name for c in schema.columns if c.name.lower() in required]
        if not keep:
            keep = [schema.columns[0].name]  # projections cannot be empty
        if len(keep) == len(schema.columns) or not budget.spend():
            return expr
        return ast.Project(tuple(keep), expr)

    if isinstance(expr, ast.Select):
        need = (None if required is None
                else required | _fold(ast.predicate_columns(expr.predicate)))
        return ast.Select(expr.predicate, _prune(expr.child, need, catalog, budget))

    if isinstance(expr, ast.Project):
        return ast.Project(expr.columns,
                           _prune(expr.child, _fold(expr.columns), catalog, budget))

    if isinstance(expr, ast.Sort):
        need = (None if required is None
                else required | _fold(k.column for k in expr.keys))
        return ast.Sort(expr.keys, _prune(expr.child, need, catalog, budget))

    if isinstance(expr, ast.Limit):
        return ast.Limit(expr.count, _prune(expr.child, required, catalog, budget))

    if isinstance(expr, ast.GroupBy):
        need = _fold(expr.keys) | _fold(
            a.column for a in expr.aggregates if a.column is not None
        )
        return ast.GroupBy(expr.keys, expr.aggregates,
                           _prune(expr.child, need, catalog, budget))

    if isinstance(expr, (ast.Times, ast.Join)):
        need = required
        if isinstance(expr, ast.Join):
            pred_cols = _fold(ast.predicate_columns(expr.predicate))
            need = None if need is None else need | pred_cols
        left_cols = _folded_names(expr.left, catalog)
        right_cols = _folded_names(expr.right, catalog)
        left_need = None if need is None else need & left_cols
        right_need = None if need is None else need & right_cols
        left = _prune(expr.left, left_need, catalog, budget)
        right = _prune(expr.right, right_need, catalog, budget)
        if isinstance(expr, ast.Join):
            return ast.Join(expr.predicate, left, right)
        return ast.Times(left, right)

    # distinct, set operators, divide and rename depend on every column of
    # their children; restart the analysis below them
    if isinstance(expr, ast.Distinct):
        return ast.Distinct(_prune(expr.child, None, catalog, budget))
    if isinstance(expr, ast.Rename):
        return ast.Rename(expr.pairs, _prune(expr.child, None, catalog, budget))
    if isinstance(expr, ast.BINARY_NODES):
        return type(expr)(_prune(expr.left, None, catalog, budget),
                          _prune(expr.right, None, catalog, budget))
    return expr


def optimize(expr: ast.RaExpr, catalog: Catalog) -> ast.RaExpr:
    """Rewrite an expression (infer_schema must succeed on it) into an
    equivalent one with filters applied as early as possible. Idempotent;
    never changes the output schema or the result."""
    budget = _Budget(BUDGET)
    changed = True
    while changed and budget.steps > 0:
        expr, changed = _pass(expr, catalog, budget)
    expr = _prune(expr, None, catalog, budget)
    # pruning can stack a projection under a pre-existing one
    changed = True
    while changed and budget.steps > 0:
        expr, changed = _pass(expr, catalog, budget)
    return expr
