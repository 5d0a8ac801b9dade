"""Knowledge base and gatekeeper.

Renders the catalog for prompts, resolves imprecise table/column references
(exact, case-insensitive, synonym, normalized, edit distance), and rewrites
expressions to canonical names. Resolution fails closed: an identifier that
cannot be uniquely resolved rejects the whole expression, because a silently
wrong field is worse than no answer in release validation.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .errors import AmbiguousError, UnresolvedError
from .infer import infer_schema
from .schema import Catalog

MAX_EDIT_DISTANCE = 2


@dataclass(frozen=True)
class Resolution:
    requested: str
    resolved: str
    method: str   # exact | case_fold | synonym | normalized | edit_distance
    distance: int = 0


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,        # deletion
                current[j - 1] + 1,     # insertion
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def _normalize(name: str) -> str:
    return name.replace(" ", "").replace("_", "").replace("-", "").casefold()


def _unique(requested: str, hits: list[tuple[str, int]], method: str) -> Resolution:
    """Collapse tier hits to one resolution or raise Ambiguous.

    Hits carry (canonical name, distance); identical canonical names are one
    hit, so duplicated candidate rows cannot fake an ambiguity."""
    names = sorted({name for name, _ in hits})
    if len(names) > 1:
        raise AmbiguousError(requested, tuple(names))
    name = names[0]
    distance = min(d for n, d in hits if n == name)
    return Resolution(requested, name, method, distance)


def resolve_identifier(requested: str,
                       candidates: list[tuple[str, tuple[str, ...]]]) -> Resolution:
    """Resolve a requested name against (name, synonyms) candidates.

    Tier order: exact, case-insensitive, synonym, normalized (spaces,
    underscores and hyphens stripped, case-folded), then Levenshtein with a
    unique minimum distance <= 2. Deterministic and independent of candidate
    order; ties raise Ambiguous, misses raise Unresolved.
    """
    if not candidates:
        raise UnresolvedError(requested)

    for name, _ in candidates:
        if name == requested:
            return Resolution(requested, name, "exact")

    folded = requested.lower()
    hits = [(name, 0) for name, _ in candidates if name.lower() == folded]
    if hits:
        return _unique(requested, hits, "case_fold")

    hits = [
        (name, 0)
        for name, synonyms in candidates
        if any(s.lower() == folded for s in synonyms)
    ]
    if hits:
        return _unique(requested, hits, "synonym")

    norm = _normalize(requested)
    hits = [
        (name, 0)
        for name, synonyms in candidates
        if _normalize(name) == norm or any(_normalize(s) == norm for s in synonyms)
    ]
    if hits:
        return _unique(requested, hits, "normalized")

    scored = []
    for name, synonyms in candidates:
        distance = min(
            levenshtein(folded, other.lower()) for other in (name, *synonyms)
        )
        scored.append((name, distance))
    best = min(d for _, d in scored)
    if best <= MAX_EDIT_DISTANCE:
        hits = [(name, d) for name, d in scored if d == best]
        return _unique(requested, hits, "edit_distance")

    raise UnresolvedError(requested)


def render_schema_prompt(catalog: Catalog) -> str:
    """Deterministic human-readable catalog rendering for the interpreter
    prompt. Schema only: row data never appears here."""
    lines: list[str] = []
    if catalog.domain_context:
        lines.append(f"Domain context: {catalog.domain_context}")
        lines.append("")
    if not catalog.tables:
        lines.append("No tables are defined.")
        return "\n".join(lines)
    for table in catalog.tables:
        lines.append(f"Table {table.name}:")
        for col in table.columns:
            null = "nullable" if col.type.nullable else "required"
            entry = f"  - {col.name} ({col.type.kind}, {null})"
            if col.description:
                entry += f": {col.description}"
            if col.synonyms:
                entry += f" [synonyms: {', '.join(col.synonyms)}]"
            lines.append(entry)
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


class _Repairer:
    def __init__(self, catalog: Catalog):
        self.catalog = catalog
        self.resolutions: list[Resolution] = []

    def _note(self, res: Resolution):
        if res.method != "exact" and res not in self.resolutions:
            self.resolutions.append(res)

    def _resolve_column(self, name: str, columns) -> str:
        res = resolve_identifier(name, [(c.name, c.synonyms) for c in columns])
        self._note(res)
        return res.resolved

    def repair(self, expr: ast.RaExpr) -> ast.RaExpr:
        if isinstance(expr, ast.Scan):
            res = resolve_identifier(
                expr.table, [(t.name, ()) for t in self.catalog.tables]
            )
            self._note(res)
            return ast.Scan(res.resolved)

        if isinstance(expr, ast.BINARY_NODES):
            left = self.repair(expr.left)
            right = self.repair(expr.right)
            if isinstance(expr, ast.Join):
                combined = (infer_schema(left, self.catalog).columns
                            + infer_schema(right, self.catalog).columns)
                pred = ast.map_predicate_columns(
                    expr.predicate, lambda n: self._resolve_column(n, combined)
                )
                return ast.Join(pred, left, right)
            return type(expr)(left, right)

        child = self.repair(expr.child)
        columns = infer_schema(child, self.catalog).columns

        if isinstance(expr, ast.Select):
            pred = ast.map_predicate_columns(
                expr.predicate, lambda n: self._resolve_column(n, columns)
            )
            return ast.Select(pred, child)
        if isinstance(expr, ast.Project):
            cols = tuple(self._resolve_column(c, columns) for c in expr.columns)
            return ast.Project(cols, child)
        if isinstance(expr, ast.Rename):
            pairs = tuple(
                (self._resolve_column(old, columns), new)
                for old, new in expr.pairs
            )
            return ast.Rename(pairs, child)
        if isinstance(expr, ast.GroupBy):
            keys = tuple(self._resolve_column(k, columns) for k in expr.keys)
            aggs = tuple(
                ast.Aggregate(
                    a.fn,
                    None if a.column is None
                    else self._resolve_column(a.column, columns),
                    a.name,
                )
                for a in expr.aggregates
            )
            return ast.GroupBy(keys, aggs, child)
        if isinstance(expr, ast.Sort):
            keys = tuple(
                ast.SortKey(self._resolve_column(k.column, columns), k.descending)
                for k in expr.keys
            )
            return ast.Sort(keys, child)
        if isinstance(expr, ast.Distinct):
            return ast.Distinct(child)
        if isinstance(expr, ast.Limit):
            return ast.Limit(expr.count, child)
        raise TypeError(f"not an RA expression: {expr!r}")


def bind_and_repair(expr: ast.RaExpr,
                    catalog: Catalog) -> tuple[ast.RaExpr, list[Resolution]]:
    """Rewrite every table/column reference to its canonical catalog name.

    Returns the repaired expression and the audit trail of non-exact
    resolutions. Raises Unresolved/Ambiguous (a pipeline-level rejection)
    when a reference has no safe unique target. Idempotent: repairing a
    repaired expression returns it unchanged with an empty trail.
    """
    repairer = _Repairer(catalog)
    repaired = repairer.repair(expr)
    return repaired, repairer.resolutions
