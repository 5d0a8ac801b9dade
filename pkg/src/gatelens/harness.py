"""Benchmark ingestion, TP/FP/FN scoring and precision/recall/F1 reports.

Scoring has two explicit modes, declared per record by the `expected` field:

  answer-mode (expected table): Answered and matching the gold table -> TP;
      Answered but wrong -> FP; Rejected or Failed -> FN.
  reject-mode (expected reject): Rejected -> TP; Answered -> FP; Failed -> FN.

Matching uses the executor's canonical result comparison: column order
normalized by name, row order ignored unless the query's top-level operator
is sort. Records are JSON Lines with fields
`id,query,level,category,role,expected`, where expected is either
{"kind": "table", "csv": "..."} or {"kind": "reject"}.
"""

from __future__ import annotations

import csv as _csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from . import ast
from .errors import GateLensError
from .llm import FewShotExample, Provider
from .parser import parse
from .pipeline import Answered, Failed, PipelineOptions, QueryOutcome, Rejected, run_query
from .relation import Relation, canonically_equal, load_csv
from .schema import Catalog

ROLES = ("mechanical", "project", "software")

TP, FP, FN = "TP", "FP", "FN"


class BenchmarkAbort(GateLensError):
    """Replay could not proceed (fixture miss); carries the offending id."""

    def __init__(self, record_id: str, detail: str):
        self.record_id = record_id
        super().__init__(f"benchmark aborted at record {record_id!r}: {detail}")


@dataclass(frozen=True)
class ExpectedTable:
    csv: str

    def __post_init__(self):
        reader = _csv.reader(io.StringIO(self.csv))
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("expected table must carry a header row") from None
        for i, record in enumerate(reader, start=1):
            if record and len(record) != len(header):
                raise ValueError(
                    f"expected table row {i} has {len(record)} fields, "
                    f"header has {len(header)}"
                )


@dataclass(frozen=True)
class ExpectedReject:
    pass


Expected = ExpectedTable | ExpectedReject


@dataclass(frozen=True)
class EvalRecord:
    id: str
    query: str
    expected: Expected
    level: int | None = None
    category: str | None = None
    role: str | None = None

    def __post_init__(self):
        if self.level is not None and self.level not in (1, 2, 3, 4):
            raise ValueError(f"record {self.id}: level must be 1..4")
        if self.role is not None and self.role not in ROLES:
            raise ValueError(f"record {self.id}: role must be one of {ROLES}")


def record_from_dict(doc: dict) -> EvalRecord:
    expected_doc = doc["expected"]
    kind = expected_doc.get("kind")
    if kind == "table":
        expected: Expected = ExpectedTable(expected_doc["csv"])
    elif kind == "reject":
        expected = ExpectedReject()
    else:
        raise ValueError(f"record {doc.get('id')}: unknown expected kind {kind!r}")
    return EvalRecord(
        id=str(doc["id"]),
        query=doc["query"],
        expected=expected,
        level=doc.get("level"),
        category=doc.get("category"),
        role=doc.get("role"),
    )


def record_to_dict(record: EvalRecord) -> dict:
    expected = (
        {"kind": "table", "csv": record.expected.csv}
        if isinstance(record.expected, ExpectedTable)
        else {"kind": "reject"}
    )
    return {
        "id": record.id,
        "query": record.query,
        "level": record.level,
        "category": record.category,
        "role": record.role,
        "expected": expected,
    }


def load_records(path) -> list[EvalRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(record_from_dict(json.loads(line)))
    return records


def save_records(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record)) + "\n")


def _matches(outcome: Answered, expected: ExpectedTable) -> bool:
    try:
        gold = load_csv(io.StringIO(expected.csv), outcome.result.schema)
    except GateLensError:
        return False  # gold table does not even fit the produced shape
    ordered = isinstance(parse(outcome.ra_text), ast.Sort)
    return canonically_equal(outcome.result, gold, ordered=ordered)


def score_outcome(outcome: QueryOutcome, expected: Expected) -> str:
    """Pure function of (outcome, expected) -> TP | FP | FN."""
    if isinstance(expected, ExpectedReject):
        if isinstance(outcome, Rejected):
            return TP
        if isinstance(outcome, Answered):
            return FP
        return FN
    if isinstance(outcome, Answered):
        return TP if _matches(outcome, expected) else FP
    return FN


# --- metrics ---

@dataclass(frozen=True)
class SliceMetrics:
    slice: str
    tp: int
    fp: int
    fn: int
    precision: float | None  # percentages; None when undefined
    recall: float | None
    f1: float | None


@dataclass(frozen=True)
class MetricsReport:
    slices: tuple[SliceMetrics, ...]

    @property
    def overall(self) -> SliceMetrics:
        return self.slices[0]

    def to_csv(self) -> str:
        lines = ["slice,tp,fp,fn,precision,recall,f1"]
        for s in self.slices:
            lines.append(
                f"{s.slice},{s.tp},{s.fp},{s.fn},"
                f"{format_pct(s.precision)},{format_pct(s.recall)},{format_pct(s.f1)}"
            )
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        header = ("slice", "tp", "fp", "fn", "precision", "recall", "f1")
        rows = [header] + [
            (s.slice, str(s.tp), str(s.fp), str(s.fn),
             format_pct(s.precision), format_pct(s.recall), format_pct(s.f1))
            for s in self.slices
        ]
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        out = []
        for i, row in enumerate(rows):
            out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
            if i == 0:
                out.append("  ".join("-" * w for w in widths))
        return "\n".join(out) + "\n"


def format_pct(value: float | None) -> str:
    if value is None:
        return "-"
    return str(Decimal(value).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _slice_metrics(name: str, scores: list[str]) -> SliceMetrics:
    tp = scores.count(TP)
    fp = scores.count(FP)
    fn = scores.count(FN)
    precision = 100.0 * tp / (tp + fp) if tp + fp else None
    recall = 100.0 * tp / (tp + fn) if tp + fn else None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return SliceMetrics(name, tp, fp, fn, precision, recall, f1)


def compute_metrics(grouped: dict[str, list[str]]) -> MetricsReport:
    """Per-slice precision/recall/F1 from TP/FP/FN score lists.

    The "overall" slice always leads the report; remaining slices keep the
    given order."""
    names = list(grouped)
    if "overall" in names:
        names.remove("overall")
        names.insert(0, "overall")
    return MetricsReport(tuple(
        _slice_metrics(name, grouped[name]) for name in names
    ))


def group_scores(scored: list[tuple[EvalRecord, str]]) -> dict[str, list[str]]:
    """Build the overall/level/category/role slices from per-record scores."""
    grouped: dict[str, list[str]] = {"overall": []}
    for record, score in scored:
        grouped["overall"].append(score)
        for key in (
            f"level:{record.level}" if record.level is not None else None,
            f"category:{record.category}" if record.category else None,
            f"role:{record.role}" if record.role else None,
        ):
            if key is not None:
                grouped.setdefault(key, []).append(score)
    ordered = {"overall": grouped.pop("overall")}
    for name in sorted(grouped):
        ordered[name] = grouped[name]
    return ordered


# --- benchmark runs ---

@dataclass(frozen=True)
class BenchmarkRun:
    shots: int
    report: MetricsReport
    scores: tuple[tuple[str, str], ...]      # (record id, TP/FP/FN)
    outcomes: tuple[QueryOutcome, ...]
    failed: int


def run_benchmark(records: list[EvalRecord], catalog: Catalog,
                  database: dict[str, Relation], provider: Provider,
                  shots: list[int] = (0,),
                  example_pool: tuple[FewShotExample, ...] = (),
                  optimize: bool = True) -> list[BenchmarkRun]:
    """One full pass per shot count. Deterministic under the fixture
    provider; aborts on a fixture miss with the offending record id."""
    max_shots = max(shots) if shots else 0
    if max_shots > len(example_pool):
        raise ValueError(
            f"need {max_shots} few-shot examples, pool has {len(example_pool)}"
        )
    benchmark_queries = {r.query for r in records}
    for example in example_pool:
        if example.query in benchmark_queries:
            raise ValueError(
                f"example pool overlaps benchmark query: {example.query!r}"
            )

    runs = []
    for n in shots:
        options = PipelineOptions(examples=tuple(example_pool[:n]),
                                  optimize=optimize)
        scored: list[tuple[EvalRecord, str]] = []
        outcomes: list[QueryOutcome] = []
        failed = 0
        for record in records:
            outcome = run_query(record.query, catalog, database, provider, options)
            if isinstance(outcome, Failed):
                if outcome.kind == "FixtureMissError":
                    raise BenchmarkAbort(record.id, outcome.error)
                failed += 1
            outcomes.append(outcome)
            scored.append((record, score_outcome(outcome, record.expected)))
        runs.append(BenchmarkRun(
            shots=n,
            report=compute_metrics(group_scores(scored)),
            scores=tuple((r.id, s) for r, s in scored),
            outcomes=tuple(outcomes),
            failed=failed,
        ))
    return runs


def load_examples(path) -> tuple[FewShotExample, ...]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                doc = json.loads(line)
                examples.append(FewShotExample(
                    query=doc["query"], ra=doc["ra"], note=doc.get("note", "")
                ))
    return tuple(examples)
