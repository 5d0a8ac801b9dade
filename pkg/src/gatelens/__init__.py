"""Release analytics over tabular test results, via relational algebra.

Natural-language questions are translated (by a single model call) into RA
expressions; everything after that text is deterministic: parse, bind/repair
against the catalog, optimize, compile, execute. The model boundary replays
from fixtures so the whole system tests offline.
"""

from .errors import GateLensError, ParseError
from .harness import (
    EvalRecord,
    ExpectedReject,
    ExpectedTable,
    MetricsReport,
    compute_metrics,
    run_benchmark,
    score_outcome,
)
from .infer import infer_schema
from .kb import Resolution, bind_and_repair, render_schema_prompt, resolve_identifier
from .llm import (
    ChatRequest,
    FewShotExample,
    FixtureProvider,
    HttpProvider,
    OutOfScope,
    RaText,
    build_interpreter_prompt,
    complete,
    parse_interpreter_output,
)
from .optimizer import optimize
from .parser import parse
from .pipeline import Answered, Failed, PipelineOptions, Rejected, run_query
from .plan import Plan, compile_plan, execute
from .printer import format_ra
from .relation import Relation, canonically_equal, load_csv, relation_to_csv
from .schema import Catalog, Column, TableSchema, load_catalog, save_catalog
from .values import ColumnType

__version__ = "0.1.0"

__all__ = [
    "Answered",
    "Catalog",
    "ChatRequest",
    "Column",
    "ColumnType",
    "EvalRecord",
    "ExpectedReject",
    "ExpectedTable",
    "Failed",
    "FewShotExample",
    "FixtureProvider",
    "GateLensError",
    "HttpProvider",
    "MetricsReport",
    "OutOfScope",
    "ParseError",
    "PipelineOptions",
    "Plan",
    "RaText",
    "Rejected",
    "Relation",
    "Resolution",
    "TableSchema",
    "bind_and_repair",
    "build_interpreter_prompt",
    "canonically_equal",
    "compile_plan",
    "complete",
    "compute_metrics",
    "execute",
    "format_ra",
    "infer_schema",
    "load_catalog",
    "load_csv",
    "optimize",
    "parse",
    "parse_interpreter_output",
    "relation_to_csv",
    "render_schema_prompt",
    "resolve_identifier",
    "run_benchmark",
    "run_query",
    "save_catalog",
    "score_outcome",
]
