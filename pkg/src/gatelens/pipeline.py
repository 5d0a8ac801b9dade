"""End-to-end query flow.

One model invocation per query, then a fully deterministic tail:

    question -> interpreter prompt -> model -> RA text
             -> parse -> bind/repair -> optimize -> compile -> execute

Every stage artifact is retained in the outcome for audit. Failures never
escape as exceptions: the interpreter declining (OUT_OF_SCOPE) or the binder
hitting an unresolvable identifier yields Rejected; anything else that breaks
yields Failed with the stage that raised it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import (
    AmbiguousError,
    GateLensError,
    MalformedResponseError,
    ParseError,
    UnresolvedError,
)
from .kb import Resolution, bind_and_repair
from .llm import (
    FewShotExample,
    OutOfScope,
    Provider,
    build_interpreter_prompt,
    complete,
    default_model,
    parse_interpreter_output,
)
from .optimizer import optimize
from .parser import parse
from .plan import compile_plan, execute
from .printer import format_ra
from .relation import Relation
from .schema import Catalog

STAGE_INTERPRETER = "interpreter"
STAGE_PARSE = "parse"
STAGE_BINDER = "binder"
STAGE_OPTIMIZE = "optimize"
STAGE_COMPILE = "compile"
STAGE_EXECUTE = "execute"


@dataclass(frozen=True)
class Answered:
    ra_text: str
    optimized_ra_text: str
    resolutions: tuple[Resolution, ...]
    result: Relation
    timings: dict[str, float] = field(compare=False, default_factory=dict)


@dataclass(frozen=True)
class Rejected:
    reason: str
    stage: str  # interpreter | binder
    timings: dict[str, float] = field(compare=False, default_factory=dict)


@dataclass(frozen=True)
class Failed:
    error: str
    kind: str   # exception class name, e.g. FixtureMissError
    stage: str
    timings: dict[str, float] = field(compare=False, default_factory=dict)


QueryOutcome = Answered | Rejected | Failed


@dataclass(frozen=True)
class PipelineOptions:
    examples: tuple[FewShotExample, ...] = ()
    optimize: bool = True
    model: str | None = None  # None -> GATELENS_MODEL or the default


class _Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def __call__(self, stage: str):
        return _Span(self.timings, stage)


class _Span:
    def __init__(self, timings, stage):
        self.timings = timings
        self.stage = stage

    def __enter__(self):
        self.start = time.perf_counter()

    def __exit__(self, *exc):
        self.timings[self.stage] = time.perf_counter() - self.start
        return False


def run_query(query: str, catalog: Catalog, database: dict[str, Relation],
              provider: Provider,
              options: PipelineOptions = PipelineOptions()) -> QueryOutcome:
    """Answer one natural-language question. At most one provider call."""
    timer = _Timer()
    model = options.model or default_model()

    try:
        with timer(STAGE_INTERPRETER):
            request = build_interpreter_prompt(
                catalog, query, options.examples, model=model
            )
            raw = complete(request, provider)
            output = parse_interpreter_output(raw)
    except MalformedResponseError as exc:
        return Failed(str(exc), type(exc).__name__, STAGE_INTERPRETER, timer.timings)
    except GateLensError as exc:
        return Failed(str(exc), type(exc).__name__, STAGE_INTERPRETER, timer.timings)

    if isinstance(output, OutOfScope):
        return Rejected(output.reason, STAGE_INTERPRETER, timer.timings)

    try:
        with timer(STAGE_PARSE):
            expr = parse(output.text)
    except ParseError as exc:
        return Failed(str(exc), type(exc).__name__, STAGE_PARSE, timer.timings)

    try:
        with timer(STAGE_BINDER):
            bound, resolutions = bind_and_repair(expr, catalog)
    except (UnresolvedError, AmbiguousError) as exc:
        return Rejected(str(exc), STAGE_BINDER, timer.timings)
    except GateLensError as exc:
        return Failed(str(exc), type(exc).__name__, STAGE_BINDER, timer.timings)

    optimized = bound
    if options.optimize:
        try:
            with timer(STAGE_OPTIMIZE):
                optimized = optimize(bound, catalog)
        except GateLensError as exc:
            return Failed(str(exc), type(exc).__name__, STAGE_OPTIMIZE, timer.timings)

    try:
        with timer(STAGE_COMPILE):
            plan = compile_plan(optimized, catalog)
    except GateLensError as exc:
        return Failed(str(exc), type(exc).__name__, STAGE_COMPILE, timer.timings)

    try:
        with timer(STAGE_EXECUTE):
            result = execute(plan, database)
    except GateLensError as exc:
        return Failed(str(exc), type(exc).__name__, STAGE_EXECUTE, timer.timings)

    return Answered(
        ra_text=format_ra(bound),
        optimized_ra_text=format_ra(optimized),
        resolutions=tuple(resolutions),
        result=result,
        timings=timer.timings,
    )
