"""HTTP adapter over the pipeline for the query console.

Endpoints:
    POST /api/query       {"query": str, "shots"?: int} -> outcome payload
    GET  /api/schema      catalog (structured + prompt rendering), no row data
    POST /api/ra/execute  {"ra": str} -> result table (expert mode, no model)
    GET  /api/health      {"status": "ok", "provider_calls": n}

Status mapping: 200 answered, 422 rejected (body carries reason + stage),
400 malformed request body, 500 failed/internal. This layer holds no
business logic: every response is a straight serialization of a
QueryOutcome or a relation.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import optimizer
from .errors import AmbiguousError, GateLensError, ParseError, UnresolvedError
from .kb import bind_and_repair, render_schema_prompt
from .llm import FewShotExample, Provider
from .parser import parse
from .pipeline import Answered, PipelineOptions, Rejected, run_query
from .plan import compile_plan, execute
from .printer import format_ra
from .relation import Relation
from .schema import Catalog, catalog_to_dict
from .wire import outcome_payload, relation_payload


class QueryBody(BaseModel):
    query: str
    shots: int = 0


class RaBody(BaseModel):
    ra: str


def create_app(catalog: Catalog, database: dict[str, Relation],
               provider: Provider,
               example_pool: tuple[FewShotExample, ...] = (),
               optimize: bool = True) -> FastAPI:
    optimize_plans = optimize
    app = FastAPI(title="gatelens", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": "malformed request body"})

    @app.get("/api/health")
    def health():
        return {"status": "ok", "provider_calls": provider.calls}

    @app.get("/api/schema")
    def schema():
        return {
            "catalog": catalog_to_dict(catalog),
            "rendered": render_schema_prompt(catalog),
        }

    @app.post("/api/query")
    def query(body: QueryBody):
        shots = max(0, min(body.shots, len(example_pool)))
        outcome = run_query(
            body.query, catalog, database, provider,
            PipelineOptions(examples=tuple(example_pool[:shots]),
                            optimize=optimize_plans),
        )
        payload = outcome_payload(outcome)
        if isinstance(outcome, Answered):
            return payload
        if isinstance(outcome, Rejected):
            return JSONResponse(status_code=422, content=payload)
        return JSONResponse(status_code=500, content=payload)

    @app.post("/api/ra/execute")
    def ra_execute(body: RaBody):
        try:
            expr, resolutions = bind_and_repair(parse(body.ra), catalog)
            optimized = (optimizer.optimize(expr, catalog)
                         if optimize_plans else expr)
            result = execute(compile_plan(optimized, catalog), database)
        except ParseError as exc:
            return JSONResponse(status_code=422, content={
                "verdict": "failed", "stage": "parse", "error": str(exc),
                "line": exc.line, "column": exc.column,
            })
        except (UnresolvedError, AmbiguousError) as exc:
            return JSONResponse(status_code=422, content={
                "verdict": "rejected", "stage": "binder", "reason": str(exc),
            })
        except GateLensError as exc:
            return JSONResponse(status_code=422, content={
                "verdict": "failed", "stage": "compile", "error": str(exc),
            })
        payload = {
            "verdict": "answered",
            "ra_text": format_ra(expr),
            "optimized_ra_text": format_ra(optimized),
            "resolutions": [
                {"requested": r.requested, "resolved": r.resolved,
                 "method": r.method, "distance": r.distance}
                for r in resolutions
            ],
        }
        payload.update(relation_payload(result))
        return payload

    return app
