"""JSON-facing serialization of outcomes and relations.

Row values serialize as strings with a parallel `types` array (nulls stay
null), so any UI can render without re-deriving types. Field names are stable:
verdict, ra_text, optimized_ra_text, resolutions, columns, types, rows,
timings, reason, stage, error.
"""

from __future__ import annotations

from .kb import Resolution
from .pipeline import Answered, Failed, QueryOutcome, Rejected
from .relation import Relation
from .values import value_to_text


def relation_payload(relation: Relation) -> dict:
    return {
        "columns": list(relation.schema.column_names),
        "types": [c.type.kind for c in relation.schema.columns],
        "rows": [
            [None if v is None else value_to_text(v) for v in row]
            for row in relation.rows
        ],
    }


def resolution_payload(resolution: Resolution) -> dict:
    return {
        "requested": resolution.requested,
        "resolved": resolution.resolved,
        "method": resolution.method,
        "distance": resolution.distance,
    }


def outcome_payload(outcome: QueryOutcome) -> dict:
    if isinstance(outcome, Answered):
        payload = {
            "verdict": "answered",
            "ra_text": outcome.ra_text,
            "optimized_ra_text": outcome.optimized_ra_text,
            "resolutions": [resolution_payload(r) for r in outcome.resolutions],
            "timings": dict(outcome.timings),
        }
        payload.update(relation_payload(outcome.result))
        return payload
    if isinstance(outcome, Rejected):
        return {
            "verdict": "rejected",
            "reason": outcome.reason,
            "stage": outcome.stage,
            "timings": dict(outcome.timings),
        }
    assert isinstance(outcome, Failed)
    return {
        "verdict": "failed",
        "error": outcome.error,
        "kind": outcome.kind,
        "stage": outcome.stage,
        "timings": dict(outcome.timings),
    }
