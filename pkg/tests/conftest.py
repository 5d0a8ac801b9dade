from __future__ import annotations

from datetime import date
from pathlib import Path

import pytest

from gatelens.llm import FixtureProvider, build_interpreter_prompt
from gatelens.relation import Relation, load_csv
from gatelens.schema import Catalog, Column, TableSchema, load_catalog
from gatelens.values import ColumnType

REPO = Path(__file__).resolve().parents[1]
BENCH = REPO / "benchmark"


@pytest.fixture
def toy_catalog() -> Catalog:
    return Catalog((
        TableSchema("results", (
            Column("name", ColumnType("text"), "truck identifier",
                   ("truck", "trucks")),
            Column("test_result", ColumnType("text"), "OK or NOK",
                   ("result", "status")),
            Column("duration", ColumnType("float", True), "seconds"),
            Column("executed_on", ColumnType("date"), "run date"),
        )),
        TableSchema("trucks", (
            Column("name", ColumnType("text"), "truck identifier", ("truck",)),
            Column("model", ColumnType("text")),
            Column("year", ColumnType("int")),
        )),
    ), domain_context="release gate tests for a truck fleet")


@pytest.fixture
def toy_db(toy_catalog) -> dict[str, Relation]:
    return {
        "results": Relation(toy_catalog.find("results"), (
            ("truck1", "OK", 12.5, date(2025, 6, 1)),
            ("truck2", "NOK", 95.0, date(2025, 6, 1)),
            ("truck3", "NOK", None, date(2025, 6, 2)),
            ("truck1", "OK", 11.0, date(2025, 6, 2)),
            ("truck2", "NOK", 94.5, date(2025, 6, 3)),
        )),
        "trucks": Relation(toy_catalog.find("trucks"), (
            ("truck1", "FH", 2022),
            ("truck2", "FM", 2023),
            ("truck3", "FH", 2024),
        )),
    }


@pytest.fixture
def fixture_provider(tmp_path):
    """Empty replay store the test can seed via .put()."""
    return FixtureProvider(tmp_path / "fixtures", "replay")


def seed_response(provider: FixtureProvider, catalog, query: str, response: str,
                  examples=()):
    """Record a canned interpreter response for a query."""
    request = build_interpreter_prompt(catalog, query, examples)
    provider.put(request, response)
    return request


@pytest.fixture(scope="session")
def bench_catalog():
    return load_catalog(BENCH / "catalog.json")


@pytest.fixture(scope="session")
def bench_db(bench_catalog):
    return {
        t.name: load_csv(BENCH / "data" / f"{t.name}.csv", t)
        for t in bench_catalog.tables
    }
