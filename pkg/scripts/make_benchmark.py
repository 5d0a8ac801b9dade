#!/usr/bin/env python3
"""Regenerate the bundled synthetic benchmark under benchmark/.

Produces: catalog.json, data/*.csv, queries.jsonl (50 answer-mode records,
level split 16/16/12/6), reject.jsonl, examples.jsonl, and fixtures/ with
canned interpreter responses for shot counts 0, 2 and 4.

Expected tables are computed with the naive reference evaluator from
tests/oracle.py, not with the engine under test, so the end-to-end replay
check stays a genuine two-route comparison.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracle  # noqa: E402

from gatelens.kb import bind_and_repair  # noqa: E402
from gatelens.llm import FewShotExample, FixtureProvider, build_interpreter_prompt  # noqa: E402
from gatelens.parser import parse  # noqa: E402
from gatelens.schema import catalog_from_dict  # noqa: E402
from gatelens.values import value_to_text  # noqa: E402

BENCH = ROOT / "benchmark"
SHOT_COUNTS = (0, 2, 4)

CATALOG = {
    "domain_context": (
        "Release validation for a fictional truck fleet. Each release "
        "candidate (RC1, RC2, RC3) runs a gate test suite per truck and "
        "function group; test_result is OK for a pass and NOK for a failure."
    ),
    "tables": {
        "results": {
            "columns": {
                "test_id": {"type": "int", "nullable": False,
                            "description": "unique test execution id",
                            "synonyms": ["id", "execution_id"]},
                "name": {"type": "text", "nullable": False,
                         "description": "truck identifier the test ran on",
                         "synonyms": ["truck", "trucks", "vehicle"]},
                "function_group": {"type": "text", "nullable": False,
                                   "description": "vehicle function under test",
                                   "synonyms": ["domain", "area", "subsystem"]},
                "test_result": {"type": "text", "nullable": False,
                                "description": "OK or NOK verdict",
                                "synonyms": ["result", "status", "outcome",
                                             "verdict"]},
                "release": {"type": "text", "nullable": False,
                            "description": "release candidate under validation",
                            "synonyms": ["rc", "release_candidate", "build"]},
                "duration": {"type": "float", "nullable": True,
                             "description": "execution time in seconds; empty "
                                            "when the harness lost the timing",
                             "synonyms": ["runtime", "time", "seconds"]},
                "executed_on": {"type": "date", "nullable": False,
                                "description": "calendar date of the run",
                                "synonyms": ["run_date", "day"]},
            }
        },
        "trucks": {
            "columns": {
                "name": {"type": "text", "nullable": False,
                         "description": "truck identifier",
                         "synonyms": ["truck", "vehicle"]},
                "model": {"type": "text", "nullable": False,
                          "description": "truck model series",
                          "synonyms": ["series"]},
                "year": {"type": "int", "nullable": False,
                         "description": "model year",
                         "synonyms": ["model_year"]},
            }
        },
    },
}

TRUCKS = [
    ("T-101", "FH16", 2022),
    ("T-102", "FH16", 2023),
    ("T-103", "FM", 2022),
    ("T-104", "FM", 2024),
    ("T-105", "FMX", 2023),
    ("T-106", "FMX", 2024),
    ("T-107", "FE", 2021),
    ("T-108", "FH16", 2024),
]

# test_id, name, function_group, test_result, release, duration, executed_on
RESULTS = [
    (1, "T-101", "braking", "OK", "RC1", 84.5, "2025-05-05"),
    (2, "T-101", "powertrain", "OK", "RC1", 132.0, "2025-05-05"),
    (3, "T-102", "braking", "NOK", "RC1", 91.25, "2025-05-06"),
    (4, "T-102", "telematics", "OK", "RC1", 45.0, "2025-05-06"),
    (5, "T-103", "braking", "OK", "RC1", 78.0, "2025-05-06"),
    (6, "T-103", "cabin", "OK", "RC1", None, "2025-05-07"),
    (7, "T-104", "powertrain", "NOK", "RC1", 151.5, "2025-05-07"),
    (8, "T-105", "telematics", "OK", "RC1", 52.75, "2025-05-08"),
    (9, "T-107", "braking", "OK", "RC1", 80.0, "2025-05-08"),
    (10, "T-101", "braking", "OK", "RC2", 82.0, "2025-05-26"),
    (11, "T-101", "telematics", "OK", "RC2", 49.5, "2025-05-26"),
    (12, "T-102", "braking", "NOK", "RC2", 95.0, "2025-05-27"),
    (13, "T-102", "braking", "NOK", "RC2", 94.5, "2025-05-27"),
    (14, "T-102", "powertrain", "OK", "RC2", 128.0, "2025-05-27"),
    (15, "T-103", "cabin", "OK", "RC2", 33.25, "2025-05-28"),
    (16, "T-104", "powertrain", "NOK", "RC2", None, "2025-05-28"),
    (17, "T-104", "braking", "OK", "RC2", 77.5, "2025-05-28"),
    (18, "T-105", "telematics", "NOK", "RC2", 58.0, "2025-05-29"),
    (19, "T-106", "cabin", "OK", "RC2", 31.0, "2025-05-29"),
    (20, "T-107", "powertrain", "OK", "RC2", 140.25, "2025-05-29"),
    (21, "T-108", "braking", "OK", "RC2", 79.75, "2025-05-30"),
    (22, "T-101", "braking", "OK", "RC3", 81.5, "2025-06-16"),
    (23, "T-101", "powertrain", "OK", "RC3", 129.0, "2025-06-16"),
    (24, "T-102", "braking", "NOK", "RC3", 96.5, "2025-06-17"),
    (25, "T-102", "telematics", "OK", "RC3", 44.0, "2025-06-17"),
    (26, "T-103", "braking", "OK", "RC3", 76.25, "2025-06-17"),
    (27, "T-104", "powertrain", "OK", "RC3", 149.0, "2025-06-18"),
    (28, "T-104", "cabin", "OK", "RC3", None, "2025-06-18"),
    (29, "T-105", "telematics", "OK", "RC3", 51.0, "2025-06-18"),
    (30, "T-105", "braking", "NOK", "RC3", 88.0, "2025-06-19"),
    (31, "T-106", "powertrain", "OK", "RC3", 137.5, "2025-06-19"),
    (32, "T-106", "cabin", "OK", "RC3", 30.5, "2025-06-19"),
    (33, "T-107", "braking", "OK", "RC3", 79.0, "2025-06-19"),
    (34, "T-108", "telematics", "OK", "RC3", 50.25, "2025-06-20"),
    (35, "T-108", "braking", "OK", "RC3", 78.5, "2025-06-20"),
    (36, "T-108", "braking", "OK", "RC3", 78.5, "2025-06-20"),
    (37, "T-103", "telematics", "OK", "RC3", None, "2025-06-20"),
    (38, "T-106", "braking", "OK", "RC1", 80.5, "2025-05-08"),
    (39, "T-105", "powertrain", "OK", "RC1", 135.75, "2025-05-09"),
    (40, "T-108", "powertrain", "OK", "RC1", 133.0, "2025-05-09"),
]

# id, level, category, role, query, gold RA (as the interpreter would emit it)
QUERIES = [
    # ---- level 1: single operation ----
    ("q01", 1, "filtering", "mechanical",
     "List every failing test run.",
     'select[test_result == "NOK"](results)'),
    ("q02", 1, "filtering", "project",
     "Show all test results for release candidate RC3.",
     'select[Release == "RC3"](Results)'),
    ("q03", 1, "filtering", "software",
     "Show the braking test runs.",
     'select[function_group == "braking"](results)'),
    ("q04", 1, "sorting", "project",
     "Show the test runs, slowest first.",
     "sort[duration desc](results)"),
    ("q05", 1, "sorting", "project",
     "Order the test runs by execution date.",
     "sort[executed_on](results)"),
    ("q06", 1, "projection", "mechanical",
     "Which trucks are in the fleet?",
     "project[name](trucks)"),
    ("q07", 1, "projection", "project",
     "Give me truck names with their verdicts.",
     "project[Name, Test_Result](results)"),
    ("q08", 1, "dedup", "project",
     "Remove duplicate rows from the results table.",
     "distinct(results)"),
    ("q09", 1, "filtering", "software",
     "Which runs took longer than 100 seconds?",
     "select[duration > 100](results)"),
    ("q10", 1, "filtering", "project",
     "Show results executed on or after the first of June 2025.",
     'select[executed_on >= "2025-06-01"](results)'),
    ("q11", 1, "projection", "mechanical",
     "List the truck model series.",
     "project[model](trucks)"),
    ("q12", 1, "filtering", "mechanical",
     "Which trucks are model year 2023 or newer?",
     "select[year >= 2023](trucks)"),
    ("q13", 1, "sorting", "mechanical",
     "Sort the trucks by name.",
     "sort[name](trucks)"),
    ("q14", 1, "filtering", "software",
     "Show the passing test runs.",
     'select[test_result == "OK"](results)'),
    ("q15", 1, "filtering", "project",
     "Show results from RC1 or RC2.",
     'select[release in ["RC1", "RC2"]](results)'),
    ("q16", 1, "filtering", "project",
     "Show the first five rows of the results table.",
     "limit[5](results)"),
    # ---- level 2: two or three operations ----
    ("q17", 2, "filtering", "mechanical",
     "Find some trucks for cases that are NOK",
     'project[truck](select[test_result == "NOK"](results))'),
    ("q18", 2, "dedup", "mechanical",
     "Which distinct trucks have at least one failing run?",
     'distinct(project[name](select[test_result == "NOK"](results)))'),
    ("q19", 2, "projection", "software",
     "Truck and duration for every powertrain run.",
     'project[name, duration](select[function_group == "powertrain"](results))'),
    ("q20", 2, "sorting", "software",
     "Passing runs ordered from slowest to fastest.",
     'sort[duration desc](select[test_result == "OK"](results))'),
    ("q21", 2, "sorting", "project",
     "What are the three slowest test runs?",
     "limit[3](sort[duration desc](results))"),
    ("q22", 2, "filtering", "project",
     "Failing runs in RC2.",
     'select[test_result == "NOK" and release == "RC2"](results)'),
    ("q23", 2, "filtering", "mechanical",
     "Names of trucks that failed in RC3.",
     'project[name](select[release == "RC3" and test_result == "NOK"](results))'),
    ("q24", 2, "dedup", "software",
     "Which function groups are covered by the suite?",
     "distinct(project[function_group](results))"),
    ("q25", 2, "text_match", "mechanical",
     "Show runs for trucks whose id contains 10.",
     'select[contains(name, "10")](results)'),
    ("q26", 2, "sorting", "software",
     "Braking runs, most recent first.",
     'sort[executed_on desc](select[function_group == "braking"](results))'),
    ("q27", 2, "filtering", "project",
     "Runs that took between 50 and 200 seconds inclusive.",
     "select[duration >= 50 and duration <= 200](results)"),
    ("q28", 2, "projection", "project",
     "Truck and release for every failing run.",
     'project[name, release](select[test_result == "NOK"](results))'),
    ("q29", 2, "dedup", "project",
     "Which release candidates have recorded results?",
     "distinct(project[release](results))"),
    ("q30", 2, "text_match", "software",
     "Match runs whose verdict equals nok ignoring case.",
     'select[lower(test_result) == "nok"](results)'),
    ("q31", 2, "sorting", "project",
     "The ten most recent test runs.",
     "limit[10](sort[executed_on desc](results))"),
    ("q32", 2, "filtering", "software",
     "All runs whose verdict is anything but OK.",
     'select[not (test_result == "OK")](results)'),
    # ---- level 3: several operations, grouping, joins ----
    ("q33", 3, "aggregation", "project",
     "How many test runs are recorded per release?",
     "groupby[release; count(*) as n](results)"),
    ("q34", 3, "aggregation", "mechanical",
     "Per truck, how many failing runs are there?",
     'groupby[name; count(*) as failures](select[test_result == "NOK"](results))'),
    ("q35", 3, "aggregation", "project",
     "Failure counts per release, worst release first.",
     'sort[n desc](groupby[release; count(*) as n](select[test_result == "NOK"](results)))'),
    ("q36", 3, "join", "mechanical",
     "Attach the truck model to every test result.",
     "project[name, model, test_result](join[name == truck_name]"
     "(results, rename[name -> truck_name](trucks)))"),
    ("q37", 3, "join", "mechanical",
     "Which model series has at least one failing run?",
     'distinct(project[model](join[name == truck_name](select[test_result == "NOK"]'
     "(results), rename[name -> truck_name](trucks))))"),
    ("q38", 3, "aggregation", "software",
     "Average duration per function group.",
     "groupby[function_group; avg(duration) as avg_duration](results)"),
    ("q39", 3, "aggregation", "mechanical",
     "Longest run per truck within RC2.",
     'groupby[name; max(duration) as longest](select[release == "RC2"](results))'),
    ("q40", 3, "set_ops", "mechanical",
     "Which trucks never had a failing run?",
     'minus(project[name](trucks), project[name](select[test_result == "NOK"](results)))'),
    ("q41", 3, "set_ops", "project",
     "Trucks that were tested in both RC1 and RC2.",
     'intersect(project[name](select[release == "RC1"](results)), '
     'project[name](select[release == "RC2"](results)))'),
    ("q42", 3, "set_ops", "project",
     "Trucks that failed in RC1 or in RC2.",
     'union(project[name](select[release == "RC1" and test_result == "NOK"](results)), '
     'project[name](select[release == "RC2" and test_result == "NOK"](results)))'),
    ("q43", 3, "aggregation", "project",
     "Run counts per release and function group.",
     "groupby[release, function_group; count(*) as runs](results)"),
    ("q44", 3, "aggregation", "mechanical",
     "Which truck has the highest average duration?",
     "limit[1](sort[avg_duration desc](groupby[name; avg(duration) as avg_duration](results)))"),
    # ---- level 4: advanced / statistical ----
    ("q45", 4, "stats", "project",
     "Per release: run count, total and average duration.",
     "groupby[release; count(*) as total, sum(duration) as total_duration, "
     "avg(duration) as avg_duration](results)"),
    ("q46", 4, "stats", "project",
     "Which trucks were tested on every release candidate?",
     "divide(project[name, release](results), project[release](results))"),
    ("q47", 4, "stats", "software",
     "For passing runs, per truck: run count plus fastest and slowest time.",
     "groupby[name; count(*) as runs, min(duration) as fastest, "
     'max(duration) as slowest](select[test_result == "OK"](results))'),
    ("q48", 4, "stats", "mechanical",
     "Failure counts per truck for RC2 and RC3 combined, highest first.",
     "sort[n desc](groupby[name; count(*) as n]"
     '(select[test_result == "NOK" and release in ["RC2", "RC3"]](results)))'),
    ("q49", 4, "stats", "mechanical",
     "Failure counts per model series.",
     "groupby[model; count(*) as failures](join[name == truck_name]"
     '(select[test_result == "NOK"](results), rename[name -> truck_name](trucks)))'),
    ("q50", 4, "stats", "project",
     "Trucks with RC3 results and not a single NOK in RC3.",
     'minus(project[name](select[release == "RC3"](results)), '
     'project[name](select[release == "RC3" and test_result == "NOK"](results)))'),
]

REJECTS = [
    ("r01", "What is the most beautiful truck?",
     "subjective judgment; beauty is not a recorded attribute"),
    ("r02", "Will RC4 be ready before the end of the year?",
     "future planning; the tables only record executed tests"),
    ("r03", "Who is the best engineer on the release team?",
     "no personnel data exists in the schema"),
    ("r04", "Why did T-102 keep failing the braking tests?",
     "root causes are not recorded; only OK/NOK verdicts exist"),
    ("r05", "Should we ship RC3 to customers?",
     "go/no-go judgment beyond what the recorded data can answer"),
]

EXAMPLES = [
    ("How many tests ran in total?",
     "groupby[; count(*) as total](results)",
     "empty grouping keys aggregate the whole table"),
    ("Which trucks were tested on the first of June 2025?",
     'distinct(project[name](select[executed_on == "2025-06-01"](results)))',
     "dates are written as YYYY-MM-DD strings"),
    ("List the cabin test runs.",
     'select[function_group == "cabin"](results)', ""),
    ("What is the average duration overall?",
     "groupby[; avg(duration) as avg_duration](results)", ""),
    ("Which trucks are model year 2024?",
     "project[name](select[year == 2024](trucks))", ""),
]


def write_csv(path: Path, header: list[str], rows: list[tuple]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else str(v) for v in row])


def oracle_tables(catalog) -> dict:
    """Benchmark data in the oracle's plain form, parsed independently."""
    tables = {}
    for tname, rows in (("results", RESULTS), ("trucks", TRUCKS)):
        schema = catalog.find(tname)
        names = [c.name for c in schema.columns]
        kinds = [c.type.kind for c in schema.columns]
        parsed = []
        for row in rows:
            cells = []
            for value, kind in zip(row, kinds):
                if value is None:
                    cells.append(None)
                elif kind == "date":
                    from datetime import date
                    cells.append(date.fromisoformat(value))
                else:
                    cells.append(value)
            parsed.append(tuple(cells))
        tables[tname] = (names, kinds, parsed)
    return tables


def expected_csv(gold_ra: str, catalog, tables) -> str:
    bound, _ = bind_and_repair(parse(gold_ra), catalog)
    names, kinds, rows = oracle.evaluate(bound, tables)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(names)
    for row in rows:
        writer.writerow([value_to_text(v) for v in row])
    return out.getvalue()


def main():
    BENCH.mkdir(exist_ok=True)
    (BENCH / "data").mkdir(exist_ok=True)
    fixtures = FixtureProvider(BENCH / "fixtures", "replay")

    with open(BENCH / "catalog.json", "w", encoding="utf-8") as fh:
        json.dump(CATALOG, fh, indent=2)
        fh.write("\n")
    catalog = catalog_from_dict(CATALOG)

    write_csv(BENCH / "data" / "trucks.csv", ["name", "model", "year"], TRUCKS)
    write_csv(BENCH / "data" / "results.csv",
              ["test_id", "name", "function_group", "test_result",
               "release", "duration", "executed_on"], RESULTS)

    with open(BENCH / "examples.jsonl", "w", encoding="utf-8") as fh:
        for query, ra, note in EXAMPLES:
            fh.write(json.dumps({"query": query, "ra": ra, "note": note}) + "\n")
    pool = tuple(FewShotExample(q, ra, note) for q, ra, note in EXAMPLES)

    tables = oracle_tables(catalog)
    empty = []
    with open(BENCH / "queries.jsonl", "w", encoding="utf-8") as fh:
        for qid, level, category, role, query, gold in QUERIES:
            csv_text = expected_csv(gold, catalog, tables)
            if csv_text.count("\n") <= 1:
                empty.append(qid)
            fh.write(json.dumps({
                "id": qid, "query": query, "level": level,
                "category": category, "role": role,
                "expected": {"kind": "table", "csv": csv_text},
            }) + "\n")
            for shots in SHOT_COUNTS:
                request = build_interpreter_prompt(catalog, query, pool[:shots])
                fixtures.put(request, f"```ra\n{gold}\n```\n")

    with open(BENCH / "reject.jsonl", "w", encoding="utf-8") as fh:
        for rid, query, reason in REJECTS:
            fh.write(json.dumps({
                "id": rid, "query": query, "expected": {"kind": "reject"},
            }) + "\n")
            for shots in SHOT_COUNTS:
                request = build_interpreter_prompt(catalog, query, pool[:shots])
                fixtures.put(request, f"OUT_OF_SCOPE: {reason}\n")

    levels = [q[1] for q in QUERIES]
    print(f"records: {len(QUERIES)} "
          f"(levels: {[levels.count(i) for i in (1, 2, 3, 4)]})")
    print(f"rejects: {len(REJECTS)}, examples: {len(EXAMPLES)}")
    print(f"fixtures: {len(list((BENCH / 'fixtures').glob('*.txt')))}")
    if empty:
        print(f"WARNING: empty expected tables for {empty}")


if __name__ == "__main__":
    main()
