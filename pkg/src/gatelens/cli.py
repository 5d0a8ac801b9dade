"""Command-line shell.

    gatelens parse <file|->                      check/echo canonical RA text
    gatelens exec --ra <expr> --catalog <f> --data <dir>   run RA, no model
    gatelens query --q <text> --catalog <f> --data <dir>   full pipeline
    gatelens eval --bench <jsonl> --shots 0,2,4 ...         score a benchmark
    gatelens serve --port 8080 ...                          HTTP service

Global flags (before the subcommand): --provider live|replay|record,
--fixtures <dir>, --no-optimize. Exit codes: 0 success, 1 operation failure,
2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import GateLensError, ParseError
from .harness import BenchmarkAbort, load_examples, load_records, run_benchmark
from .kb import render_schema_prompt
from .llm import FixtureProvider, HttpProvider, Provider
from .optimizer import optimize
from .parser import parse
from .pipeline import Answered, PipelineOptions, Rejected, run_query
from .plan import compile_plan, execute
from .printer import format_ra
from .relation import Relation, load_csv, relation_to_csv
from .schema import Catalog, load_catalog
from .wire import outcome_payload


def build_provider(kind: str, fixtures: str) -> Provider:
    if kind == "replay":
        return FixtureProvider(fixtures, "replay")
    if kind == "record":
        return FixtureProvider(fixtures, "record", inner=HttpProvider())
    return HttpProvider()


def load_database(catalog: Catalog, data_dir) -> dict[str, Relation]:
    """One CSV per table: <data_dir>/<table name>.csv."""
    database = {}
    for table in catalog.tables:
        path = Path(data_dir) / f"{table.name}.csv"
        if not path.exists():
            raise GateLensError(f"no data file for table {table.name!r}: {path}")
        database[table.name] = load_csv(path, table)
    return database


@click.group()
@click.option("--no-optimize", is_flag=True, help="Disable the plan rewriter.")
@click.option("--provider", "provider_kind",
              type=click.Choice(["live", "replay", "record"]), default="replay",
              show_default=True, help="Model provider mode.")
@click.option("--fixtures", default="fixtures", show_default=True,
              help="Directory of recorded responses.")
@click.pass_context
def main(ctx, no_optimize, provider_kind, fixtures):
    """Release analytics over tabular test results via relational algebra."""
    ctx.ensure_object(dict)
    ctx.obj["optimize"] = not no_optimize
    ctx.obj["provider_kind"] = provider_kind
    ctx.obj["fixtures"] = fixtures


@main.command("parse")
@click.argument("source")
def parse_cmd(source):
    """Parse RA text from a file (or - for stdin); echo the canonical form."""
    text = sys.stdin.read() if source == "-" else Path(source).read_text("utf-8")
    try:
        expr = parse(text)
    except ParseError as exc:
        raise click.ClickException(str(exc))
    click.echo(format_ra(expr))


@main.command("exec")
@click.option("--ra", required=True, help="RA expression text.")
@click.option("--catalog", "catalog_path", required=True)
@click.option("--data", "data_dir", required=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv",
              show_default=True)
@click.pass_context
def exec_cmd(ctx, ra, catalog_path, data_dir, fmt):
    """Execute an RA expression directly, bypassing the model."""
    from .kb import bind_and_repair

    try:
        catalog = load_catalog(catalog_path)
        database = load_database(catalog, data_dir)
        expr, _ = bind_and_repair(parse(ra), catalog)
        if ctx.obj["optimize"]:
            expr = optimize(expr, catalog)
        result = execute(compile_plan(expr, catalog), database)
    except GateLensError as exc:
        raise click.ClickException(str(exc))
    if fmt == "jsonl":
        from .wire import relation_payload
        click.echo(json.dumps(relation_payload(result)))
    else:
        click.echo(relation_to_csv(result), nl=False)


@main.command("query")
@click.option("--q", "question", required=True, help="Natural-language question.")
@click.option("--catalog", "catalog_path", required=True)
@click.option("--data", "data_dir", required=True)
@click.option("--shots", type=int, default=0, show_default=True)
@click.option("--examples", "examples_path", default=None,
              help="Few-shot example pool (JSONL).")
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl", "text"]),
              default="text", show_default=True)
@click.pass_context
def query_cmd(ctx, question, catalog_path, data_dir, shots, examples_path, fmt):
    """Run the full question -> answer pipeline (one model call)."""
    try:
        catalog = load_catalog(catalog_path)
        database = load_database(catalog, data_dir)
        pool = load_examples(examples_path) if examples_path else ()
        if shots > len(pool):
            raise click.ClickException(
                f"--shots {shots} needs an example pool of at least that size"
            )
        provider = build_provider(ctx.obj["provider_kind"], ctx.obj["fixtures"])
        outcome = run_query(question, catalog, database, provider,
                            PipelineOptions(examples=tuple(pool[:shots]),
                                            optimize=ctx.obj["optimize"]))
    except GateLensError as exc:
        raise click.ClickException(str(exc))

    if fmt == "jsonl":
        click.echo(json.dumps(outcome_payload(outcome)))
        sys.exit(0 if isinstance(outcome, Answered) else 1)
    if isinstance(outcome, Answered):
        if fmt == "csv":
            click.echo(relation_to_csv(outcome.result), nl=False)
        else:
            click.echo(f"RA:        {outcome.ra_text}")
            if outcome.optimized_ra_text != outcome.ra_text:
                click.echo(f"optimized: {outcome.optimized_ra_text}")
            for res in outcome.resolutions:
                click.echo(f"resolved:  {res.requested} -> {res.resolved} "
                           f"({res.method})")
            click.echo(relation_to_csv(outcome.result), nl=False)
        return
    if isinstance(outcome, Rejected):
        raise click.ClickException(f"rejected ({outcome.stage}): {outcome.reason}")
    raise click.ClickException(f"failed ({outcome.stage}): {outcome.error}")


@main.command("eval")
@click.option("--bench", "bench_path", required=True, help="Benchmark JSONL.")
@click.option("--catalog", "catalog_path", required=True)
@click.option("--data", "data_dir", required=True)
@click.option("--shots", default="0", show_default=True,
              help="Comma-separated shot counts, e.g. 0,2,4.")
@click.option("--examples", "examples_path", default=None)
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]),
              default="table", show_default=True)
@click.pass_context
def eval_cmd(ctx, bench_path, catalog_path, data_dir, shots, examples_path, fmt):
    """Score a benchmark; one full pass per shot count."""
    try:
        shot_list = [int(s) for s in shots.split(",") if s.strip() != ""]
    except ValueError:
        raise click.UsageError(f"bad --shots value: {shots!r}")
    try:
        catalog = load_catalog(catalog_path)
        database = load_database(catalog, data_dir)
        records = load_records(bench_path)
        pool = load_examples(examples_path) if examples_path else ()
        provider = build_provider(ctx.obj["provider_kind"], ctx.obj["fixtures"])
        runs = run_benchmark(records, catalog, database, provider,
                             shots=shot_list, example_pool=pool,
                             optimize=ctx.obj["optimize"])
    except BenchmarkAbort as exc:
        raise click.ClickException(str(exc))
    except (GateLensError, ValueError) as exc:
        raise click.ClickException(str(exc))

    any_failed = False
    for run in runs:
        any_failed |= run.failed > 0
        if fmt == "csv":
            click.echo(f"shots,{run.shots}")
            click.echo(run.report.to_csv(), nl=False)
        else:
            click.echo(f"=== shots: {run.shots} ===")
            click.echo(run.report.to_text(), nl=False)
            if run.failed:
                click.echo(f"(failed outcomes: {run.failed})")
    if any_failed and ctx.obj["provider_kind"] == "replay":
        sys.exit(1)


@main.command("serve")
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--catalog", "catalog_path", required=True)
@click.option("--data", "data_dir", required=True)
@click.option("--examples", "examples_path", default=None)
@click.pass_context
def serve_cmd(ctx, port, host, catalog_path, data_dir, examples_path):
    """Serve the HTTP API for the query console."""
    import uvicorn

    from .service import create_app

    try:
        catalog = load_catalog(catalog_path)
        database = load_database(catalog, data_dir)
        pool = load_examples(examples_path) if examples_path else ()
        provider = build_provider(ctx.obj["provider_kind"], ctx.obj["fixtures"])
    except GateLensError as exc:
        raise click.ClickException(str(exc))
    app = create_app(catalog, database, provider, example_pool=pool,
                     optimize=ctx.obj["optimize"])
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("schema")
@click.option("--catalog", "catalog_path", required=True)
def schema_cmd(catalog_path):
    """Print the prompt-facing rendering of a catalog."""
    try:
        click.echo(render_schema_prompt(load_catalog(catalog_path)), nl=False)
    except (GateLensError, OSError, ValueError) as exc:
        raise click.ClickException(str(exc))


if __name__ == "__main__":
    main()
