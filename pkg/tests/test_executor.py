"""CSV loading, plan compilation and operator semantics."""

import io
import random
from datetime import date

import pytest

from gen import gen_catalog_db, gen_expr
from oracle import evaluate, relation_to_table, tables_equal
from gatelens import ast
from gatelens.errors import (
    DuplicateOutputColumnError,
    HeaderMismatchError,
    InvalidDivisionError,
    NullInNonNullableError,
    TypeParseError,
    UnknownTableError,
)
from gatelens.parser import parse
from gatelens.plan import compile_plan, execute
from gatelens.relation import Relation, canonically_equal, load_csv, relation_to_csv
from gatelens.schema import Catalog, Column, TableSchema
from gatelens.values import ColumnType


def run(text, catalog, db):
    return execute(compile_plan(parse(text), catalog), db)


class TestLoadCsv:
    def test_header_order_free_case_insensitive(self, toy_catalog):
        text = "Test_Result,NAME,duration,executed_on\nOK,truck1,1.5,2025-06-01\n"
        rel = load_csv(io.StringIO(text), toy_catalog.find("results"))
        assert rel.rows == (("truck1", "OK", 1.5, date(2025, 6, 1)),)

    def test_invalid_month_is_type_error(self, toy_catalog):
        text = "name,test_result,duration,executed_on\nt,OK,1.0,2024-13-01\n"
        with pytest.raises(TypeParseError) as err:
            load_csv(io.StringIO(text), toy_catalog.find("results"))
        assert err.value.row == 1
        assert err.value.column == "executed_on"

    def test_empty_cell_nullable_becomes_null(self):
        schema = TableSchema("t", (Column("n", ColumnType("int", True)),))
        rel = load_csv(io.StringIO("n\n\n7\n"), schema)
        assert rel.rows == ((None,), (7,))

    def test_empty_cell_non_nullable_rejected(self):
        schema = TableSchema("t", (Column("n", ColumnType("int")),))
        with pytest.raises(NullInNonNullableError):
            load_csv(io.StringIO("n\n\n"), schema)

    def test_header_mismatch(self, toy_catalog):
        with pytest.raises(HeaderMismatchError):
            load_csv(io.StringIO("name,bogus\nx,y\n"),
                     toy_catalog.find("results"))

    def test_missing_header(self, toy_catalog):
        with pytest.raises(HeaderMismatchError):
            load_csv(io.StringIO(""), toy_catalog.find("results"))

    def test_rfc4180_quoting_round_trip(self):
        schema = TableSchema("t", (
            Column("a", ColumnType("text")),
            Column("b", ColumnType("float", True)),
        ))
        rel = Relation(schema, (('say "hi", ok', 1.25), ("plain", None)))
        text = relation_to_csv(rel)
        assert load_csv(io.StringIO(text), schema) == rel

    def test_non_finite_floats_rejected(self):
        schema = TableSchema("t", (Column("x", ColumnType("float")),))
        for bad in ("nan", "inf", "-inf"):
            with pytest.raises(TypeParseError):
                load_csv(io.StringIO(f"x\n{bad}\n"), schema)

    def test_bom_tolerated_on_file_paths(self, tmp_path):
        schema = TableSchema("t", (Column("n", ColumnType("int")),))
        path = tmp_path / "t.csv"
        path.write_bytes(b"\xef\xbb\xbfn\n3\n")
        assert load_csv(path, schema).rows == ((3,),)


class TestCompile:
    def test_scan_compiles_to_single_node(self, toy_catalog):
        plan = compile_plan(parse("results"), toy_catalog)
        assert len(list(plan.nodes())) == 1

    def test_collision_requires_rename(self, toy_catalog):
        with pytest.raises(DuplicateOutputColumnError) as err:
            compile_plan(parse("join[model == model](results, trucks)"),
                         toy_catalog)
        assert "rename" in str(err.value)

    def test_qualified_names_do_not_parse(self):
        from gatelens.errors import ParseError
        with pytest.raises(ParseError):
            parse("join[a.x == b.x](a, b)")

    def test_invalid_division(self, toy_catalog):
        with pytest.raises(InvalidDivisionError):
            compile_plan(parse("divide(project[name](results), results)"),
                         toy_catalog)

    def test_missing_table_at_execute(self, toy_catalog):
        plan = compile_plan(parse("results"), toy_catalog)
        with pytest.raises(UnknownTableError):
            execute(plan, {})


class TestExecute:
    def test_select_nok(self, toy_catalog):
        # mirrors "truck names where test results are NOK", hand-evaluated
        schema = TableSchema("results", (
            Column("name", ColumnType("text")),
            Column("test_result", ColumnType("text")),
        ))
        catalog = Catalog((schema,))
        db = {"results": Relation(schema, (("truck1", "OK"), ("truck2", "NOK")))}
        out = run('select[test_result == "NOK"](results)', catalog, db)
        assert out.rows == (("truck2", "NOK"),)

    def test_divide_by_hand(self):
        # L = {(1,x),(1,y),(2,x)}  /  R = {(x),(y)}  ->  {(1)}
        left = TableSchema("l", (Column("a", ColumnType("int")),
                                 Column("b", ColumnType("text"))))
        right = TableSchema("r", (Column("b", ColumnType("text")),))
        catalog = Catalog((left, right))
        db = {
            "l": Relation(left, ((1, "x"), (1, "y"), (2, "x"))),
            "r": Relation(right, (("x",), ("y",))),
        }
        out = run("divide(l, r)", catalog, db)
        assert out.rows == ((1,),)

    def test_divide_empty_divisor_is_vacuous(self):
        left = TableSchema("l", (Column("a", ColumnType("int")),
                                 Column("b", ColumnType("text"))))
        right = TableSchema("r", (Column("b", ColumnType("text")),))
        catalog = Catalog((left, right))
        db = {
            "l": Relation(left, ((1, "x"), (2, "y"), (1, "y"))),
            "r": Relation(right, ()),
        }
        out = run("divide(l, r)", catalog, db)
        assert out.rows == ((1,), (2,))  # distinct projection of L onto {a}

    def test_count_star_over_empty_relation(self, toy_catalog):
        schema = toy_catalog.find("results")
        db = {"results": Relation(schema, ())}
        out = run("groupby[; count(*) as n](results)", toy_catalog, db)
        assert out.rows == ((0,),)

    def test_grouped_aggregate_over_empty_input_has_no_groups(self, toy_catalog):
        schema = toy_catalog.find("results")
        db = {"results": Relation(schema, ())}
        out = run("groupby[name; avg(duration) as d](results)", toy_catalog, db)
        assert out.rows == ()

    def test_empty_keys_empty_input_non_count_aggregates_are_null(self, toy_catalog):
        schema = toy_catalog.find("results")
        db = {"results": Relation(schema, ())}
        out = run("groupby[; count(*) as n, avg(duration) as d, "
                  "min(name) as m](results)", toy_catalog, db)
        assert out.rows == ((0, None, None),)

    def test_null_semantics(self, toy_catalog, toy_db):
        # comparisons with null are false in both polarities
        hits = run("select[duration > 0](results)", toy_catalog, toy_db)
        assert all(r[2] is not None for r in hits.rows)
        misses = run("select[not (duration > 0)](results)", toy_catalog, toy_db)
        assert ("truck3", "NOK", None, date(2025, 6, 2)) in misses.rows

    def test_aggregates_skip_nulls(self, toy_catalog, toy_db):
        out = run("groupby[; count(duration) as c, count(*) as n, "
                  "avg(duration) as a](results)", toy_catalog, toy_db)
        c, n, a = out.rows[0]
        assert (c, n) == (4, 5)
        assert a == pytest.approx((12.5 + 95.0 + 11.0 + 94.5) / 4)

    def test_avg_of_all_null_group_is_null(self, toy_catalog):
        schema = toy_catalog.find("results")
        db = {"results": Relation(schema, (
            ("t1", "OK", None, date(2025, 1, 1)),
            ("t1", "OK", None, date(2025, 1, 2)),
        ))}
        out = run("groupby[name; avg(duration) as a](results)", toy_catalog, db)
        assert out.rows == (("t1", None),)

    def test_set_operators_deduplicate(self, toy_catalog, toy_db):
        out = run("union(project[name](results), project[name](results))",
                  toy_catalog, toy_db)
        assert sorted(out.rows) == [("truck1",), ("truck2",), ("truck3",)]
        out = run("intersect(project[name](results), project[name](trucks))",
                  toy_catalog, toy_db)
        assert len(out.rows) == len(set(out.rows)) == 3

    def test_sort_is_stable(self, toy_catalog, toy_db):
        out = run("sort[test_result](results)", toy_catalog, toy_db)
        noks = [r for r in out.rows if r[1] == "NOK"]
        in_order = [r for r in toy_db["results"].rows if r[1] == "NOK"]
        assert noks == in_order

    def test_sort_nulls_first_asc_last_desc(self, toy_catalog, toy_db):
        asc = run("sort[duration](results)", toy_catalog, toy_db)
        assert asc.rows[0][2] is None
        desc = run("sort[duration desc](results)", toy_catalog, toy_db)
        assert desc.rows[-1][2] is None

    def test_select_subset_project_conserves_count(self, toy_catalog, toy_db):
        selected = run('select[test_result == "NOK"](results)',
                       toy_catalog, toy_db)
        assert set(selected.rows) <= set(toy_db["results"].rows)
        projected = run("project[name](results)", toy_catalog, toy_db)
        assert len(projected.rows) == len(toy_db["results"].rows)

    def test_hash_join_matches_nested_loop_order(self, toy_catalog, toy_db):
        # equality conjunct triggers the hash path; residual conjunct filters
        joined = run(
            "join[name == truck and year >= 2023]"
            "(results, rename[name -> truck](trucks))",
            toy_catalog, toy_db,
        )
        rows = list(toy_db["results"].rows)
        expected = [
            lr + rr
            for lr in rows
            for rr in toy_db["trucks"].rows
            if lr[0] == rr[0] and rr[2] >= 2023
        ]
        assert list(joined.rows) == expected

    def test_rows_in_counters_populated(self, toy_catalog, toy_db):
        plan = compile_plan(parse('select[test_result == "NOK"](results)'),
                            toy_catalog)
        execute(plan, toy_db)
        counters = [node.rows_in for node in plan.nodes()]
        assert counters == [5, 5]


class TestOracleEquivalence:
    def test_small_corpus_matches_reference(self):
        rng = random.Random(2025)
        for _ in range(250):
            catalog, db = gen_catalog_db(rng)
            expr = gen_expr(rng, catalog)
            got = execute(compile_plan(expr, catalog), db)
            want = evaluate(expr, {
                name.lower(): relation_to_table(rel)
                for name, rel in db.items()
            })
            assert tables_equal(relation_to_table(got), want,
                                ordered=isinstance(expr, ast.Sort))


class TestCanonicalComparison:
    def test_column_order_normalized_row_order_free(self):
        a_schema = TableSchema("a", (Column("x", ColumnType("int")),
                                     Column("y", ColumnType("text"))))
        b_schema = TableSchema("b", (Column("y", ColumnType("text")),
                                     Column("x", ColumnType("int"))))
        a = Relation(a_schema, ((1, "p"), (2, "q")))
        b = Relation(b_schema, (("q", 2), ("p", 1)))
        assert canonically_equal(a, b)
        assert not canonically_equal(a, b, ordered=True)

    def test_float_tolerance(self):
        schema = TableSchema("t", (Column("x", ColumnType("float")),))
        a = Relation(schema, ((1.0,),))
        b = Relation(schema, ((1.0 + 1e-12,),))
        assert canonically_equal(a, b)
