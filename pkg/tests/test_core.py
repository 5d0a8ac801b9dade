"""Value model, schemas, schema inference and the canonical printer."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import gen_catalog_db, gen_expr
from gatelens import ast
from gatelens.errors import (
    DuplicateOutputColumnError,
    InvalidDivisionError,
    NotUnionCompatibleError,
    TypeMismatchError,
    UnknownColumnError,
    UnknownTableError,
)
from gatelens.infer import _union_schema, infer_schema
from gatelens.printer import format_ra
from gatelens.schema import Catalog, Column, TableSchema
from gatelens.values import ColumnType, parse_date, promote, sort_key, values_equal


def scan(table="results"):
    return ast.Scan(table)


class TestValues:
    def test_numeric_promotion(self):
        assert promote("int", "float") == "float"
        assert promote("float", "int") == "float"
        assert promote("int", "int") == "int"
        assert promote("bool", "int") is None

    def test_date_parsing_is_strict(self):
        assert parse_date("2024-01-31").month == 1
        for bad in ("2024-13-01", "2024-1-1", "20240101", "01-01-2024"):
            with pytest.raises(ValueError):
                parse_date(bad)

    def test_total_order_ranks(self):
        from datetime import date
        ordered = [None, False, True, -1, 0.5, 3, "a", "b", date(2024, 1, 1)]
        assert sorted(ordered, key=sort_key) == ordered

    def test_float_tolerance(self):
        assert values_equal(1.0, 1.0 + 1e-12)
        assert not values_equal(1.0, 1.0 + 1e-6)
        assert values_equal(1, 1.0)
        assert not values_equal(True, 1)


class TestSchema:
    def test_duplicate_columns_rejected_case_insensitively(self):
        with pytest.raises(ValueError):
            TableSchema("t", (
                Column("Name", ColumnType("text")),
                Column("name", ColumnType("text")),
            ))

    def test_case_insensitive_lookup_returns_canonical(self, toy_catalog):
        table = toy_catalog.find("Results")
        assert table.name == "results"
        assert table.find("TEST_RESULT").name == "test_result"

    def test_identifier_validation(self):
        with pytest.raises(ValueError):
            TableSchema("bad name", ())


class TestInferSchema:
    def test_scan_is_verbatim(self, toy_catalog):
        assert infer_schema(scan(), toy_catalog) == toy_catalog.find("results")

    def test_project_subsets_columns(self, toy_catalog):
        schema = infer_schema(ast.Project(("name",), scan()), toy_catalog)
        assert [c.name for c in schema.columns] == ["name"]
        assert schema.columns[0].type.kind == "text"

    def test_union_takes_names_from_left(self, toy_catalog):
        # both sides text; forced by the union-compatibility rule
        left = ast.Project(("name",), scan())
        right = ast.Project(("test_result",), scan())
        schema = infer_schema(ast.Union_(left, right), toy_catalog)
        assert [c.name for c in schema.columns] == ["name"]
        assert schema.columns[0].type.kind == "text"

    def test_unknown_table_and_column(self, toy_catalog):
        with pytest.raises(UnknownTableError):
            infer_schema(scan("nope"), toy_catalog)
        with pytest.raises(UnknownColumnError):
            infer_schema(ast.Project(("nope",), scan()), toy_catalog)

    def test_union_incompatible(self, toy_catalog):
        left = ast.Project(("name",), scan())
        right = ast.Project(("duration",), scan())
        with pytest.raises(NotUnionCompatibleError):
            infer_schema(ast.Union_(left, right), toy_catalog)

    def test_times_collision_demands_rename(self, toy_catalog):
        with pytest.raises(DuplicateOutputColumnError) as err:
            infer_schema(ast.Times(scan(), scan("trucks")), toy_catalog)
        assert "rename" in str(err.value)

    def test_division_subset_rule(self, toy_catalog):
        bad = ast.Divide(ast.Project(("name",), scan()),
                         ast.Project(("test_result",), scan()))
        with pytest.raises(InvalidDivisionError):
            infer_schema(bad, toy_catalog)

    def test_duplicate_projection(self, toy_catalog):
        with pytest.raises(DuplicateOutputColumnError):
            infer_schema(ast.Project(("name", "name"), scan()), toy_catalog)

    def test_aggregate_type_rules(self, toy_catalog):
        sum_text = ast.GroupBy((), (ast.Aggregate("sum", "name", "s"),), scan())
        with pytest.raises(TypeMismatchError):
            infer_schema(sum_text, toy_catalog)
        # min over date is fine (ordered kind)
        ok = ast.GroupBy((), (ast.Aggregate("min", "executed_on", "first"),), scan())
        assert infer_schema(ok, toy_catalog).columns[0].type.kind == "date"

    def test_date_text_literal_coercion(self, toy_catalog):
        pred = ast.Comparison("==", ast.ColumnRef("executed_on"),
                              ast.Literal("2025-06-01"))
        infer_schema(ast.Select(pred, scan()), toy_catalog)
        bad = ast.Comparison("==", ast.ColumnRef("executed_on"),
                             ast.Literal("not a date"))
        with pytest.raises(TypeMismatchError):
            infer_schema(ast.Select(bad, scan()), toy_catalog)

    def test_never_duplicate_output_names(self):
        rng = random.Random(5)
        for _ in range(300):
            catalog, _ = gen_catalog_db(rng)
            expr = gen_expr(rng, catalog)
            names = [c.name.lower()
                     for c in infer_schema(expr, catalog).columns]
            assert len(names) == len(set(names))

    @given(st.lists(
        st.sampled_from(["bool", "int", "float", "text", "date"]),
        min_size=1, max_size=4,
    ), st.lists(
        st.sampled_from(["bool", "int", "float", "text", "date"]),
        min_size=1, max_size=4,
    ))
    def test_union_compatibility_is_symmetric(self, left_kinds, right_kinds):
        def make(kinds, prefix):
            return TableSchema("t", tuple(
                Column(f"{prefix}{i}", ColumnType(k))
                for i, k in enumerate(kinds)
            ))

        left = make(left_kinds, "l")
        right = make(right_kinds, "r")

        def accepts(a, b):
            try:
                _union_schema("union", a, b)
                return True
            except NotUnionCompatibleError:
                return False

        assert accepts(left, right) == accepts(right, left)


class TestFormatRa:
    def test_select_prints_directly(self):
        expr = ast.Select(
            ast.Comparison("==", ast.ColumnRef("test_result"),
                           ast.Literal("NOK")),
            scan(),
        )
        assert format_ra(expr) == 'select[test_result == "NOK"](results)'

    def test_scan_prints_bare_name(self):
        assert format_ra(scan()) == "results"

    def test_groupby_print(self):
        expr = ast.GroupBy(("name",),
                           (ast.Aggregate("count_star", None, "n"),), scan())
        assert format_ra(expr) == "groupby[name; count(*) as n](results)"

    def test_empty_keys_groupby(self):
        expr = ast.GroupBy((), (ast.Aggregate("avg", "duration", "m"),), scan())
        assert format_ra(expr) == "groupby[; avg(duration) as m](results)"

    def test_string_escaping(self):
        expr = ast.Select(
            ast.Comparison("==", ast.ColumnRef("name"),
                           ast.Literal('a"b\\c')),
            scan(),
        )
        text = format_ra(expr)
        assert text == 'select[name == "a\\"b\\\\c"](results)'
