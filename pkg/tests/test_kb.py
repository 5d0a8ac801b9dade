"""Identifier resolution tiers, prompt rendering, bind-and-repair."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gatelens.errors import AmbiguousError, UnresolvedError
from gatelens.kb import (
    bind_and_repair,
    levenshtein,
    render_schema_prompt,
    resolve_identifier,
)
from gatelens.parser import parse
from gatelens.printer import format_ra
from gatelens.schema import Catalog, Column, TableSchema
from gatelens.values import ColumnType

CANDS = [
    ("name", ("truck", "trucks")),
    ("test_result", ()),
    ("duration", ("runtime",)),
]


class TestLevenshtein:
    @pytest.mark.parametrize("a,b,d", [
        ("", "", 0), ("a", "", 1), ("", "ab", 2),
        ("kitten", "sitting", 3), ("tst_result", "test_result", 1),
        ("abc", "abc", 0),
    ])
    def test_known_distances(self, a, b, d):
        assert levenshtein(a, b) == d

    @given(st.text(max_size=12), st.text(max_size=12))
    def test_symmetric(self, a, b):
        assert levenshtein(a, b) == levenshtein(b, a)


class TestResolveIdentifier:
    def test_normalized_strips_spaces(self):
        res = resolve_identifier("Test Result", CANDS)
        assert (res.resolved, res.method) == ("test_result", "normalized")

    def test_synonym_maps_truck_to_name(self):
        res = resolve_identifier("truck", CANDS)
        assert (res.resolved, res.method) == ("name", "synonym")

    def test_edit_distance_single_deletion(self):
        res = resolve_identifier("tst_result", CANDS)
        assert (res.resolved, res.method, res.distance) == \
            ("test_result", "edit_distance", 1)

    def test_unresolved(self):
        with pytest.raises(UnresolvedError):
            resolve_identifier("xyz", CANDS)

    def test_exact_beats_everything(self):
        cands = [("name", ()), ("Name2", ("name",))]
        res = resolve_identifier("name", cands)
        assert (res.resolved, res.method) == ("name", "exact")

    def test_edit_distance_tie_is_ambiguous(self):
        with pytest.raises(AmbiguousError) as err:
            resolve_identifier("ax", [("ab", ()), ("ay", ())])
        assert set(err.value.candidates) == {"ab", "ay"}

    def test_distance_beyond_cap_unresolved(self):
        with pytest.raises(UnresolvedError):
            resolve_identifier("qqq", [("abcdef", ())])

    def test_distance_zero_except_edit_distance(self):
        for requested in ("name", "NAME", "truck", "Test Result"):
            res = resolve_identifier(requested, CANDS)
            assert res.distance == 0

    @given(st.permutations(CANDS))
    def test_order_independent(self, shuffled):
        res = resolve_identifier("Test Result", list(shuffled))
        assert res.resolved == "test_result"


class TestRenderSchemaPrompt:
    def test_contains_columns_and_types(self, toy_catalog):
        text = render_schema_prompt(toy_catalog)
        for needle in ("name", "test_result", "text", "float", "date",
                       "release gate tests"):
            assert needle in text

    def test_empty_catalog(self):
        assert "No tables" in render_schema_prompt(Catalog(()))

    def test_synonyms_listed(self, toy_catalog):
        assert "truck" in render_schema_prompt(toy_catalog)

    def test_deterministic(self, toy_catalog):
        assert render_schema_prompt(toy_catalog) == \
            render_schema_prompt(toy_catalog)


class TestBindAndRepair:
    def test_repairs_case_variants(self, toy_catalog):
        expr = parse('select[Test_Result == "NOK"](Results)')
        repaired, notes = bind_and_repair(expr, toy_catalog)
        assert format_ra(repaired) == 'select[test_result == "NOK"](results)'
        assert len(notes) == 2
        assert {n.method for n in notes} == {"case_fold"}

    def test_canonical_expression_untouched(self, toy_catalog):
        expr = parse('select[test_result == "NOK"](results)')
        repaired, notes = bind_and_repair(expr, toy_catalog)
        assert repaired == expr
        assert notes == []

    def test_unresolved_column_fails_closed(self, toy_catalog):
        # no data grounding: nothing in the schema resembles "beauty"
        expr = parse("select[beauty == 1](results)")
        with pytest.raises(UnresolvedError) as err:
            bind_and_repair(expr, toy_catalog)
        assert err.value.requested == "beauty"

    def test_idempotent(self, toy_catalog):
        expr = parse('project[Truck](sort[Duration desc](results))')
        once, notes = bind_and_repair(expr, toy_catalog)
        assert notes
        twice, second_notes = bind_and_repair(once, toy_catalog)
        assert twice == once
        assert second_notes == []

    def test_synonym_repair_through_projection(self, toy_catalog):
        # synonyms survive a projection, so "truck" resolves above it
        expr = parse('select[truck == "truck1"](project[name](results))')
        repaired, notes = bind_and_repair(expr, toy_catalog)
        assert format_ra(repaired) == \
            'select[name == "truck1"](project[name](results))'
        assert notes[0].method == "synonym"

    def test_join_scope_spans_both_sides(self, toy_catalog):
        expr = parse('join[Truck == owner](results, '
                     'rename[name -> owner](trucks))')
        repaired, _ = bind_and_repair(expr, toy_catalog)
        assert "name == owner" in format_ra(repaired)

    def test_table_synonym_resolution_via_edit_distance(self, toy_catalog):
        expr = parse("resuts")  # typo'd table name
        repaired, notes = bind_and_repair(expr, toy_catalog)
        assert format_ra(repaired) == "results"
        assert notes[0].method == "edit_distance"
