import io

import pytest

from kgforage import errors
from kgforage.graph_store import KnowledgeGraph, load_fixture
from kgforage.sparql_exec import execute_select
from kgforage.values import Value

from conftest import MINI


def test_empty_stream():
    g = load_fixture(b"")
    assert len(g.entities) == 0
    assert g.statement_count == 0


def test_mini_fixture_counts(mini_graph):
    assert len(mini_graph.entities) == 3
    assert len(mini_graph.properties) == 5
    assert mini_graph.statement_count == 12


def test_unknown_entity_reference():
    lines = (
        '{"kind":"property","id":"P1","label":"population","datatype":"number"}\n'
        '{"kind":"statement","subject":"Q99","property":"P1","value":{"number":1}}\n'
    )
    with pytest.raises(errors.ReferenceError_):
        load_fixture(lines)


def test_malformed_line_reports_line_number():
    with pytest.raises(errors.ParseError) as exc:
        load_fixture('{"kind":"entity","id":"Q1"}\nnot json\n')
    assert exc.value.line == 2


def test_value_kind_must_match_datatype():
    lines = (
        '{"kind":"entity","id":"Q1","label":"A"}\n'
        '{"kind":"property","id":"P1","label":"population","datatype":"number"}\n'
        '{"kind":"statement","subject":"Q1","property":"P1","value":{"string":"ten"}}\n'
    )
    with pytest.raises(errors.ParseError):
        load_fixture(lines)


def test_statements_of_population(mini_graph):
    stmts = mini_graph.statements_of("Q1", "P1")
    assert [s.value.value for s in stmts] == [100, 200, 300]


def test_statements_of_missing_property(mini_graph):
    assert mini_graph.statements_of("Q3", "P1") == []


def test_statements_of_unknown_entity(mini_graph):
    with pytest.raises(errors.UnknownEntity):
        mini_graph.statements_of("Q99")


def test_search_exact_label(mini_graph):
    results = mini_graph.search_entities("Atlantis")
    assert [r.id for r in results] == ["Q1"]


def test_search_case_insensitive(mini_graph):
    assert [r.id for r in mini_graph.search_entities("atlantis")] == ["Q1"]


def test_search_alias(mini_graph):
    assert [r.id for r in mini_graph.search_entities("ATL")] == ["Q1"]


def test_search_no_match(mini_graph):
    assert mini_graph.search_entities("Zephyria") == []
    assert mini_graph.search_entities("") == []


def test_search_is_stable(mini_graph):
    a = mini_graph.search_entities("atlantis")
    b = mini_graph.search_entities("atlantis")
    assert a == b


def test_roundtrip_serialize():
    original = MINI.read_bytes()
    g = load_fixture(original)
    again = load_fixture(g.serialize())
    assert again.entities == g.entities
    assert again.properties == g.properties
    assert again.statements == g.statements


def test_single_pattern_query_matches_statements_of(mini_graph):
    for eid in mini_graph.entities:
        for pid in mini_graph.properties:
            table = execute_select(
                mini_graph,
                f"SELECT ?v WHERE {{ VALUES ?e {{ {eid} }} ?e {pid} ?v }}",
            )
            got = sorted((v.kind, str(v.value)) for v in table.column("v"))
            want = sorted(
                (s.value.kind, str(s.value.value))
                for s in mini_graph.statements_of(eid, pid)
            )
            assert got == want
