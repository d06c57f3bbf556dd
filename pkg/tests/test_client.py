import json

import pytest

from kgforage import query_gen
from kgforage.client import ENDPOINT_ENV, BackendConfig, KgClient, normalize_cell
from kgforage.errors import BackendUnavailable, EmptyCell, QueryRejected
from kgforage.graph_store import KnowledgeGraph, EntityInfo, PropertyInfo
from kgforage.sparql_exec import execute_select
from kgforage.values import Value


class StubResponse:
    def __init__(self, payload, status=200):
        self.payload = payload
        self.status_code = status
        self.text = json.dumps(payload)

    def json(self):
        return self.payload

    def raise_for_status(self):
        if self.status_code >= 400:
            raise RuntimeError(f"HTTP {self.status_code}")


class StubSession:
    def __init__(self, sparql=None, search=None, status=200, fail=False):
        self.sparql = sparql or {"head": {"vars": []}, "results": {"bindings": []}}
        self.search = search or {"search": []}
        self.status = status
        self.fail = fail
        self.posts = []
        self.gets = []

    def post(self, url, data=None, headers=None, timeout=None):
        if self.fail:
            raise ConnectionError("boom")
        self.posts.append(data["query"])
        return StubResponse(self.sparql, self.status)

    def get(self, url, params=None, timeout=None):
        if self.fail:
            raise ConnectionError("boom")
        self.gets.append(params)
        return StubResponse(self.search, self.status)


def remote_cfg(**kw):
    return BackendConfig(
        kind="remote",
        sparql_url="http://example.test/sparql",
        entity_search_url="http://example.test/api",
        **kw,
    )


# ----------------------------------------------------------------- local

def test_local_resolve(mini_client):
    result = mini_client.resolve("Borduria")
    assert result.chosen == "Q2"
    assert result.candidates[0].score == 1.0


def test_local_resolve_no_match(mini_client):
    result = mini_client.resolve("Zephyria")
    assert result.candidates == ()
    assert result.chosen is None


def test_resolve_empty_cell(mini_client):
    with pytest.raises(EmptyCell):
        mini_client.resolve("   ")


def test_resolve_is_cached_and_deterministic(mini_client):
    a = mini_client.resolve("  Borduria  ")
    b = mini_client.resolve("Borduria")
    assert a is b  # normalized text shares one cache slot


def test_normalize_cell():
    assert normalize_cell("  New   York ") == "New York"


def test_local_run_select_equals_executor(mini_client, mini_graph):
    query = "SELECT ?e ?p ?v WHERE { ?e ?p ?v }"
    got = mini_client.run_select(query)
    want = execute_select(mini_graph, query)
    assert got.as_tuples() == want.as_tuples()


def test_local_empty_result(mini_client):
    t = mini_client.run_select("SELECT ?v WHERE { VALUES ?e { Q3 } ?e P1 ?v }")
    assert t.rows == []


def _wide_graph(n=120):
    g = KnowledgeGraph()
    g.properties["P1"] = PropertyInfo(id="P1", label="score", datatype="number")
    for i in range(n):
        eid = f"E{i:03d}"
        g.entities[eid] = EntityInfo(id=eid, label=f"Item {i}")
        g.statements[(eid, "P1")] = [Value.number(i)]
    return g


def test_batching_invariance():
    g = _wide_graph()
    entities = sorted(g.entities)
    template = query_gen.compile_property_values("P1", None)
    results = {}
    for batch_size in (1, 7, 50, 200):
        client = KgClient(
            BackendConfig(kind="local", fixture_path="-", batch_size=batch_size), graph=g
        )
        table = client.run_select_batched(template, entities)
        results[batch_size] = sorted(map(repr, table.as_tuples()))
    assert len({json.dumps(v) for v in results.values()}) == 1
    assert len(results[50]) == 120


def test_chunk_count():
    counting = []
    g = _wide_graph()

    class CountingClient(KgClient):
        def run_select(self, query):
            counting.append(query)
            return super().run_select(query)

    client = CountingClient(
        BackendConfig(kind="local", fixture_path="-", batch_size=50), graph=g
    )
    template = query_gen.compile_property_values("P1", None)
    client.run_select_batched(template, sorted(g.entities))
    assert len(counting) == 3

    counting.clear()
    client.run_select_batched(template, sorted(g.entities)[:3])
    assert len(counting) == 1


# ----------------------------------------------------------------- remote

def test_remote_select_parses_sparql_json():
    payload = {
        "head": {"vars": ["e", "x1"]},
        "results": {
            "bindings": [
                {
                    "e": {"type": "uri", "value": "http://www.wikidata.org/entity/Q42"},
                    "x1": {
                        "type": "literal",
                        "value": "42.5",
                        "datatype": "http://www.w3.org/2001/XMLSchema#decimal",
                    },
                },
                {
                    "e": {"type": "uri", "value": "http://www.wikidata.org/entity/Q42"},
                    "x1": {"type": "literal", "value": "plain"},
                },
            ]
        },
    }
    client = KgClient(remote_cfg(), session=StubSession(sparql=payload))
    table = client.run_select(query_gen.compile_property_values("P1", ["Q42"], dialect="wikidata"))
    assert table.rows[0]["e"] == Value.entity("Q42")
    assert table.rows[0]["x1"] == Value.number(42.5)
    assert table.rows[1]["x1"] == Value.string("plain")


def test_remote_query_rejected():
    client = KgClient(remote_cfg(), session=StubSession(status=400))
    with pytest.raises(QueryRejected):
        client.run_select("SELECT ?x WHERE { }")


def test_remote_backend_unavailable():
    client = KgClient(remote_cfg(), session=StubSession(fail=True))
    with pytest.raises(BackendUnavailable):
        client.run_select("SELECT ?x WHERE { }")


def test_remote_chunk_failure_is_annotated():
    class FlakySession(StubSession):
        def post(self, url, data=None, headers=None, timeout=None):
            if "E100" in data["query"]:
                raise ConnectionError("boom")
            return super().post(url, data, headers, timeout)

    client = KgClient(remote_cfg(batch_size=50), session=FlakySession())
    template = query_gen.compile_property_values("P1", None, dialect="wikidata")
    entities = [f"E{i:03d}" for i in range(120)]
    with pytest.raises(BackendUnavailable) as exc:
        client.run_select_batched(template, entities)
    assert exc.value.chunk == 2


def test_remote_resolve_wbsearchentities():
    payload = {
        "search": [
            {"id": "Q30", "label": "United States", "description": "country"},
            {"id": "Q99", "label": "US", "description": "other"},
        ]
    }
    client = KgClient(remote_cfg(), session=StubSession(search=payload))
    result = client.resolve("United States")
    assert result.chosen == "Q30"
    assert result.candidates[0].score == 1.0
    assert result.candidates[1].score == 0.5


def test_endpoint_env_override(monkeypatch):
    monkeypatch.setenv(ENDPOINT_ENV, "http://override.test/sparql")
    cfg = BackendConfig.from_selector("remote:http://given.test/sparql")
    assert cfg.sparql_url == "http://override.test/sparql"
    monkeypatch.delenv(ENDPOINT_ENV)
    cfg = BackendConfig.from_selector("remote:http://given.test/sparql")
    assert cfg.sparql_url == "http://given.test/sparql"
