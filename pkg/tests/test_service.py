import json
import time

import pytest
from fastapi.testclient import TestClient

from kgforage.client import BackendConfig, KgClient
from kgforage.service import create_app

from conftest import FIXTURES, MINI

MINI_CSV = b"Country\nAtlantis\nBorduria\nCascadia\n"


@pytest.fixture()
def api():
    app = create_app(default_backend=BackendConfig.from_selector(f"local:{MINI}"))
    with TestClient(app) as client:
        yield client


def start_session(api, data=MINI_CSV, **form):
    r = api.post("/sessions", files={"file": ("data.csv", data, "text/csv")}, data=form)
    assert r.status_code == 200, r.text
    return r.json()


def plan_depth2(combine="min", agg="max"):
    return {
        "source_column": "Country",
        "hops": [
            {"property": "P2", "agg": "through", "combine": combine},
            {"property": "P3", "agg": agg},
        ],
        "output_name": "derived",
    }


def test_create_session(api):
    body = start_session(api)
    assert body["row_count"] == 3
    assert [c["name"] for c in body["columns"]] == ["Country"]
    assert body["columns"][0]["ctype"] == "string"


def test_bad_csv_is_400(api):
    r = api.post("/sessions", files={"file": ("x.csv", b"a,b\n1\n", "text/csv")})
    assert r.status_code == 400


def test_unknown_session_404(api):
    assert api.get("/sessions/nope/columns").status_code == 404


def test_related(api):
    sid = start_session(api)["session_id"]
    r = api.get(f"/sessions/{sid}/columns/Country/related", params={"seed": 0})
    assert r.status_code == 200
    descriptors = r.json()["descriptors"]
    by_pid = {d["property"]: d for d in descriptors}
    assert by_pid["P1"]["coverage"] == pytest.approx(2 / 3)
    assert by_pid["P1"]["aggregations"] == ["count", "mean", "max", "min", "sum", "variance", "sample"]
    assert by_pid["P2"]["intermediate_aggregations"] == ["through", "count", "sample"]
    assert by_pid["P1"]["histogram"]["kind"] == "binned"
    # sorted by coverage desc then property id
    coverages = [d["coverage"] for d in descriptors]
    assert coverages == sorted(coverages, reverse=True)


def test_related_unknown_column_404(api):
    sid = start_session(api)["session_id"]
    assert api.get(f"/sessions/{sid}/columns/Nope/related").status_code == 404


def test_related_numeric_column_422(api):
    sid = start_session(api, data=b"Country,n\nAtlantis,1\nBorduria,2\n")["session_id"]
    assert api.get(f"/sessions/{sid}/columns/n/related").status_code == 422


def test_aggregations_endpoint(api):
    r = api.get("/aggregations", params={"datatype": "datetime", "cardinality": "many"})
    assert r.json()["aggregations"] == ["count", "max", "min", "sample"]
    r = api.get("/aggregations", params={"datatype": "number", "cardinality": "one"})
    assert "value" in r.json()["aggregations"]


def test_preview_then_commit(api):
    sid = start_session(api)["session_id"]
    r = api.post(f"/sessions/{sid}/joins:preview", json=plan_depth2())
    assert r.status_code == 200
    body = r.json()
    assert body["values"] == ["65", "70", "70"]  # [DERIVED]
    assert body["null_count"] == 0

    # preview must not mutate
    cols = api.get(f"/sessions/{sid}/columns").json()["columns"]
    assert [c["name"] for c in cols] == ["Country"]

    r = api.post(f"/sessions/{sid}/joins", json=plan_depth2())
    assert r.status_code == 200
    cols = r.json()["columns"]
    assert [c["name"] for c in cols] == ["Country", "derived"]
    assert cols[1]["augmented"] is True
    assert cols[1]["parent_column"] == "Country"
    assert cols[1]["plan"]["hops"][0]["property"] == "P2"


def test_invalid_plan_422(api):
    sid = start_session(api)["session_id"]
    bad = plan_depth2()
    bad["hops"][0]["agg"] = "max"  # non-final hop must be through
    r = api.post(f"/sessions/{sid}/joins:preview", json=bad)
    assert r.status_code == 422
    detail = r.json()["detail"]
    assert detail[0]["hop_index"] == 0


def test_subgraph_with_overrides(api):
    sid = start_session(api)["session_id"]
    r = api.post(f"/sessions/{sid}/subgraph", json={"plan": plan_depth2(), "row_index": 0})
    assert r.status_code == 200
    body = r.json()
    assert body["root"] == {"id": "Q1", "label": "Atlantis"}
    assert body["computed_result"] == "65"
    assert len(body["branches"]) <= 3

    r = api.post(
        f"/sessions/{sid}/subgraph",
        json={"plan": plan_depth2(), "row_index": 0, "op_overrides": {"0": "max", "1": "mean"}},
    )
    assert r.json()["computed_result"] == "80"


def test_subgraph_unresolvable_row_422(api):
    sid = start_session(api, data=b"Country\nNowhereland\n")["session_id"]
    r = api.post(f"/sessions/{sid}/subgraph", json={"plan": plan_depth2(), "row_index": 0})
    assert r.status_code == 422


def test_patch_enable_disable_and_export(api):
    sid = start_session(api)["session_id"]
    api.post(f"/sessions/{sid}/joins", json=plan_depth2())
    r = api.patch(f"/sessions/{sid}/columns/derived", json={"enabled": False})
    assert r.status_code == 200
    exported = api.get(f"/sessions/{sid}/export")
    assert exported.headers["content-type"].startswith("text/csv")
    assert exported.text == "Country\nAtlantis\nBorduria\nCascadia\n"
    api.patch(f"/sessions/{sid}/columns/derived", json={"enabled": True})
    exported = api.get(f"/sessions/{sid}/export").text
    assert exported.splitlines()[0] == "Country,derived"
    assert exported.splitlines()[1] == "Atlantis,65"


def test_export_plans_sidecar(api):
    sid = start_session(api)["session_id"]
    api.post(f"/sessions/{sid}/joins", json=plan_depth2())
    body = json.loads(api.get(f"/sessions/{sid}/export/plans").text)
    assert body["augmented_columns"][0]["column"] == "derived"
    assert body["augmented_columns"][0]["plan"]["source_column"] == "Country"


def test_table_preview(api):
    sid = start_session(api)["session_id"]
    r = api.get(f"/sessions/{sid}/preview", params={"n": 2})
    body = r.json()
    assert body["columns"] == ["Country"]
    assert body["rows"] == [["Atlantis"], ["Borduria"]]


def test_column_detail(api):
    sid = start_session(api, data=b"Country,n\nAtlantis,1\nBorduria,2\n")["session_id"]
    body = api.get(f"/sessions/{sid}/columns/n/detail").json()
    assert body["column"]["ctype"] == "number"
    assert body["histogram"]["kind"] == "binned"
    assert body["examples"] == ["1", "2"]


def test_sessions_are_isolated(api):
    a = start_session(api)["session_id"]
    b = start_session(api)["session_id"]
    api.post(f"/sessions/{a}/joins", json=plan_depth2())
    cols_b = api.get(f"/sessions/{b}/columns").json()["columns"]
    assert [c["name"] for c in cols_b] == ["Country"]


def test_upload_too_large():
    app = create_app(default_backend=BackendConfig.from_selector(f"local:{MINI}"))
    # Pretend limit breach with a real oversized payload is wasteful; patch it.
    import kgforage.service as service_mod

    original = service_mod.MAX_UPLOAD_BYTES
    service_mod.MAX_UPLOAD_BYTES = 10
    try:
        with TestClient(app) as client:
            r = client.post("/sessions", files={"file": ("x.csv", MINI_CSV, "text/csv")})
            assert r.status_code == 413
    finally:
        service_mod.MAX_UPLOAD_BYTES = original


def test_slow_commit_returns_202_and_polls(monkeypatch):
    import kgforage.materialize
    import sys

    materialize_mod = sys.modules["kgforage.materialize"]
    real = materialize_mod.materialize

    def slow(client, dataset, plan):
        time.sleep(0.3)
        return real(client, dataset, plan)

    monkeypatch.setattr(materialize_mod, "materialize", slow)
    app = create_app(
        default_backend=BackendConfig.from_selector(f"local:{MINI}"),
        commit_deadline=0.05,
    )
    with TestClient(app) as api:
        sid = start_session(api)["session_id"]
        r = api.post(f"/sessions/{sid}/joins", json=plan_depth2())
        assert r.status_code == 202
        poll = r.json()["poll"]
        deadline = time.time() + 5
        while time.time() < deadline:
            body = api.get(poll).json()
            if body["status"] == "done":
                assert [c["name"] for c in body["columns"]] == ["Country", "derived"]
                break
            assert body["status"] == "running"
            time.sleep(0.05)
        else:
            pytest.fail("job never completed")


def test_no_backend_configured():
    app = create_app(default_backend=None)
    with TestClient(app) as api:
        r = api.post("/sessions", files={"file": ("x.csv", MINI_CSV, "text/csv")})
        assert r.status_code == 400
