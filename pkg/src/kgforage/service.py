"""Session-scoped HTTP API for the foraging loop.

Sessions live in memory with a TTL; each one owns an immutable dataset
snapshot, the plans committed so far, and a graph client. Previews are
side-effect free; commits serialize behind a per-session lock. Joins that
outlast the commit deadline return 202 with a poll URL.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, Query, Request, UploadFile
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

import importlib

from . import discovery, table

# The package re-exports the materialize() function under the same name as
# this module, so fetch the module itself for late-bound lookups.
materialize = importlib.import_module(__package__ + ".materialize")
from .client import BackendConfig, KgClient
from .errors import (
    AllCellsUnresolved,
    BackendUnavailable,
    CsvError,
    InvalidPlan,
    KgForageError,
    NotAStringColumn,
    RowUnresolvable,
    UnknownColumn,
)
from .plans import JoinPlan, allowed_aggregations, validate, with_default_name
from .table import Dataset

MAX_UPLOAD_BYTES = 50 * 1024 * 1024
SESSION_TTL_SECONDS = 2 * 60 * 60


@dataclass
class Session:
    id: str
    dataset: Dataset
    client: KgClient
    join_history: list[JoinPlan] = field(default_factory=list)
    created: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class Job:
    id: str
    status: str = "running"  # running | done | failed
    error: str | None = None


class SessionStore:
    def __init__(self, ttl: float = SESSION_TTL_SECONDS):
        self.ttl = ttl
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, session: Session) -> None:
        with self._lock:
            self._prune()
            self._sessions[session.id] = session

    def get(self, sid: str) -> Session:
        with self._lock:
            self._prune()
            session = self._sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def _prune(self) -> None:
        cutoff = time.time() - self.ttl
        for sid in [s for s, sess in self._sessions.items() if sess.created < cutoff]:
            del self._sessions[sid]


def _column_json(col: table.Column) -> dict:
    out = {
        "name": col.name,
        "ctype": col.ctype,
        "enabled": col.enabled,
        "augmented": col.is_augmented,
        "parent_column": col.provenance.source_column if col.provenance else None,
    }
    if col.provenance is not None:
        out["plan"] = col.provenance.to_json()
    return out


def _descriptor_json(desc: discovery.AttributeDescriptor) -> dict:
    out = desc.to_json()
    out["aggregations"] = allowed_aggregations(desc.datatype, desc.cardinality, "final")
    out["intermediate_aggregations"] = allowed_aggregations(
        desc.datatype, desc.cardinality, "intermediate"
    )
    out["histogram"] = discovery.attribute_histogram(desc).to_json() if desc.distribution_sample else None
    return out


def create_app(
    default_backend: BackendConfig | None = None,
    commit_deadline: float = 10.0,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="kgforage")
    store = SessionStore()
    jobs: dict[str, Job] = {}
    clients: dict[str, KgClient] = {}

    def client_for(selector: str | None) -> KgClient:
        if selector:
            cfg = BackendConfig.from_selector(selector)
        elif default_backend is not None:
            cfg = default_backend
        else:
            raise HTTPException(status_code=400, detail="no backend configured")
        key = f"{cfg.kind}:{cfg.fixture_path or cfg.sparql_url}"
        if key not in clients:
            clients[key] = KgClient(cfg)
        return clients[key]

    @app.exception_handler(KgForageError)
    def _engine_error(request: Request, exc: KgForageError):
        status = 500
        if isinstance(exc, (UnknownColumn,)):
            status = 404
        elif isinstance(exc, (NotAStringColumn, InvalidPlan, AllCellsUnresolved, RowUnresolvable)):
            status = 422
        elif isinstance(exc, BackendUnavailable):
            status = 502
        elif isinstance(exc, CsvError):
            status = 400
        return JSONResponse(status_code=status, content={"error": type(exc).__name__, "detail": str(exc)})

    @app.post("/sessions")
    async def create_session(
        file: UploadFile = File(...),
        backend: str | None = Form(default=None),
        has_header: bool = Form(default=True),
        delimiter: str = Form(default=","),
    ):
        data = await file.read()
        if len(data) > MAX_UPLOAD_BYTES:
            raise HTTPException(status_code=413, detail="upload exceeds size limit")
        dataset = table.import_csv(data, has_header=has_header, delimiter=delimiter)
        session = Session(id=uuid.uuid4().hex, dataset=dataset, client=client_for(backend))
        store.add(session)
        return {
            "session_id": session.id,
            "columns": [_column_json(c) for c in dataset.columns],
            "row_count": dataset.row_count,
        }

    @app.get("/sessions/{sid}/columns")
    def get_columns(sid: str):
        session = store.get(sid)
        return {"columns": [_column_json(c) for c in session.dataset.columns]}

    @app.get("/sessions/{sid}/columns/{name}/related")
    def get_related(
        sid: str,
        name: str,
        sample_size: int = Query(default=25, ge=1),
        top_k: int = Query(default=50, ge=1),
        detail_sample: int = Query(default=25, ge=1),
        seed: int | None = Query(default=None),
    ):
        session = store.get(sid)
        cfg = discovery.DiscoveryConfig(
            sample_size=sample_size, top_k=top_k, detail_sample=detail_sample, rng_seed=seed
        )
        descriptors = discovery.discover_related(session.client, session.dataset, name, cfg)
        ordered = sorted(descriptors, key=lambda d: (-d.coverage, d.property))
        return {"descriptors": [_descriptor_json(d) for d in ordered]}

    @app.get("/sessions/{sid}/columns/{name}/detail")
    def get_detail(sid: str, name: str):
        session = store.get(sid)
        col = session.dataset.column(name)
        cells = [c for c in col.cells if c is not None]
        hist = None
        if cells:
            from .values import Value, parse_datetime

            if col.ctype == "number":
                values = [Value.number(float(c)) for c in cells]
            elif col.ctype == "datetime":
                values = [Value.datetime_(c) for c in cells]
            else:
                values = [Value.string(c) for c in cells]
            hist = discovery.histogram_of(values, col.ctype).to_json()
        return {
            "column": _column_json(col),
            "histogram": hist,
            "examples": cells[:3],
            "null_count": col.cells.count(None) if hasattr(col.cells, "count") else 0,
        }

    @app.get("/aggregations")
    def get_aggregations(
        datatype: str, cardinality: str = "many", position: str = "final"
    ):
        return {"aggregations": allowed_aggregations(datatype, cardinality, position)}

    def _parse_plan(body: dict) -> JoinPlan:
        try:
            return JoinPlan.from_json(body)
        except (KeyError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=f"bad plan: {exc}")

    def _validate_or_422(session: Session, plan: JoinPlan) -> JoinPlan:
        properties = materialize._plan_properties(session.client, plan)
        plan = with_default_name(plan, properties)
        errors = validate(plan, properties)
        if errors:
            raise HTTPException(
                status_code=422,
                detail=[{"hop_index": e.hop_index, "reason": e.reason} for e in errors],
            )
        return plan

    @app.post("/sessions/{sid}/joins:preview")
    def preview_join(sid: str, body: dict):
        session = store.get(sid)
        plan = _validate_or_422(session, _parse_plan(body))
        preview = materialize.preview_join(session.client, session.dataset, plan)
        return {
            "rows": preview.rows,
            "values": [materialize.render_value(session.client, v) for v in preview.values],
            "null_count": preview.null_count,
            "plan": preview.plan.to_json(),
        }

    @app.post("/sessions/{sid}/joins")
    def commit_join(sid: str, body: dict):
        session = store.get(sid)
        plan = _validate_or_422(session, _parse_plan(body))

        def run():
            with session.lock:
                session.dataset = materialize.materialize(session.client, session.dataset, plan)
                session.join_history.append(plan)

        job = Job(id=uuid.uuid4().hex)

        def worker():
            try:
                run()
                job.status = "done"
            except Exception as exc:  # surfaced via the poll endpoint
                job.status = "failed"
                job.error = str(exc)

        thread = threading.Thread(target=worker, daemon=True)
        thread.start()
        thread.join(timeout=commit_deadline)
        if thread.is_alive():
            jobs[job.id] = job
            return JSONResponse(
                status_code=202,
                content={"job_id": job.id, "poll": f"/sessions/{sid}/jobs/{job.id}"},
            )
        if job.status == "failed":
            raise _job_error(job)
        return {"columns": [_column_json(c) for c in session.dataset.columns]}

    def _job_error(job: Job) -> Exception:
        message = job.error or "join failed"
        if "BackendUnavailable" in message or "unavailable" in message:
            return HTTPException(status_code=502, detail=message)
        return HTTPException(status_code=422, detail=message)

    @app.get("/sessions/{sid}/jobs/{job_id}")
    def get_job(sid: str, job_id: str):
        session = store.get(sid)
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="unknown job")
        if job.status == "done":
            return {
                "status": "done",
                "columns": [_column_json(c) for c in session.dataset.columns],
            }
        return {"status": job.status, "error": job.error}

    @app.post("/sessions/{sid}/subgraph")
    def subgraph(sid: str, body: dict):
        session = store.get(sid)
        plan = _validate_or_422(session, _parse_plan(body.get("plan", {})))
        row_index = int(body.get("row_index", 0))
        overrides = {int(k): v for k, v in (body.get("op_overrides") or {}).items()}
        sample = materialize.example_subgraph(
            session.client, session.dataset, plan, row_index, op_overrides=overrides
        )
        return sample.to_json()

    @app.patch("/sessions/{sid}/columns/{name}")
    def patch_column(sid: str, name: str, body: dict):
        session = store.get(sid)
        if "enabled" not in body:
            raise HTTPException(status_code=422, detail="body needs an 'enabled' flag")
        with session.lock:
            session.dataset = table.set_enabled(session.dataset, name, bool(body["enabled"]))
        return {"columns": [_column_json(c) for c in session.dataset.columns]}

    @app.get("/sessions/{sid}/preview")
    def preview_table(sid: str, n: int = Query(default=10, ge=0)):
        session = store.get(sid)
        sliced = table.head(session.dataset, n)
        return {
            "columns": [c.name for c in sliced.columns],
            "rows": [
                [c.cells[i] for c in sliced.columns] for i in range(sliced.row_count)
            ],
        }

    @app.get("/sessions/{sid}/export")
    def export(sid: str):
        session = store.get(sid)
        data = table.export_csv(session.dataset)
        return Response(
            content=data,
            media_type="text/csv",
            headers={"Content-Disposition": 'attachment; filename="augmented.csv"'},
        )

    @app.get("/sessions/{sid}/export/plans")
    def export_plans(sid: str):
        session = store.get(sid)
        return Response(
            content=table.plan_sidecar(session.dataset),
            media_type="application/json",
            headers={"Content-Disposition": 'attachment; filename="augmented.plan.json"'},
        )

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
