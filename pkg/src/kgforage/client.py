"""Uniform graph access over two backends: the embedded store or a remote
SPARQL endpoint with a wbsearchentities-compatible entity search service."""

from __future__ import annotations

import os
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import graph_store, sparql_exec
from .errors import BackendUnavailable, EmptyCell, QueryRejected
from .graph_store import KnowledgeGraph, PropertyInfo
from .query_gen import SparqlText
from .sparql_exec import BindingTable
from .values import Value

ENDPOINT_ENV = "KGFORAGE_ENDPOINT"

_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class BackendConfig:
    kind: str  # "local" | "remote"
    fixture_path: str | None = None
    sparql_url: str | None = None
    entity_search_url: str | None = None
    max_concurrency: int = 4
    request_timeout: float = 30.0
    batch_size: int = 50

    def __post_init__(self):
        if self.kind not in ("local", "remote"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.max_concurrency < 1 or self.batch_size < 1:
            raise ValueError("max_concurrency and batch_size must be >= 1")

    @staticmethod
    def from_selector(selector: str, **kwargs) -> "BackendConfig":
        """Parse "local:<fixture path>" or "remote:<sparql url>".

        KGFORAGE_ENDPOINT overrides the remote SPARQL url when set.
        """
        kind, _, rest = selector.partition(":")
        if kind == "local":
            return BackendConfig(kind="local", fixture_path=rest, **kwargs)
        if kind == "remote":
            url = os.environ.get(ENDPOINT_ENV) or rest
            return BackendConfig(
                kind="remote",
                sparql_url=url,
                entity_search_url=kwargs.pop("entity_search_url", None),
                **kwargs,
            )
        raise ValueError(f"bad backend selector {selector!r}")


@dataclass(frozen=True)
class Candidate:
    id: str
    label: str
    description: str
    score: float


@dataclass(frozen=True)
class ResolutionResult:
    cell_text: str
    candidates: tuple[Candidate, ...]
    chosen: str | None

    @staticmethod
    def from_candidates(cell_text: str, candidates: list[Candidate]) -> "ResolutionResult":
        return ResolutionResult(
            cell_text=cell_text,
            candidates=tuple(candidates),
            chosen=candidates[0].id if candidates else None,
        )


def normalize_cell(text: str) -> str:
    return _WS.sub(" ", text.strip())


class KgClient:
    """Shareable client; a semaphore caps in-flight requests and the
    resolution cache is keyed by normalized cell text."""

    def __init__(self, cfg: BackendConfig, graph: KnowledgeGraph | None = None, session=None):
        self.cfg = cfg
        self._sem = threading.BoundedSemaphore(cfg.max_concurrency)
        self._cache: dict[str, ResolutionResult] = {}
        self._cache_lock = threading.Lock()
        if cfg.kind == "local":
            if graph is not None:
                self.graph = graph
            elif cfg.fixture_path:
                self.graph = graph_store.load_fixture_file(cfg.fixture_path)
            else:
                raise ValueError("local backend needs a fixture path or a graph")
            self._session = None
        else:
            self.graph = None
            if session is None:
                import requests

                session = requests.Session()
            self._session = session

    @property
    def dialect(self) -> str:
        return "local" if self.cfg.kind == "local" else "wikidata"

    # ------------------------------------------------------------ resolve

    def resolve(self, cell_text: str) -> ResolutionResult:
        normalized = normalize_cell(cell_text)
        if not normalized:
            raise EmptyCell(f"cell {cell_text!r} is empty after trimming")
        with self._cache_lock:
            hit = self._cache.get(normalized)
        if hit is not None:
            return hit
        if self.cfg.kind == "local":
            result = self._resolve_local(normalized)
        else:
            result = self._resolve_remote(normalized)
        with self._cache_lock:
            self._cache.setdefault(normalized, result)
        return result

    def _resolve_local(self, text: str) -> ResolutionResult:
        matches = self.graph.search_entities(text)
        candidates = [
            Candidate(id=m.id, label=m.label, description=m.description, score=1.0 / (1 + rank))
            for rank, m in enumerate(matches)
        ]
        return ResolutionResult.from_candidates(text, candidates)

    def _resolve_remote(self, text: str) -> ResolutionResult:
        params = {
            "action": "wbsearchentities",
            "search": text,
            "format": "json",
            "language": "en",
        }
        try:
            with self._sem:
                resp = self._session.get(
                    self.cfg.entity_search_url, params=params, timeout=self.cfg.request_timeout
                )
            resp.raise_for_status()
            payload = resp.json()
        except Exception as exc:
            raise BackendUnavailable(f"entity search failed: {exc}") from exc
        candidates = [
            Candidate(
                id=hit["id"],
                label=hit.get("label", ""),
                description=hit.get("description", ""),
                score=1.0 / (1 + rank),
            )
            for rank, hit in enumerate(payload.get("search", []))
        ]
        return ResolutionResult.from_candidates(text, candidates)

    # -------------------------------------------------------------- select

    def run_select(self, query: SparqlText | str) -> BindingTable:
        text = query.text if isinstance(query, SparqlText) else query
        if self.cfg.kind == "local":
            return sparql_exec.execute_select(self.graph, text)
        return self._run_remote(text, query.variables if isinstance(query, SparqlText) else None)

    def run_select_batched(self, template: SparqlText, entities: list[str]) -> BindingTable:
        """Fill the template's VALUES slot chunk by chunk and concatenate.

        Chunks run concurrently up to max_concurrency; row order follows
        chunk order so results are deterministic for the local backend.
        """
        if not entities:
            raise ValueError("run_select_batched needs at least one entity")
        size = self.cfg.batch_size
        chunks = [entities[i : i + size] for i in range(0, len(entities), size)]

        def run_chunk(index_chunk):
            index, chunk = index_chunk
            try:
                return self.run_select(template.fill_entities(chunk))
            except BackendUnavailable as exc:
                raise BackendUnavailable(str(exc), chunk=index) from exc

        rows: list[dict] = []
        variables = list(template.variables)
        if len(chunks) == 1:
            rows = run_chunk((0, chunks[0])).rows
        else:
            with ThreadPoolExecutor(max_workers=self.cfg.max_concurrency) as pool:
                for table in pool.map(run_chunk, enumerate(chunks)):
                    rows.extend(table.rows)
        return BindingTable(variables=variables, rows=rows)

    def _run_remote(self, text: str, variables: tuple | None) -> BindingTable:
        try:
            with self._sem:
                resp = self._session.post(
                    self.cfg.sparql_url,
                    data={"query": text},
                    headers={"Accept": "application/sparql-results+json"},
                    timeout=self.cfg.request_timeout,
                )
        except Exception as exc:
            raise BackendUnavailable(f"sparql request failed: {exc}") from exc
        if resp.status_code >= 500:
            raise BackendUnavailable(f"endpoint returned {resp.status_code}")
        if resp.status_code >= 400:
            raise QueryRejected(resp.text[:500])
        payload = resp.json()
        head_vars = payload.get("head", {}).get("vars", [])
        rows = [
            {var: _decode_term(binding.get(var)) for var in head_vars}
            for binding in payload.get("results", {}).get("bindings", [])
        ]
        return BindingTable(variables=list(variables or head_vars), rows=rows)

    # ------------------------------------------------------------ metadata

    def property_metadata(self, pids: list[str]) -> dict[str, PropertyInfo]:
        if self.cfg.kind == "local":
            return {pid: self.graph.properties[pid] for pid in pids if pid in self.graph.properties}
        return self._remote_property_metadata(pids)

    _WIKIBASE_TYPES = {
        "WikibaseItem": "entity",
        "Quantity": "number",
        "Time": "datetime",
    }

    def _remote_property_metadata(self, pids: list[str]) -> dict[str, PropertyInfo]:
        # Label query sent only to remote endpoints, so it may use features
        # outside the embedded executor's subset.
        values = " ".join(f"wd:{pid}" for pid in pids)
        query = (
            "SELECT ?p ?type ?label ?desc WHERE { "
            f"VALUES ?p {{ {values} }} "
            "?p wikibase:propertyType ?type . "
            "OPTIONAL { ?p rdfs:label ?label . FILTER(LANG(?label) = \"en\") } "
            "OPTIONAL { ?p schema:description ?desc . FILTER(LANG(?desc) = \"en\") } }"
        )
        out = {
            pid: PropertyInfo(id=pid, label=pid, datatype="entity") for pid in pids
        }
        try:
            table = self._run_remote(query, ("p", "type", "label", "desc"))
        except (BackendUnavailable, QueryRejected):
            return out
        for row in table.rows:
            p = row.get("p")
            if p is None:
                continue
            pid = p.value
            wtype = row["type"].value if row.get("type") else ""
            out[pid] = PropertyInfo(
                id=pid,
                label=row["label"].value if row.get("label") else pid,
                datatype=self._WIKIBASE_TYPES.get(wtype, "string" if wtype else "entity"),
                description=row["desc"].value if row.get("desc") else "",
            )
        return out

    def entity_label(self, eid: str) -> str:
        return self.entity_labels([eid]).get(eid, eid)

    def entity_labels(self, eids: list[str]) -> dict[str, str]:
        if self.cfg.kind == "local":
            return {
                eid: (self.graph.entities[eid].label if eid in self.graph.entities else eid)
                for eid in eids
            }
        out = {eid: eid for eid in eids}
        if not eids:
            return out
        values = " ".join(f"wd:{eid}" for eid in eids)
        query = (
            "SELECT ?e ?label WHERE { "
            f"VALUES ?e {{ {values} }} "
            "?e rdfs:label ?label . FILTER(LANG(?label) = \"en\") }"
        )
        try:
            table = self._run_remote(query, ("e", "label"))
        except (BackendUnavailable, QueryRejected):
            return out
        for row in table.rows:
            if row.get("e") is not None and row.get("label") is not None:
                out[row["e"].value] = row["label"].value
        return out

    def all_properties(self) -> dict[str, PropertyInfo]:
        if self.cfg.kind == "local":
            return dict(self.graph.properties)
        return {}


def _decode_term(term: dict | None) -> Value | None:
    if term is None:
        return None
    ttype = term.get("type")
    raw = term.get("value", "")
    if ttype == "uri":
        return Value.entity(raw.rstrip("/").rsplit("/", 1)[-1])
    datatype = term.get("datatype", "")
    if datatype.endswith(("#decimal", "#integer", "#double", "#float")):
        try:
            return Value.number(float(raw))
        except ValueError:
            return Value.string(raw)
    if datatype.endswith("#dateTime"):
        try:
            return Value.datetime_(raw)
        except ValueError:
            return Value.string(raw)
    return Value.string(raw)
