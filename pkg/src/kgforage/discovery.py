"""Finding related attributes by sampling dataset rows.

A small random sample of rows is resolved to graph entities; properties are
ranked by how many sampled rows possess them, and the top candidates come
back with coverage estimates, example values, and a value sample for
histograms. Unresolved cells count as misses so coverage predicts the
post-join null rate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import query_gen
from .client import KgClient
from .errors import AllCellsUnresolved, BadCounts, EmptySample, NotAStringColumn
from .table import Dataset
from .values import Value, format_datetime


@dataclass(frozen=True)
class DiscoveryConfig:
    sample_size: int = 25
    top_k: int = 50
    detail_sample: int = 25
    rng_seed: int | None = None

    def __post_init__(self):
        if self.sample_size < 1 or self.top_k < 1:
            raise ValueError("sample_size and top_k must be >= 1")


@dataclass(frozen=True)
class AttributeDescriptor:
    property: str
    label: str
    description: str
    datatype: str
    unit: str | None
    coverage: float
    cardinality: str  # "one" | "many"
    examples: tuple[Value, ...]
    distribution_sample: tuple[Value, ...]

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "label": self.label,
            "description": self.description,
            "datatype": self.datatype,
            "unit": self.unit,
            "coverage": self.coverage,
            "cardinality": self.cardinality,
            "examples": [v.render() for v in self.examples],
            "distribution_sample": [v.render() for v in self.distribution_sample],
        }


@dataclass(frozen=True)
class Histogram:
    kind: str  # "binned" | "categorical"
    edges: tuple = ()        # len(counts) + 1 edges for binned histograms
    counts: tuple[int, ...] = ()
    categories: tuple[tuple[str, int], ...] = ()

    def to_json(self) -> dict:
        if self.kind == "binned":
            return {"kind": self.kind, "edges": list(self.edges), "counts": list(self.counts)}
        return {"kind": self.kind, "categories": [list(c) for c in self.categories]}


def estimate_coverage(hits: int, n: int) -> float:
    if n < 1 or hits < 0 or hits > n:
        raise BadCounts(f"hits={hits}, n={n}")
    return hits / n


def discover_related(
    client: KgClient,
    dataset: Dataset,
    column_name: str,
    cfg: DiscoveryConfig = DiscoveryConfig(),
) -> list[AttributeDescriptor]:
    column = dataset.column(column_name)
    if column.ctype != "string":
        raise NotAStringColumn(column_name)
    if dataset.row_count < 1:
        raise AllCellsUnresolved("dataset has no rows")

    rng = random.Random(cfg.rng_seed)
    take = min(cfg.sample_size, dataset.row_count)
    indices = sorted(rng.sample(range(dataset.row_count), take))

    row_entities: list[str | None] = []
    for i in indices:
        cell = column.cells[i]
        if cell is None or not cell.strip():
            row_entities.append(None)
            continue
        result = client.resolve(cell)
        row_entities.append(result.chosen)
    resolved = [e for e in row_entities if e is not None]
    if not resolved:
        raise AllCellsUnresolved(column_name)

    unique_entities = sorted(set(resolved))
    template = query_gen.compile_discovery(None, dialect=client.dialect)
    table = client.run_select_batched(template, unique_entities)

    # entity -> property -> statement count
    per_entity: dict[str, dict[str, int]] = {e: {} for e in unique_entities}
    for row in table.rows:
        e, p, n = row.get("e"), row.get("p"), row.get("n")
        if e is None or p is None or n is None:
            continue
        per_entity.setdefault(e.value, {})[p.value] = int(n.value)

    possessing: dict[str, int] = {}
    multi: dict[str, bool] = {}
    for entity in row_entities:
        if entity is None:
            continue
        for pid, count in per_entity.get(entity, {}).items():
            possessing[pid] = possessing.get(pid, 0) + 1
            if count >= 2:
                multi[pid] = True

    ranked = sorted(possessing, key=lambda pid: (-possessing[pid], pid))[: cfg.top_k]
    metadata = client.property_metadata(ranked)

    descriptors = []
    for pid in ranked:
        info = metadata.get(pid)
        holders = [e for e in unique_entities if pid in per_entity.get(e, {})]
        sample = _collect_values(client, pid, holders, cfg.detail_sample)
        descriptors.append(
            AttributeDescriptor(
                property=pid,
                label=info.label if info else pid,
                description=info.description if info else "",
                datatype=info.datatype if info else "entity",
                unit=info.unit if info else None,
                coverage=estimate_coverage(possessing[pid], take),
                cardinality="many" if multi.get(pid) else "one",
                examples=tuple(sample[:3]),
                distribution_sample=tuple(sample),
            )
        )
    return descriptors


def _collect_values(client: KgClient, pid: str, entities: list[str], limit: int) -> list[Value]:
    if not entities:
        return []
    template = query_gen.compile_property_values(pid, None, dialect=client.dialect)
    table = client.run_select_batched(template, entities)
    values = [row["x1"] for row in table.rows if row.get("x1") is not None]
    return values[:limit]


def attribute_histogram(desc: AttributeDescriptor) -> Histogram:
    return histogram_of(list(desc.distribution_sample), desc.datatype)


def histogram_of(values: list[Value], datatype: str) -> Histogram:
    """10 equal-width bins for numeric/datetime samples, top-10 value
    frequencies otherwise."""
    if not values:
        raise EmptySample("no values to bin")
    if datatype in ("number", "datetime"):
        if datatype == "number":
            points = [float(v.value) for v in values]
            fmt = lambda x: x
        else:
            points = [v.value.timestamp() for v in values]
            from datetime import datetime, timezone

            fmt = lambda x: format_datetime(datetime.fromtimestamp(x, tz=timezone.utc))
        lo, hi = min(points), max(points)
        if lo == hi:
            return Histogram(kind="binned", edges=(fmt(lo), fmt(hi)), counts=(len(points),))
        width = (hi - lo) / 10
        counts = [0] * 10
        for x in points:
            i = min(int((x - lo) / width), 9)
            counts[i] += 1
        edges = tuple(fmt(lo + width * i) for i in range(11))
        return Histogram(kind="binned", edges=edges, counts=tuple(counts))

    freq: dict[str, int] = {}
    for v in values:
        key = str(v.value)
        freq[key] = freq.get(key, 0) + 1
    ordered = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    top = ordered[:10]
    rest = sum(count for _, count in ordered[10:])
    if rest:
        top.append(("(other)", rest))  # keep counts summing to the sample size
    return Histogram(kind="categorical", categories=tuple(top))
