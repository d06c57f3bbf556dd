"""Embedded in-memory knowledge graph with a JSONL fixture format.

The graph is immutable after loading: entities, property metadata, and an
insertion-ordered statement multimap. It backs the offline engine and the
tests' ground truth.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

from .errors import ParseError, ReferenceError_, UnknownEntity
from .values import Value

DATATYPES = ("entity", "number", "string", "datetime")


@dataclass(frozen=True)
class EntityInfo:
    id: str
    label: str
    aliases: tuple[str, ...] = ()
    description: str = ""


@dataclass(frozen=True)
class PropertyInfo:
    id: str
    label: str
    datatype: str  # entity | number | string | datetime
    unit: str | None = None
    description: str = ""


@dataclass(frozen=True)
class Statement:
    subject: str
    property: str
    value: Value


@dataclass
class KnowledgeGraph:
    entities: dict[str, EntityInfo] = field(default_factory=dict)
    properties: dict[str, PropertyInfo] = field(default_factory=dict)
    # (subject, property) -> values, insertion-ordered
    statements: dict[tuple[str, str], list[Value]] = field(default_factory=dict)

    @property
    def statement_count(self) -> int:
        return sum(len(v) for v in self.statements.values())

    def statements_of(self, entity_id: str, property_id: str | None = None) -> list[Statement]:
        """All statements with the given subject, optionally one property."""
        if entity_id not in self.entities:
            raise UnknownEntity(entity_id)
        out = []
        for (subj, prop), values in self.statements.items():
            if subj != entity_id:
                continue
            if property_id is not None and prop != property_id:
                continue
            out.extend(Statement(subj, prop, v) for v in values)
        return out

    def properties_of(self, entity_id: str) -> dict[str, int]:
        """Property -> statement count held by the entity."""
        if entity_id not in self.entities:
            raise UnknownEntity(entity_id)
        return {
            prop: len(values)
            for (subj, prop), values in self.statements.items()
            if subj == entity_id and values
        }

    def search_entities(self, query: str) -> list[EntityInfo]:
        """Rank: exact label, then exact alias, then case-insensitive match.

        Ties break by entity id so repeated calls return identical lists.
        """
        if not query:
            return []
        folded = query.casefold()
        tiers: list[list[EntityInfo]] = [[], [], []]
        for eid in sorted(self.entities):
            info = self.entities[eid]
            if info.label == query:
                tiers[0].append(info)
            elif query in info.aliases:
                tiers[1].append(info)
            elif folded == info.label.casefold() or any(
                folded == a.casefold() for a in info.aliases
            ):
                tiers[2].append(info)
        return [info for tier in tiers for info in tier]

    def serialize(self) -> bytes:
        """JSONL form; load_fixture(serialize(g)) reproduces g."""
        buf = io.StringIO()
        for info in self.entities.values():
            buf.write(json.dumps({
                "kind": "entity", "id": info.id, "label": info.label,
                "aliases": list(info.aliases), "description": info.description,
            }) + "\n")
        for prop in self.properties.values():
            buf.write(json.dumps({
                "kind": "property", "id": prop.id, "label": prop.label,
                "datatype": prop.datatype, "unit": prop.unit,
                "description": prop.description,
            }) + "\n")
        for (subj, prop), vals in self.statements.items():
            for v in vals:
                buf.write(json.dumps({
                    "kind": "statement", "subject": subj, "property": prop,
                    "value": v.to_json(),
                }) + "\n")
        return buf.getvalue().encode("utf-8")


def load_fixture(source: bytes | str | io.IOBase, format: str = "jsonl") -> KnowledgeGraph:
    """Load a graph from line-delimited JSON records.

    Entities and properties must be declared before any statement that
    references them.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported fixture format {format!r}")
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    g = KnowledgeGraph()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(lineno, f"invalid JSON: {exc.msg}")
        if not isinstance(rec, dict) or "kind" not in rec:
            raise ParseError(lineno, "record must be an object with a 'kind'")
        kind = rec["kind"]
        if kind == "entity":
            eid = rec.get("id")
            if not eid:
                raise ParseError(lineno, "entity record missing id")
            g.entities[eid] = EntityInfo(
                id=eid,
                label=rec.get("label", ""),
                aliases=tuple(rec.get("aliases") or ()),
                description=rec.get("description") or "",
            )
        elif kind == "property":
            pid = rec.get("id")
            if not pid:
                raise ParseError(lineno, "property record missing id")
            datatype = rec.get("datatype")
            if datatype not in DATATYPES:
                raise ParseError(lineno, f"bad datatype {datatype!r}")
            g.properties[pid] = PropertyInfo(
                id=pid,
                label=rec.get("label", ""),
                datatype=datatype,
                unit=rec.get("unit"),
                description=rec.get("description") or "",
            )
        elif kind == "statement":
            subj = rec.get("subject")
            prop = rec.get("property")
            if subj not in g.entities:
                raise ReferenceError_(f"line {lineno}: unknown subject {subj!r}")
            if prop not in g.properties:
                raise ReferenceError_(f"line {lineno}: unknown property {prop!r}")
            value = Value.from_json(rec.get("value"), lineno)
            pinfo = g.properties[prop]
            if value.kind != pinfo.datatype:
                raise ParseError(
                    lineno,
                    f"value kind {value.kind} does not match {prop} datatype {pinfo.datatype}",
                )
            if value.kind == "entity" and value.value not in g.entities:
                raise ReferenceError_(f"line {lineno}: unknown entity value {value.value!r}")
            g.statements.setdefault((subj, prop), []).append(value)
        else:
            raise ParseError(lineno, f"unknown record kind {kind!r}")
    return g


def load_fixture_file(path) -> KnowledgeGraph:
    with open(path, "rb") as fh:
        return load_fixture(fh.read())
