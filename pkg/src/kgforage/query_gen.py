"""Compiles join plans and entity batches into SPARQL text.

Two dialects are emitted: "local" (bare identifiers, runs on the embedded
executor) and "wikidata" (wd:/wdt: truthy-claim prefixes for a remote
endpoint). Aggregations for value fetches happen client side over raw
bindings; only the discovery query uses GROUP BY.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyEntitySet, InvalidPlan
from .plans import MAX_PLAN_DEPTH, JoinPlan, validate

ENTITY_SLOT = "__ENTITIES__"


@dataclass(frozen=True)
class SparqlText:
    text: str
    variables: tuple[str, ...]
    kind: str  # discovery | values_fetch | subgraph
    dialect: str = "local"

    def fill_entities(self, entities: list[str]) -> "SparqlText":
        rendered = " ".join(_entity(e, self.dialect) for e in entities)
        return SparqlText(
            text=self.text.replace(ENTITY_SLOT, rendered),
            variables=self.variables,
            kind=self.kind,
            dialect=self.dialect,
        )


def _entity(eid: str, dialect: str) -> str:
    return f"wd:{eid}" if dialect == "wikidata" else eid


def _property(pid: str, dialect: str) -> str:
    return f"wdt:{pid}" if dialect == "wikidata" else pid


def _values_block(entities: list[str] | None, dialect: str) -> str:
    if entities is None:
        return ENTITY_SLOT
    return " ".join(_entity(e, dialect) for e in entities)


def compile_discovery(entities: list[str] | None, dialect: str = "local") -> SparqlText:
    """One row per (entity, property) with the statement count.

    Pass entities=None to leave the VALUES slot open for batching.
    """
    if entities is not None and not entities:
        raise EmptyEntitySet("discovery query needs at least one entity")
    text = (
        "SELECT ?e ?p (COUNT(?v) AS ?n) WHERE { "
        f"VALUES ?e {{ {_values_block(entities, dialect)} }} "
        "?e ?p ?v } GROUP BY ?e ?p"
    )
    return SparqlText(text=text, variables=("e", "p", "n"), kind="discovery", dialect=dialect)


def compile_property_values(
    pid: str, entities: list[str] | None, dialect: str = "local"
) -> SparqlText:
    """Single-hop value fetch used for attribute detail sampling."""
    if entities is not None and not entities:
        raise EmptyEntitySet("value fetch needs at least one entity")
    text = (
        "SELECT ?e ?x1 WHERE { "
        f"VALUES ?e {{ {_values_block(entities, dialect)} }} "
        f"?e {_property(pid, dialect)} ?x1 }}"
    )
    return SparqlText(text=text, variables=("e", "x1"), kind="values_fetch", dialect=dialect)


def _chain_text(plan: JoinPlan, entities: list[str] | None, dialect: str) -> tuple[str, tuple[str, ...]]:
    hop_vars = [f"x{i + 1}" for i in range(plan.depth)]
    variables = ("e", *hop_vars)
    patterns = []
    prev = "?e"
    for hop, var in zip(plan.hops, hop_vars):
        patterns.append(f"{prev} {_property(hop.property, dialect)} ?{var}")
        prev = f"?{var}"
    text = (
        "SELECT " + " ".join(f"?{v}" for v in variables)
        + " WHERE { "
        + f"VALUES ?e {{ {_values_block(entities, dialect)} }} "
        + " . ".join(patterns)
        + " }"
    )
    return text, variables


def compile_values_fetch(
    plan: JoinPlan,
    entities: list[str] | None,
    properties: dict,
    dialect: str = "local",
) -> SparqlText:
    """Raw binding chain (?e, ?x1, ..., ?xk) for a validated plan.

    Missing paths yield no rows; the materializer treats absent roots as
    empty trees, so no OPTIONAL is needed.
    """
    errors = validate(plan, properties)
    if errors:
        raise InvalidPlan("; ".join(f"hop {e.hop_index}: {e.reason}" for e in errors))
    if entities is not None and not entities:
        raise EmptyEntitySet("values fetch needs at least one entity")
    text, variables = _chain_text(plan, entities, dialect)
    return SparqlText(text=text, variables=variables, kind="values_fetch", dialect=dialect)


def compile_subgraph(
    plan: JoinPlan,
    entity: str,
    properties: dict,
    per_level_limit: int = 3,
    dialect: str = "local",
) -> SparqlText:
    """Chain query for one entity, feeding the through-join example dialog.

    The executor returns all rows; callers truncate to the first
    `per_level_limit` distinct values per level in binding order, since
    per-branch limits are outside the supported SPARQL subset.
    """
    if plan.depth < 2:
        raise InvalidPlan("example subgraphs need a plan of depth >= 2")
    errors = validate(plan, properties)
    if errors:
        raise InvalidPlan("; ".join(f"hop {e.hop_index}: {e.reason}" for e in errors))
    text, variables = _chain_text(plan, [entity], dialect)
    return SparqlText(text=text, variables=variables, kind="subgraph", dialect=dialect)
