"""Join plans: property hops with per-level aggregation operators.

A plan's hops run source to target. Every non-final hop steps *through* an
entity-valued property and carries a combining operator that merges the
results computed below it; the final hop carries the innermost aggregation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

MAX_PLAN_DEPTH = 3

AGG_OPS = ("count", "mean", "max", "min", "sum", "variance", "sample", "through", "value")

# Final-hop operators legal per property datatype. "value" is the identity
# aggregation for one-to-one relationships: it is offered only when the
# estimated cardinality is one, and fails at join time on multiplicity.
FINAL_OPS = {
    "number": ("count", "mean", "max", "min", "sum", "variance", "sample"),
    "datetime": ("count", "max", "min", "sample"),
    "string": ("count", "sample"),
    "entity": ("count", "sample"),
}

# Operators that can combine a list of child results of a given kind.
COMBINE_OPS = FINAL_OPS


@dataclass(frozen=True)
class Hop:
    property: str
    agg: str
    # for agg == "through": the outer operator combining per-child results
    combine: str | None = None


@dataclass
class JoinPlan:
    source_column: str
    hops: list[Hop]
    output_name: str = ""
    rng_seed: int | None = None

    @property
    def depth(self) -> int:
        return len(self.hops)

    def to_json(self) -> dict:
        hops = []
        for hop in self.hops:
            rec = {"property": hop.property, "agg": hop.agg}
            if hop.combine is not None:
                rec["combine"] = hop.combine
            hops.append(rec)
        out = {"source_column": self.source_column, "output_name": self.output_name, "hops": hops}
        if self.rng_seed is not None:
            out["rng_seed"] = self.rng_seed
        return out

    @staticmethod
    def from_json(obj: dict) -> "JoinPlan":
        hops = [
            Hop(property=h["property"], agg=h["agg"], combine=h.get("combine"))
            for h in obj.get("hops", [])
        ]
        return JoinPlan(
            source_column=obj["source_column"],
            hops=hops,
            output_name=obj.get("output_name", ""),
            rng_seed=obj.get("rng_seed"),
        )

    @staticmethod
    def list_from_file(path) -> list["JoinPlan"]:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, dict):
            data = data.get("plans", [data])
        return [JoinPlan.from_json(obj) for obj in data]


@dataclass(frozen=True)
class PlanError:
    hop_index: int
    reason: str


def allowed_aggregations(datatype: str, cardinality: str, position: str) -> list[str]:
    """Operators offered to the user for one hop.

    Intermediate hops over entities may continue the chain with "through";
    anything else at intermediate position would terminate the join there.
    One-to-one relationships at the final hop additionally offer "value".
    """
    if position == "intermediate":
        return ["through", "count", "sample"] if datatype == "entity" else []
    ops = list(FINAL_OPS.get(datatype, ()))
    if cardinality == "one":
        ops.append("value")
    return ops


def result_kind(hops: list[Hop], datatypes: dict[str, str], index: int = 0) -> str | None:
    """Value kind produced by folding the plan from hop `index` down.

    Returns None when some operator is illegal for the kind it receives.
    """
    hop = hops[index]
    dt = datatypes.get(hop.property)
    if dt is None:
        return None
    if index == len(hops) - 1:
        return _apply_kind(hop.agg, dt)
    if hop.agg != "through" or dt != "entity" or hop.combine is None:
        return None
    inner = result_kind(hops, datatypes, index + 1)
    if inner is None:
        return None
    return _apply_kind(hop.combine, inner)


def _apply_kind(op: str, kind: str) -> str | None:
    if op == "count":
        return "number"
    if op in ("mean", "sum", "variance"):
        return "number" if kind == "number" else None
    if op in ("max", "min"):
        return kind if kind in ("number", "datetime") else None
    if op in ("sample", "value"):
        return kind
    return None


def validate(plan: JoinPlan, properties: dict) -> list[PlanError]:
    """Structural checks; returns an empty list when the plan is compilable.

    `properties` maps property id to an object with `datatype` (the
    graph_store PropertyInfo shape works as-is).
    """
    errors: list[PlanError] = []
    if not plan.hops:
        return [PlanError(0, "plan has no hops")]
    if plan.depth > MAX_PLAN_DEPTH:
        errors.append(PlanError(plan.depth - 1, f"plan depth {plan.depth} exceeds cap {MAX_PLAN_DEPTH}"))
    if not plan.output_name:
        errors.append(PlanError(0, "output name is empty"))

    for i, hop in enumerate(plan.hops):
        final = i == len(plan.hops) - 1
        info = properties.get(hop.property)
        if info is None:
            errors.append(PlanError(i, f"unknown property {hop.property}"))
            continue
        dt = info.datatype
        if hop.agg not in AGG_OPS:
            errors.append(PlanError(i, f"unknown aggregation {hop.agg!r}"))
        elif final:
            if hop.agg == "through":
                errors.append(PlanError(i, "through is not allowed on the final hop"))
            elif hop.agg != "value" and hop.agg not in FINAL_OPS[dt]:
                errors.append(PlanError(i, f"{hop.agg} is not legal for datatype {dt}"))
        else:
            if hop.agg != "through":
                errors.append(PlanError(i, "non-final hops must use through"))
            elif dt != "entity":
                errors.append(PlanError(i, f"through requires an entity-valued property, got {dt}"))
            elif hop.combine is None:
                errors.append(PlanError(i, "through hop needs a combining operator"))
            elif hop.combine in ("through", "value") or hop.combine not in AGG_OPS:
                errors.append(PlanError(i, f"{hop.combine!r} cannot combine through results"))

    if not errors:
        datatypes = {pid: info.datatype for pid, info in properties.items()}
        if result_kind(plan.hops, datatypes) is None:
            errors.append(PlanError(0, "aggregation chain produces no well-typed result"))
    return errors


def describe(plan: JoinPlan, properties: dict) -> str:
    """Deterministic phrase used as the default output column name."""
    parts = []
    for i, hop in enumerate(plan.hops):
        info = properties.get(hop.property)
        label = info.label if info is not None else hop.property
        if i == len(plan.hops) - 1:
            parts.append(f"{hop.agg} of {label}")
        else:
            parts.append(f"{hop.combine} over {label} of")
    return " ".join(parts)


def with_default_name(plan: JoinPlan, properties: dict) -> JoinPlan:
    if plan.output_name:
        return plan
    return JoinPlan(
        source_column=plan.source_column,
        hops=plan.hops,
        output_name=describe(plan, properties),
        rng_seed=plan.rng_seed,
    )
