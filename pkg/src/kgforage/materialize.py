"""Executes join plans: per-row value trees, multi-level aggregation
(innermost hop first, each through level combining its children), 10-row
previews, full-column materialization, and the example subgraph shown by
the through-join dialog."""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from . import query_gen, table
from .client import KgClient
from .errors import (
    EmptyCell,
    IllegalOp,
    InvalidPlan,
    MultiplicityViolation,
    NotAStringColumn,
    RowUnresolvable,
    ShapeMismatch,
)
from .plans import JoinPlan, result_kind, validate, with_default_name
from .table import Dataset
from .values import Value

PREVIEW_ROWS = 10
SUBGRAPH_BRANCHES = 3
SUBGRAPH_LEAVES = 3


# --------------------------------------------------------------- aggregate

def aggregate(values: list[Value], op: str, rng_seed: int | None = None) -> Value | None:
    """Combine a value collection into one value; see plans.FINAL_OPS for
    which operators are legal for which kinds."""
    if op == "through":
        raise IllegalOp("through is not a terminal aggregation")
    if op == "count":
        return Value.number(len(values))
    if not values:
        return None
    kinds = {v.kind for v in values}
    if len(kinds) > 1:
        raise IllegalOp(f"mixed value kinds {sorted(kinds)} under {op}")
    kind = kinds.pop()

    if op == "value":
        if len(values) > 1:
            raise MultiplicityViolation(f"value aggregation got {len(values)} elements")
        return values[0]
    if op == "sample":
        return random.Random(rng_seed).choice(values)
    if op in ("max", "min"):
        if kind not in ("number", "datetime"):
            raise IllegalOp(f"{op} over {kind} values")
        return (max if op == "max" else min)(values, key=lambda v: v.value)
    if kind != "number":
        raise IllegalOp(f"{op} over {kind} values")
    nums = [float(v.value) for v in values]
    if op == "mean":
        return Value.number(sum(nums) / len(nums))
    if op == "sum":
        return Value.number(sum(nums))
    if op == "variance":
        mean = sum(nums) / len(nums)
        return Value.number(sum((x - mean) ** 2 for x in nums) / len(nums))
    raise IllegalOp(op)


# -------------------------------------------------------------- value trees

@dataclass
class ValueTree:
    """Per-row slice of the graph: nested child maps ending in leaf values."""

    root: str
    node: object  # dict[str, node] at through levels, list[Value] at the leaf


def empty_node(depth: int):
    return {} if depth > 1 else []


def build_trees(bindings, plan: JoinPlan, entities: list[str]) -> dict[str, ValueTree]:
    """Group raw chain bindings (?e, ?x1, ..., ?xk) into one tree per root.

    Every requested entity gets a tree; entities with no matching path get
    an empty one so count-style aggregations see zero elements.
    """
    depth = plan.depth
    trees = {e: ValueTree(root=e, node=empty_node(depth)) for e in entities}
    hop_vars = [f"x{i + 1}" for i in range(depth)]
    for row in bindings.rows:
        root = row.get("e")
        if root is None or root.kind != "entity" or root.value not in trees:
            continue
        node = trees[root.value].node
        for var in hop_vars[:-1]:
            step = row.get(var)
            if step is None or step.kind != "entity":
                node = None
                break
            key = step.value
            if var == hop_vars[-2]:
                node = node.setdefault(key, [])
            else:
                node = node.setdefault(key, {})
        if node is None:
            continue
        leaf = row.get(hop_vars[-1])
        if leaf is not None:
            node.append(leaf)
    return trees


def fold_tree(tree: ValueTree, plan: JoinPlan, rng_seed: int | None = None) -> Value | None:
    """Innermost aggregation at the leaves, then each through level combines
    its children's results; null children are dropped first."""
    if rng_seed is None:
        rng_seed = plan.rng_seed
    return _fold(tree.node, plan.hops, 0, rng_seed)


def _fold(node, hops, index: int, rng_seed) -> Value | None:
    hop = hops[index]
    if index == len(hops) - 1:
        if not isinstance(node, list):
            raise ShapeMismatch(f"expected leaf values at hop {index}")
        return aggregate(node, hop.agg, rng_seed)
    if not isinstance(node, dict):
        raise ShapeMismatch(f"expected child map at hop {index}")
    results = []
    for child in node:
        value = _fold(node[child], hops, index + 1, rng_seed)
        if value is not None:
            results.append(value)
    return aggregate(results, hop.combine, rng_seed)


# ------------------------------------------------------------ join pipeline

@dataclass
class JoinPreview:
    rows: list[str | None]
    values: list[Value | None]
    plan: JoinPlan
    null_count: int


def _plan_properties(client: KgClient, plan: JoinPlan) -> dict:
    if client.cfg.kind == "local":
        return client.all_properties()
    return client.property_metadata([hop.property for hop in plan.hops])


def _check_plan(client: KgClient, dataset: Dataset, plan: JoinPlan) -> tuple[JoinPlan, dict]:
    column = dataset.column(plan.source_column)
    if column.ctype != "string":
        raise InvalidPlan(f"source column {plan.source_column!r} is not a string column")
    properties = _plan_properties(client, plan)
    plan = with_default_name(plan, properties)
    errors = validate(plan, properties)
    if errors:
        raise InvalidPlan("; ".join(f"hop {e.hop_index}: {e.reason}" for e in errors))
    return plan, properties


def _compute_values(
    client: KgClient, cells: list[str | None], plan: JoinPlan
) -> list[Value | None]:
    """Resolve distinct cells once, fetch bindings in batches, fold per root."""
    resolved: dict[str, str | None] = {}
    for cell in cells:
        if cell is None or cell in resolved:
            continue
        try:
            resolved[cell] = client.resolve(cell).chosen
        except EmptyCell:
            resolved[cell] = None
    entities = sorted({e for e in resolved.values() if e is not None})
    folded: dict[str, Value | None] = {}
    if entities:
        template = query_gen.compile_values_fetch(
            plan, None, _plan_properties(client, plan), dialect=client.dialect
        )
        bindings = client.run_select_batched(template, entities)
        trees = build_trees(bindings, plan, entities)
        folded = {e: fold_tree(trees[e], plan) for e in entities}
    out: list[Value | None] = []
    for cell in cells:
        entity = resolved.get(cell) if cell is not None else None
        out.append(folded.get(entity) if entity is not None else None)
    return out


def preview_join(client: KgClient, dataset: Dataset, plan: JoinPlan) -> JoinPreview:
    """Join only the first min(10, row_count) rows."""
    plan, _ = _check_plan(client, dataset, plan)
    cells = list(dataset.column(plan.source_column).cells[:PREVIEW_ROWS])
    values = _compute_values(client, cells, plan)
    return JoinPreview(
        rows=cells,
        values=values,
        plan=plan,
        null_count=sum(1 for v in values if v is None),
    )


def render_value(client: KgClient, value: Value | None) -> str | None:
    if value is None:
        return None
    if value.kind == "entity":
        return client.entity_label(value.value)
    return value.render()


def materialize(client: KgClient, dataset: Dataset, plan: JoinPlan) -> Dataset:
    """Append the plan's column for every row; fails without touching the
    dataset when any batch fails."""
    plan, properties = _check_plan(client, dataset, plan)
    cells = list(dataset.column(plan.source_column).cells)
    values = _compute_values(client, cells, plan)
    datatypes = {pid: info.datatype for pid, info in properties.items()}
    kind = result_kind(plan.hops, datatypes)
    ctype = "string" if kind == "entity" else kind
    rendered = [render_value(client, v) for v in values]
    return table.add_augmented_column(dataset, plan.output_name, rendered, ctype, plan)


# --------------------------------------------------------- example subgraph

@dataclass
class SubgraphBranch:
    id: str
    label: str
    values: list[str] = field(default_factory=list)
    children: list["SubgraphBranch"] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"id": self.id, "label": self.label}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        else:
            out["values"] = self.values
        return out


@dataclass
class SubgraphSample:
    root_id: str
    root_label: str
    levels: list[dict]  # per hop: property, label, op
    branches: list[SubgraphBranch]
    computed_result: str | None

    def to_json(self) -> dict:
        return {
            "root": {"id": self.root_id, "label": self.root_label},
            "levels": self.levels,
            "branches": [b.to_json() for b in self.branches],
            "computed_result": self.computed_result,
        }


def _truncate(node, depth: int):
    """First SUBGRAPH_BRANCHES children per level, SUBGRAPH_LEAVES leaves."""
    if depth == 1:
        return node[:SUBGRAPH_LEAVES]
    return {
        child: _truncate(node[child], depth - 1)
        for child in list(node)[:SUBGRAPH_BRANCHES]
    }


def _substitute_ops(plan: JoinPlan, op_overrides: dict[int, str] | None) -> JoinPlan:
    if not op_overrides:
        return plan
    hops = list(plan.hops)
    for level, op in op_overrides.items():
        if level < 0 or level >= len(hops):
            raise InvalidPlan(f"no hop at level {level}")
        hop = hops[level]
        if level == len(hops) - 1:
            hops[level] = replace(hop, agg=op)
        else:
            hops[level] = replace(hop, combine=op)
    return replace(plan, hops=hops)


def example_subgraph(
    client: KgClient,
    dataset: Dataset,
    plan: JoinPlan,
    row_index: int,
    op_overrides: dict[int, str] | None = None,
) -> SubgraphSample:
    """Depth-limited example slice for one row, folded with the (possibly
    substituted) per-level operators. The result is illustrative: it is
    computed over the truncated sample, not the full neighborhood."""
    plan, properties = _check_plan(client, dataset, plan)
    if plan.depth < 2:
        raise InvalidPlan("example subgraphs need a plan of depth >= 2")
    plan = _substitute_ops(plan, op_overrides)
    errors = validate(plan, properties)
    if errors:
        raise InvalidPlan("; ".join(f"hop {e.hop_index}: {e.reason}" for e in errors))

    column = dataset.column(plan.source_column)
    if row_index < 0 or row_index >= dataset.row_count:
        raise RowUnresolvable(f"row {row_index} out of range")
    cell = column.cells[row_index]
    if cell is None or not cell.strip():
        raise RowUnresolvable(f"row {row_index} has an empty cell")
    chosen = client.resolve(cell).chosen
    if chosen is None:
        raise RowUnresolvable(cell)

    query = query_gen.compile_subgraph(plan, chosen, properties, dialect=client.dialect)
    bindings = client.run_select(query)
    tree = build_trees(bindings, plan, [chosen])[chosen]
    truncated = ValueTree(root=chosen, node=_truncate(tree.node, plan.depth))
    result = fold_tree(truncated, plan)

    labels = client.entity_labels(_entity_ids(truncated.node, plan.depth))
    levels = []
    for i, hop in enumerate(plan.hops):
        info = properties.get(hop.property)
        levels.append({
            "property": hop.property,
            "label": info.label if info else hop.property,
            "op": hop.agg if i == len(plan.hops) - 1 else hop.combine,
        })
    return SubgraphSample(
        root_id=chosen,
        root_label=client.entity_label(chosen),
        levels=levels,
        branches=_branches(client, truncated.node, plan.depth, labels),
        computed_result=render_value(client, result),
    )


def _entity_ids(node, depth: int) -> list[str]:
    if depth == 1:
        return [v.value for v in node if v.kind == "entity"]
    out = []
    for child, sub in node.items():
        out.append(child)
        out.extend(_entity_ids(sub, depth - 1))
    return out


def _branches(client: KgClient, node, depth: int, labels: dict[str, str]) -> list[SubgraphBranch]:
    if depth == 1:
        return []
    out = []
    for child, sub in node.items():
        branch = SubgraphBranch(id=child, label=labels.get(child, child))
        if depth == 2:
            branch.values = [
                labels.get(v.value, v.value) if v.kind == "entity" else v.render()
                for v in sub
            ]
        else:
            branch.children = _branches(client, sub, depth - 1, labels)
        out.append(branch)
    return out
