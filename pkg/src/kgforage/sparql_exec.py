"""Executor for the SPARQL subset emitted by the plan compiler.

Supported: SELECT over basic graph patterns, VALUES, OPTIONAL, GROUP BY
with COUNT/MIN/MAX/SUM/AVG, and LIMIT. Anything else is rejected with
UnsupportedSyntax rather than ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, UnsupportedSyntax
from .graph_store import KnowledgeGraph
from .values import Value

AGG_FUNCS = ("COUNT", "MIN", "MAX", "SUM", "AVG")
KEYWORDS = {"SELECT", "WHERE", "VALUES", "OPTIONAL", "GROUP", "BY", "AS", "LIMIT", *AGG_FUNCS}

# Real SPARQL syntax outside the supported subset; rejected, never ignored.
FORBIDDEN = {
    "FILTER", "ORDER", "UNION", "DISTINCT", "REDUCED", "OFFSET", "SERVICE",
    "BIND", "MINUS", "GRAPH", "HAVING", "ASC", "DESC", "PREFIX", "BASE",
    "CONSTRUCT", "ASK", "DESCRIBE", "EXISTS", "NOT", "REGEX", "SAMPLE",
    "GROUP_CONCAT", "UNDEF", "FROM",
}

_TOKEN_RE = re.compile(r'"(?:[^"\\]|\\.)*"|[(){}.]|[^\s(){}.]+')


@dataclass
class BindingTable:
    variables: list[str]
    rows: list[dict[str, Value | None]] = field(default_factory=list)

    def column(self, var: str) -> list[Value | None]:
        return [row.get(var) for row in self.rows]

    def as_tuples(self) -> list[tuple]:
        return [tuple(row.get(v) for v in self.variables) for row in self.rows]


# ---------------------------------------------------------------- parsing

@dataclass
class _SelectItem:
    var: str                 # output variable name
    agg: str | None = None   # aggregate function, if any
    arg: str | None = None   # aggregated variable


@dataclass
class _Triple:
    subject: str | tuple
    predicate: str | tuple
    object: str | tuple
    # constants are wrapped as ("const", Value-or-id); variables are plain names


@dataclass
class _Values:
    var: str
    terms: list


@dataclass
class _Optional:
    patterns: list


@dataclass
class _Query:
    select: list[_SelectItem]
    patterns: list
    group_by: list[str]
    limit: int | None


class _Tokens:
    def __init__(self, text: str):
        self.toks = _TOKEN_RE.findall(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError(0, "unexpected end of query")
        self.pos += 1
        return tok

    def expect(self, want: str) -> None:
        tok = self.next()
        if tok.upper() != want.upper():
            raise ParseError(0, f"expected {want!r}, got {tok!r}")


def _parse_term(tok: str):
    """A term is a ?variable or a constant (id, number, or quoted string)."""
    if tok.startswith("?"):
        return tok[1:]
    if tok.startswith('"'):
        return ("const", Value.string(tok[1:-1].replace('\\"', '"')))
    try:
        return ("const", Value.number(float(tok)))
    except ValueError:
        pass
    if tok.upper() in FORBIDDEN:
        raise UnsupportedSyntax(tok)
    if tok.upper() in KEYWORDS:
        raise ParseError(0, f"unexpected keyword {tok!r} in pattern")
    if tok in "(){}.":
        raise ParseError(0, f"unexpected {tok!r} in pattern")
    return ("id", tok)


def _parse_patterns(toks: _Tokens) -> list:
    patterns = []
    while True:
        tok = toks.peek()
        if tok is None or tok == "}":
            return patterns
        if tok == ".":
            toks.next()
            continue
        upper = tok.upper()
        if upper == "VALUES":
            toks.next()
            var = toks.next()
            if not var.startswith("?"):
                raise ParseError(0, f"VALUES needs a variable, got {var!r}")
            toks.expect("{")
            terms = []
            while toks.peek() != "}":
                terms.append(_parse_term(toks.next()))
            toks.expect("}")
            patterns.append(_Values(var[1:], terms))
        elif upper == "OPTIONAL":
            toks.next()
            toks.expect("{")
            inner = _parse_patterns(toks)
            toks.expect("}")
            patterns.append(_Optional(inner))
        elif upper in KEYWORDS or tok in "(){":
            raise UnsupportedSyntax(tok)
        else:
            subj = _parse_term(toks.next())
            pred = _parse_term(toks.next())
            obj = _parse_term(toks.next())
            patterns.append(_Triple(subj, pred, obj))


def parse(text: str) -> _Query:
    toks = _Tokens(text)
    toks.expect("SELECT")
    select: list[_SelectItem] = []
    while True:
        tok = toks.peek()
        if tok is None:
            raise ParseError(0, "missing WHERE clause")
        if tok.upper() == "WHERE":
            break
        tok = toks.next()
        if tok.startswith("?"):
            select.append(_SelectItem(var=tok[1:]))
        elif tok == "(":
            func = toks.next().upper()
            if func not in AGG_FUNCS:
                raise UnsupportedSyntax(func)
            toks.expect("(")
            arg = toks.next()
            if not arg.startswith("?"):
                raise UnsupportedSyntax(arg)
            toks.expect(")")
            toks.expect("AS")
            alias = toks.next()
            if not alias.startswith("?"):
                raise ParseError(0, f"aggregate alias must be a variable, got {alias!r}")
            toks.expect(")")
            select.append(_SelectItem(var=alias[1:], agg=func, arg=arg[1:]))
        else:
            raise UnsupportedSyntax(tok)
    if not select:
        raise ParseError(0, "empty SELECT clause")
    toks.expect("WHERE")
    toks.expect("{")
    patterns = _parse_patterns(toks)
    toks.expect("}")

    group_by: list[str] = []
    limit: int | None = None
    while toks.peek() is not None:
        tok = toks.next()
        upper = tok.upper()
        if upper == "GROUP":
            toks.expect("BY")
            while toks.peek() is not None and toks.peek().startswith("?"):
                group_by.append(toks.next()[1:])
            if not group_by:
                raise ParseError(0, "GROUP BY needs at least one variable")
        elif upper == "LIMIT":
            try:
                limit = int(toks.next())
            except ValueError:
                raise ParseError(0, "LIMIT needs an integer")
        else:
            raise UnsupportedSyntax(tok)
    return _Query(select, patterns, group_by, limit)


# -------------------------------------------------------------- evaluation

def _match_triples(g: KnowledgeGraph, triple: _Triple, sol: dict) -> list[dict]:
    def resolve_node(term):
        if isinstance(term, str):  # variable
            bound = sol.get(term)
            if bound is None:
                return None, term
            if not isinstance(bound, Value) or bound.kind != "entity":
                return "", term  # bound to a non-entity: cannot be a subject
            return bound.value, term
        if term[0] == "id":
            return term[1], None
        return "", None

    subj_id, subj_var = resolve_node(triple.subject)
    if subj_id == "":
        return []
    pred = triple.predicate
    pred_id, pred_var = (None, pred) if isinstance(pred, str) else (pred[1], None)
    if pred_id is None and pred_var in sol:
        bound = sol[pred_var]
        pred_id = bound.value if isinstance(bound, Value) and bound.kind == "entity" else None
        if pred_id is None:
            return []
        pred_var = None

    out = []
    subjects = [subj_id] if subj_id is not None else list(g.entities)
    for sid in subjects:
        for (stmt_subj, stmt_prop), vals in g.statements.items():
            if stmt_subj != sid:
                continue
            if pred_id is not None and stmt_prop != pred_id:
                continue
            for value in vals:
                new = dict(sol)
                if subj_var is not None:
                    new[subj_var] = Value.entity(sid)
                if pred_var is not None:
                    new[pred_var] = Value.entity(stmt_prop)
                obj = triple.object
                if isinstance(obj, str):
                    if obj in sol:
                        if sol[obj] != value:
                            continue
                    else:
                        new[obj] = value
                else:
                    want = Value.entity(obj[1]) if obj[0] == "id" else obj[1]
                    if value != want:
                        continue
                out.append(new)
    return out


def _eval_patterns(g: KnowledgeGraph, patterns: list, solutions: list[dict]) -> list[dict]:
    for pat in patterns:
        if isinstance(pat, _Values):
            expanded = []
            for sol in solutions:
                for term in pat.terms:
                    value = Value.entity(term[1]) if term[0] == "id" else term[1]
                    if pat.var in sol and sol[pat.var] != value:
                        continue
                    new = dict(sol)
                    new[pat.var] = value
                    expanded.append(new)
            solutions = expanded
        elif isinstance(pat, _Triple):
            solutions = [m for sol in solutions for m in _match_triples(g, pat, sol)]
        elif isinstance(pat, _Optional):
            merged = []
            for sol in solutions:
                inner = _eval_patterns(g, pat.patterns, [sol])
                merged.extend(inner if inner else [sol])
            solutions = merged
        else:  # pragma: no cover - parser only builds the three kinds
            raise UnsupportedSyntax(repr(pat))
    return solutions


def _aggregate(func: str, values: list[Value]) -> Value | None:
    if func == "COUNT":
        return Value.number(len(values))
    if not values:
        return None
    if func in ("MIN", "MAX"):
        key = (lambda v: v.value)
        return (max if func == "MAX" else min)(values, key=key)
    nums = [v.value for v in values if v.kind == "number"]
    if func == "SUM":
        return Value.number(sum(nums))
    if func == "AVG":
        return Value.number(sum(nums) / len(nums)) if nums else None
    raise UnsupportedSyntax(func)


def execute_select(g: KnowledgeGraph, query: str) -> BindingTable:
    """Run a query in the supported subset against the graph."""
    q = parse(query)
    solutions = _eval_patterns(g, q.patterns, [{}])

    variables = [item.var for item in q.select]
    has_agg = any(item.agg for item in q.select)
    if q.group_by or has_agg:
        groups: dict[tuple, list[dict]] = {}
        if q.group_by:
            for sol in solutions:
                key = tuple(sol.get(v) for v in q.group_by)
                groups.setdefault(key, []).append(sol)
        else:
            groups[()] = solutions  # implicit single group
        rows = []
        for key, sols in groups.items():
            row: dict[str, Value | None] = {}
            for gv, gval in zip(q.group_by, key):
                row[gv] = gval
            for item in q.select:
                if item.agg:
                    vals = [s[item.arg] for s in sols if s.get(item.arg) is not None]
                    row[item.var] = _aggregate(item.agg, vals)
                elif item.var not in q.group_by:
                    raise ParseError(0, f"?{item.var} selected but not grouped")
            rows.append({v: row.get(v) for v in variables})
    else:
        rows = [{v: sol.get(v) for v in variables} for sol in solutions]

    if q.limit is not None:
        rows = rows[: q.limit]
    return BindingTable(variables=variables, rows=rows)
