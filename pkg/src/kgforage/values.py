"""Tagged values carried on knowledge-graph edges and in dataset cells."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import ParseError

KINDS = ("entity", "number", "string", "datetime")


def parse_datetime(text: str) -> datetime:
    """Parse an ISO-8601 timestamp; trailing 'Z' means UTC."""
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def format_datetime(dt: datetime) -> str:
    dt = dt.astimezone(timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True, order=False)
class Value:
    """One graph value: an entity reference or a literal."""

    kind: str
    value: object

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"bad value kind {self.kind!r}")
        if self.kind == "number" and not math.isfinite(self.value):
            raise ValueError("number values must be finite")

    @staticmethod
    def entity(eid: str) -> "Value":
        return Value("entity", eid)

    @staticmethod
    def number(x: float) -> "Value":
        return Value("number", float(x))

    @staticmethod
    def string(s: str) -> "Value":
        return Value("string", s)

    @staticmethod
    def datetime_(dt: datetime | str) -> "Value":
        if isinstance(dt, str):
            dt = parse_datetime(dt)
        return Value("datetime", dt)

    @staticmethod
    def from_json(obj: dict, line: int = 0) -> "Value":
        """Decode the fixture wire form, e.g. {"number": 100}."""
        if not isinstance(obj, dict) or len(obj) != 1:
            raise ParseError(line, f"bad value encoding: {obj!r}")
        (key, raw), = obj.items()
        if key == "number":
            return Value.number(raw)
        if key == "string":
            return Value.string(str(raw))
        if key == "entity":
            return Value.entity(str(raw))
        if key == "datetime":
            try:
                return Value.datetime_(str(raw))
            except ValueError as exc:
                raise ParseError(line, f"bad datetime {raw!r}: {exc}") from None
        raise ParseError(line, f"unknown value kind {key!r}")

    def to_json(self) -> dict:
        if self.kind == "datetime":
            return {"datetime": format_datetime(self.value)}
        return {self.kind: self.value}

    def render(self) -> str:
        """Plain-text form used for CSV cells and API payloads."""
        if self.kind == "datetime":
            return format_datetime(self.value)
        if self.kind == "number":
            x = self.value
            if float(x).is_integer():
                return str(int(x))
            return repr(float(x))
        return str(self.value)
