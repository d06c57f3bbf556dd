"""Exception hierarchy shared across the engine."""


class KgForageError(Exception):
    """Base class for all engine errors."""


class ParseError(KgForageError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class ReferenceError_(KgForageError):
    """A record references an undeclared entity or property."""


class UnknownEntity(KgForageError):
    pass


class UnknownProperty(KgForageError):
    pass


class UnsupportedSyntax(KgForageError):
    def __init__(self, token: str):
        super().__init__(f"unsupported syntax: {token!r}")
        self.token = token


class BackendUnavailable(KgForageError):
    def __init__(self, message: str = "backend unavailable", chunk: int | None = None):
        super().__init__(message if chunk is None else f"{message} (chunk {chunk})")
        self.chunk = chunk


class QueryRejected(KgForageError):
    pass


class EmptyCell(KgForageError):
    pass


class CsvError(KgForageError):
    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class RaggedRows(CsvError):
    def __init__(self, row: int):
        super().__init__(row, "ragged row")


class LengthMismatch(KgForageError):
    pass


class UnknownColumn(KgForageError):
    pass


class NotAStringColumn(KgForageError):
    pass


class AllCellsUnresolved(KgForageError):
    pass


class EmptySample(KgForageError):
    pass


class BadCounts(KgForageError):
    pass


class EmptyEntitySet(KgForageError):
    pass


class InvalidPlan(KgForageError):
    pass


class IllegalOp(KgForageError):
    pass


class MultiplicityViolation(KgForageError):
    pass


class ShapeMismatch(KgForageError):
    pass


class RowUnresolvable(KgForageError):
    pass
