"""Exception hierarchy shared by every module.

Two families exist so the command line can map them onto exit codes:
``DomainError`` for mathematically impossible requests and ``ParseError``
for malformed input text.
"""

from __future__ import annotations


class DomainError(Exception):
    """The input is well formed but the requested quantity does not exist."""


class InvalidGraphError(DomainError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations) or "invalid graph")


class NotNegativeDefiniteError(DomainError):
    pass


class SingularMatrixError(DomainError):
    pass


class HypothesisError(DomainError):
    """A machine-checkable precondition of a formula is violated."""


class InfiniteTangencyError(DomainError):
    pass


class NonStabilizingSeriesError(DomainError):
    def __init__(self, message: str, order: int):
        self.order = order
        super().__init__(f"{message} (series order {order})")


class ParseError(Exception):
    """Syntax or reference error, reported with a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
