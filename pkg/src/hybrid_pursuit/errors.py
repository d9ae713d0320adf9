from __future__ import annotations


class PursuitError(ValueError):
    """Base class for every error raised by hybrid_pursuit."""


class RejectedInputError(PursuitError):
    """An argument violates the preconditions of an operation."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key # Offending parameter, when one can be named
        super().__init__(message)


class DegenerateConfigurationError(PursuitError):
    """The phase-constraint set is undefined because e0 == p0."""


class ScenarioParseError(PursuitError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key # Offending key, None for document-level problems
        self.line = line # 1-based line in the source document, when known
        where = ""
        if key is not None:
            where += f" key '{key}'"
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"Scenario parse error{where}: {message}")
