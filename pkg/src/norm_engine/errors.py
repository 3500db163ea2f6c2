"""Exception hierarchy for the engine.

Every error raised on purpose by this package derives from EngineError, so
callers (CLI, service) can separate domain failures from genuine bugs.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all deliberate engine failures."""


class DomainError(EngineError):
    """A numeric argument is outside the function's domain (non-finite, v=0, ...)."""


class UnknownKeyError(EngineError, KeyError):
    """A metric or belief key is not registered for the estimator it was asked of."""

    def __str__(self) -> str:  # KeyError quotes its arg; keep the plain message
        return Exception.__str__(self)


class VisibilityError(EngineError):
    """An update function references state owned by a different estimator."""


class IllegalActionError(EngineError):
    """The action is not available at the current progress state for that actor."""

    def __init__(self, message: str, legal: tuple[str, ...] = ()):
        super().__init__(message)
        self.legal = legal


class SessionTerminatedError(IllegalActionError):
    """The session reached a terminal progress state; no further actions apply."""


class TotalConflictError(EngineError):
    """Dempster combination of fully contradictory masses (conflict weight 1)."""


class AggregationError(EngineError):
    """Group mass aggregation received malformed member masses."""


class TraceError(EngineError):
    """A recorded trace cannot be replayed or branched as requested."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class CompileError(EngineError):
    """A scenario source with outstanding error diagnostics was compiled."""

    def __init__(self, message: str, diagnostics: tuple = ()):
        super().__init__(message)
        self.diagnostics = diagnostics
