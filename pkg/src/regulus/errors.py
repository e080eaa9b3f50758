"""Exception hierarchy shared by every module."""

from __future__ import annotations

from typing import Any


class RegulusError(Exception):
    """Base class for all library errors."""


class PreconditionError(RegulusError, ValueError):
    """An operation was called outside its documented domain."""


class ConsistencyError(RegulusError, RuntimeError):
    """An internal invariant failed; indicates a bug or mis-scaled constants."""


class LasVegasFailure(RegulusError):
    """A randomized step exhausted its retry budget without a certified output."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SearchBudgetExceeded(RegulusError):
    """An exact search ran out of nodes before reaching a verdict.

    Distinct from "no solution": callers must treat it as indeterminate.
    """

    def __init__(self, message: str, nodes: int = 0):
        super().__init__(message)
        self.nodes = nodes


class RouteFailure(RegulusError):
    """A regularization route could not produce the requested subgraph."""

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.details = details or {}
