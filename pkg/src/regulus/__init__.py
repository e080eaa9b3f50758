"""Constructive regular-subgraph extraction with certifying oracles."""

from .config import DEFAULT, ConstantsConfig
from .errors import (ConsistencyError, LasVegasFailure, PreconditionError, RegulusError,
                     RouteFailure, SearchBudgetExceeded)
from .graph import BipartiteGraph, DegreeSummary, Graph

__version__ = "0.1.0"

__all__ = [
    "DEFAULT",
    "ConstantsConfig",
    "Graph",
    "BipartiteGraph",
    "DegreeSummary",
    "RegulusError",
    "PreconditionError",
    "ConsistencyError",
    "LasVegasFailure",
    "SearchBudgetExceeded",
    "RouteFailure",
]
