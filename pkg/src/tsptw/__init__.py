"""Exact TSPTW solvers for the makespan and duration objectives."""

from .model import MINUS_INF, PLUS_INF, Instance, SolveOutcome, Status
from .preprocess import build as preprocess
from .search import Budget, decision_search, solve_makespan
from .duration import LocalSearchConfig, solve_duration, solve_duration_reversed

__all__ = [
    "MINUS_INF",
    "PLUS_INF",
    "Instance",
    "SolveOutcome",
    "Status",
    "Budget",
    "LocalSearchConfig",
    "decision_search",
    "preprocess",
    "solve_duration",
    "solve_duration_reversed",
    "solve_makespan",
]
