"""Backward best-first labeling search and the iterated makespan solver.

The decision search grows partial routes backwards from the end depot.  One
priority queue is kept per route length and every sweep of the main loop
pops at most one label per length, so complete routes surface early.  Labels
are pruned when they cannot beat ``ub`` or when a vertex that must precede
their first vertex has not been placed yet, and popped labels are filtered
by the ``Best`` table dominance rule.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Optional

from .model import MINUS_INF, PLUS_INF, Instance, Route, SolveOutcome, Status, arrival_time
from .preprocess import PreprocessResult, build

# Rough footprint of one label plus its heap entry, used to turn a memory budget into a label cap.
LABEL_BYTES = 320


class BudgetExceeded(Exception):
    def __init__(self, status: Status):
        super().__init__(str(status))
        self.status = status


@dataclass
class Budget:
    """Wall-clock deadline plus a per-search cap on stored labels."""

    time_limit: Optional[float] = None
    max_labels: Optional[int] = None
    started: float = field(default_factory=time.perf_counter)

    @classmethod
    def from_limits(cls, time_limit=None, memory_mb=None, max_labels=None) -> "Budget":
        if max_labels is None and memory_mb is not None:
            max_labels = max(1, int(memory_mb * 2**20 // LABEL_BYTES))
        return cls(time_limit, max_labels)

    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    def check(self, labels: int = 0) -> None:
        if self.time_limit is not None and self.elapsed() > self.time_limit:
            raise BudgetExceeded(Status.TIME_LIMIT)
        if self.max_labels is not None and labels > self.max_labels:
            raise BudgetExceeded(Status.MEMORY_LIMIT)


@dataclass
class SearchStats:
    created: int = 0
    dominated: int = 0
    pruned: int = 0
    calls: int = 0


class Label:
    """Partial route ``<vertex> + parent`` ending at the end depot.

    ``hi``, ``total`` and ``earliest`` describe the route's arrival function
    ``max(t + total, earliest)`` for a start ``t`` in ``[a(vertex), hi]``.
    """

    __slots__ = (
        "vertex", "visited", "length", "hi", "total", "earliest", "parent",
        "latest_departure", "earliest_arrival", "arrival_at_latest_departure", "departure_for_earliest_arrival",
    )

    def __init__(self, vertex, visited, length, hi, total, earliest, parent, t0, ub, a_vertex):
        self.vertex = vertex
        self.visited = visited
        self.length = length
        self.hi = hi
        self.total = total
        self.earliest = earliest
        self.parent = parent
        start = t0 if t0 > a_vertex else a_vertex
        if start <= hi:
            ea = start + total if start + total > earliest else earliest
        else:
            ea = PLUS_INF
        self.earliest_arrival = ea
        if earliest <= ub and hi >= a_vertex:
            dep = ub - total if ub - total < hi else hi
            self.latest_departure = dep
            self.arrival_at_latest_departure = dep + total if dep + total > earliest else earliest
        else:
            self.latest_departure = MINUS_INF
            self.arrival_at_latest_departure = PLUS_INF
        if ea == PLUS_INF:
            self.departure_for_earliest_arrival = MINUS_INF
        elif ea == earliest:
            self.departure_for_earliest_arrival = min(hi, earliest - total)
        else:
            self.departure_for_earliest_arrival = ea - total

    def route(self) -> Route:
        out = []
        node = self
        while node is not None:
            out.append(node.vertex)
            node = node.parent
        return tuple(out)

    def __repr__(self):
        return f"Label({self.route()}, ea={self.earliest_arrival}, ld={self.latest_departure})"


def root_label(inst: Instance, t0, ub) -> Label:
    end = inst.end
    a, b = inst.window_open[end], inst.window_close[end]
    return Label(end, 1 << end, 0, b, 0, a, None, t0, ub, a)


def extend(label: Label, w: int, inst: Instance, prep: Optional[PreprocessResult], ub, t0=0) -> Optional[Label]:
    """Label for ``<w> + R`` if it can still beat ``ub`` and no unplaced vertex must precede ``w``."""
    a = inst.window_open
    tau = inst.travel[w][label.vertex]
    if a[w] + tau > label.hi:
        return None
    total = label.total + tau
    hi = min(inst.window_close[w], label.hi - tau)
    earliest = max(label.earliest, a[w] + total)
    child = Label(w, label.visited | 1 << w, label.length + 1, hi, total, earliest, label, t0, ub, a[w])
    if not child.earliest_arrival < ub:
        return None
    if prep is not None and prep.unreachable is not None:
        if prep.unreachable.query(w, child.latest_departure) & ~child.visited:
            return None
    return child


class BestTable:
    """Per first vertex, visited set -> (best latest departure, arrival at that departure)."""

    def __init__(self, size: int):
        self.tables = [dict() for _ in range(size)]

    def get(self, vertex: int, visited: int):
        return self.tables[vertex].get(visited)

    def put(self, vertex: int, visited: int, departure, arrival) -> None:
        self.tables[vertex][visited] = (departure, arrival)


PROCESS = "process"
DISCARD = "discard"


def dominance_filter(best: BestTable, label: Label, ub) -> str:
    entry = best.get(label.vertex, label.visited)
    if entry is not None:
        d, arr = entry
        dep = label.latest_departure
        if dep < d:
            return DISCARD
        if dep == d and arr < ub:
            return DISCARD
        if dep == d and label.arrival_at_latest_departure == ub:
            return DISCARD
    best.put(label.vertex, label.visited, label.latest_departure, label.arrival_at_latest_departure)
    return PROCESS


def decision_search(
    inst: Instance,
    prep: Optional[PreprocessResult],
    t0,
    ub,
    budget: Optional[Budget] = None,
    *,
    stats: Optional[SearchStats] = None,
    dominance: bool = True,
    unreachable: bool = True,
) -> Optional[Route]:
    """A complete elementary route arriving before ``ub`` when leaving at ``t0``, or None.

    ``inst`` should be the tightened instance of ``prep``.  Raises
    ``BudgetExceeded`` when the budget runs out.
    """
    stats = stats if stats is not None else SearchStats()
    stats.calls += 1
    budget = budget or Budget()
    prep_for_u = prep if unreachable else None
    end = inst.end
    size = inst.size
    full = (1 << size) - 1
    queues: list[list] = [[] for _ in range(size)]
    seq = 0
    stored = 1
    root = root_label(inst, t0, ub)
    stats.created += 1
    queues[0].append((root.earliest_arrival, root.departure_for_earliest_arrival, seq, root))
    best = BestTable(size)
    heappush, heappop = heapq.heappush, heapq.heappop

    while any(queues):
        budget.check(stored)
        for k in range(size):
            queue = queues[k]
            if not queue:
                continue
            label = heappop(queue)[3]
            if k == end:
                return label.route()
            if dominance and dominance_filter(best, label, ub) == DISCARD:
                stats.dominated += 1
                continue
            visited = label.visited
            if visited | 1 == full:
                candidates = (0,) if not visited & 1 else ()
            else:
                candidates = [w for w in range(1, end) if not visited >> w & 1]
            nxt = queues[k + 1]
            for w in candidates:
                child = extend(label, w, inst, prep_for_u, ub, t0)
                if child is None:
                    stats.pruned += 1
                    continue
                seq += 1
                stored += 1
                stats.created += 1
                heappush(nxt, (child.earliest_arrival, child.departure_for_earliest_arrival, seq, child))
    return None


def solve_makespan(
    inst: Instance,
    t0=0,
    budget: Optional[Budget] = None,
    *,
    ub=None,
    prep: Optional[PreprocessResult] = None,
    dominance: bool = True,
    unreachable: bool = True,
) -> SolveOutcome:
    """Route minimizing the arrival when leaving the depot at ``t0``.

    Repeats the decision search, each time asking for a route strictly
    earlier than the last one found.  With an explicit ``ub`` only routes
    arriving before it are considered and ``Infeasible`` means none exists.
    On budget exhaustion the best route found so far is returned.
    """
    budget = budget or Budget()
    started = time.perf_counter()
    stats = SearchStats()
    if prep is None:
        prep = build(inst)
    outcome = SolveOutcome(Status.INFEASIBLE)
    if not prep.feasible:
        outcome.elapsed = time.perf_counter() - started
        return outcome
    work = prep.tightened
    start = max(t0, inst.window_open[0])
    bound = inst.horizon + 1 if ub is None else ub
    best_route = None
    status = Status.OPTIMAL
    while True:
        outcome.ub_history.append(bound)
        try:
            route = decision_search(
                work, prep, t0, bound, budget, stats=stats, dominance=dominance, unreachable=unreachable
            )
        except BudgetExceeded as exc:
            status = exc.status
            break
        if route is None:
            break
        found = arrival_time(work, route, start)
        assert found < bound
        best_route, bound = route, found

    outcome.labels_created = stats.created
    outcome.labels_dominated = stats.dominated
    outcome.labels_pruned = stats.pruned
    outcome.decision_calls = stats.calls
    outcome.elapsed = time.perf_counter() - started
    if best_route is None:
        outcome.status = Status.INFEASIBLE if status is Status.OPTIMAL else status
        return outcome
    objective = arrival_time(inst, best_route, start)
    if objective != bound:
        raise RuntimeError(f"certificate mismatch: route {best_route} arrives at {objective}, search reported {bound}")
    outcome.status = status
    outcome.route = best_route
    outcome.objective = int(objective)
    return outcome
