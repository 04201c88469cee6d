"""Sliding-window duration solver built on the makespan solver.

Departures ``p`` are scanned on the integer grid from the latest departure
of a makespan-optimal route up to the latest departure of any route.  For
each ``p`` a local search tries to keep the current route optimal; only when
it fails is the exact makespan solver called with ``t0 = p``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .model import (
    Instance,
    Route,
    Segment,
    Status,
    arrival_time,
    latest_departure,
    reverse,
    reverse_route,
)
from .preprocess import build
from .search import Budget, BudgetExceeded, solve_makespan

log = logging.getLogger(__name__)

OPERATORS = ("swap", "two_opt", "shift")


class ScaleTooFine(ValueError):
    """The departure grid at this decimal scale is too fine to scan."""


@dataclass(frozen=True)
class LocalSearchConfig:
    operators: tuple[str, ...] = OPERATORS
    strategy: str = "first-improvement"
    max_passes: int = 10_000

    def __post_init__(self):
        if not self.operators:
            raise ValueError("at least one local search operator is required")
        unknown = set(self.operators) - set(OPERATORS)
        if unknown:
            raise ValueError(f"unknown operators: {sorted(unknown)}")


@dataclass
class DurationOutcome:
    status: Status
    route: Optional[Route] = None
    departure: Optional[int] = None
    duration: Optional[int] = None
    makespan_calls: int = 0
    windows_scanned: int = 0
    last_departure: Optional[int] = None
    elapsed: float = 0.0
    labels_created: int = 0
    labels_dominated: int = 0
    labels_pruned: int = 0
    q_history: list = field(default_factory=list)
    incumbent_history: list = field(default_factory=list)

    @property
    def objective(self):
        return self.duration


# -- local search -----------------------------------------------------------


class _Evaluator:
    """Prefix and suffix arrival functions of a route, for O(1) neighbour evaluation."""

    def __init__(self, inst: Instance, route: Sequence[int]):
        self.inst = inst
        self.route = list(route)
        self.vertex = [Segment.vertex(inst, v) for v in range(inst.size)]
        seg = [self.vertex[v] for v in self.route]
        prefix = [seg[0]]
        for s in seg[1:]:
            prefix.append(prefix[-1].then(inst, s))
        suffix = [seg[-1]]
        for s in reversed(seg[:-1]):
            suffix.append(s.then(inst, suffix[-1]))
        suffix.reverse()
        self.prefix, self.suffix = prefix, suffix

    def join(self, *parts: Optional[Segment]) -> Segment:
        out = None
        for part in parts:
            if part is None:
                continue
            out = part if out is None else out.then(self.inst, part)
        return out

    def whole(self) -> Segment:
        return self.prefix[-1]

    def neighbours(self, operator: str):
        """Yield ``(segment, route builder)`` for every move of ``operator``."""
        r, P, S, V, inst = self.route, self.prefix, self.suffix, self.vertex, self.inst
        last = len(r) - 2  # last customer position
        if operator == "swap":
            for i in range(1, last):
                inner = None
                for j in range(i + 1, last + 1):
                    seg = self.join(P[i - 1], V[r[j]], inner, V[r[i]], S[j + 1])
                    yield seg, (lambda i=i, j=j: r[:i] + [r[j]] + r[i + 1 : j] + [r[i]] + r[j + 1 :])
                    inner = V[r[j]] if inner is None else inner.then(inst, V[r[j]])
        elif operator == "two_opt":
            for i in range(1, last):
                rev = V[r[i]]
                for j in range(i + 1, last + 1):
                    rev = V[r[j]].then(inst, rev)
                    seg = self.join(P[i - 1], rev, S[j + 1])
                    yield seg, (lambda i=i, j=j: r[:i] + r[i : j + 1][::-1] + r[j + 1 :])
        elif operator == "shift":
            for i in range(1, last + 1):
                mid = None
                for j in range(i + 1, last + 1):
                    mid = V[r[j]] if mid is None else mid.then(inst, V[r[j]])
                    seg = self.join(P[i - 1], mid, V[r[i]], S[j + 1])
                    yield seg, (lambda i=i, j=j: r[:i] + r[i + 1 : j + 1] + [r[i]] + r[j + 1 :])
                mid = None
                for j in range(i - 1, 0, -1):
                    mid = V[r[j]] if mid is None else V[r[j]].then(inst, mid)
                    seg = self.join(P[j - 1], V[r[i]], mid, S[i + 1])
                    yield seg, (lambda i=i, j=j: r[:j] + [r[i]] + r[j:i] + r[i + 1 :])
        else:
            raise ValueError(operator)


def _improve(inst: Instance, route: Sequence[int], score: Callable[[Segment], float], cfg: LocalSearchConfig) -> Route:
    """First-improvement descent minimizing ``score``; restarts after every accepted move."""
    route = list(route)
    if inst.n < 2:
        return tuple(route)
    ev = _Evaluator(inst, route)
    current = score(ev.whole())
    for _ in range(cfg.max_passes):
        moved = False
        for operator in cfg.operators:
            for seg, make in ev.neighbours(operator):
                value = score(seg)
                if value < current:
                    route = make()
                    current = value
                    moved = True
                    break
            if moved:
                break
        if not moved:
            break
        ev = _Evaluator(inst, route)
    return tuple(route)


def ls_min_arrival(inst: Instance, r: Sequence[int], p, cfg: Optional[LocalSearchConfig] = None) -> Route:
    """Local search lowering the arrival of ``r`` when departing at ``p``."""
    return _improve(inst, r, lambda seg: seg.arrival(p), cfg or LocalSearchConfig())


def ls_max_departure(inst: Instance, r: Sequence[int], q, cfg: Optional[LocalSearchConfig] = None) -> tuple[Route, int]:
    """Local search pushing back the latest departure that still arrives exactly at ``q``."""
    better = _improve(inst, r, lambda seg: -seg.departure_for(q), cfg or LocalSearchConfig())
    return better, latest_departure(inst, better, q)


# -- sliding window ---------------------------------------------------------


def last_departure_bound(inst: Instance, t_star, budget: Optional[Budget] = None) -> int:
    """Latest departure of any elementary route, found by a makespan solve on the reverse network.

    Returns ``t_star`` when no route can leave later than ``t_star``.
    """
    T = inst.horizon
    out = solve_makespan(reverse(inst), 0, budget, ub=T - t_star)
    if out.status is Status.OPTIMAL:
        return T - out.objective
    if out.status is Status.INFEASIBLE:
        return t_star
    raise BudgetExceeded(out.status)


def _check_scale(inst: Instance, allow_fine_scale: bool) -> None:
    if inst.scale >= 4 and not allow_fine_scale:
        raise ScaleTooFine(
            f"{inst.name or 'instance'}: scale 10^-{inst.scale} gives {inst.horizon + 1} departures to scan; "
            "pass allow_fine_scale=True to run anyway"
        )


def solve_duration(
    inst: Instance,
    budget: Optional[Budget] = None,
    cfg: Optional[LocalSearchConfig] = None,
    *,
    allow_fine_scale: bool = False,
) -> DurationOutcome:
    """Route and departure minimizing arrival minus departure."""
    _check_scale(inst, allow_fine_scale)
    cfg = cfg or LocalSearchConfig()
    budget = budget or Budget()
    started = time.perf_counter()
    T = inst.horizon
    prep = build(inst)
    out = DurationOutcome(Status.INFEASIBLE)

    def absorb(result):
        out.makespan_calls += 1
        out.labels_created += result.labels_created
        out.labels_dominated += result.labels_dominated
        out.labels_pruned += result.labels_pruned

    def finish(status):
        out.status = status
        out.elapsed = time.perf_counter() - started
        if out.route is not None:
            arrive = arrival_time(inst, out.route, out.departure)
            if arrive - out.departure != out.duration:
                raise RuntimeError(f"certificate mismatch for {out.route} departing {out.departure}")
        return out

    first = solve_makespan(inst, 0, budget, prep=prep)
    absorb(first)
    if first.route is None:
        return finish(first.status)
    q = first.objective
    route, t_star = ls_max_departure(inst, first.route, q, cfg)
    out.route, out.departure, out.duration = route, t_star, q - t_star
    out.incumbent_history.append(out.duration)
    out.q_history.append(q)
    if first.status is not Status.OPTIMAL:
        return finish(first.status)

    try:
        last = last_departure_bound(inst, t_star, budget)
        out.last_departure = last
        log.debug("latest departure bound %s (used for the step-6 upper bound)", last)
        p = t_star + 1
        while p <= last:
            budget.check()
            out.windows_scanned += 1
            route = ls_min_arrival(inst, route, p, cfg)
            if arrival_time(inst, route, p) > q:
                ub = min(last + out.duration, T + 1)
                exact = solve_makespan(inst, p, budget, ub=ub, prep=prep)
                absorb(exact)
                if exact.status is not Status.OPTIMAL:
                    if exact.status is Status.INFEASIBLE:
                        # Nothing leaving at p or later can beat the incumbent.
                        break
                    return finish(exact.status)
                route, q = exact.route, exact.objective
                out.q_history.append(q)
            route, p = ls_max_departure(inst, route, q, cfg)
            if out.duration > q - p:
                out.route, out.departure, out.duration = route, p, q - p
                out.incumbent_history.append(out.duration)
            p += 1
    except BudgetExceeded as exc:
        return finish(exc.status)
    return finish(Status.OPTIMAL)


def solve_duration_reversed(
    inst: Instance,
    budget: Optional[Budget] = None,
    cfg: Optional[LocalSearchConfig] = None,
    *,
    allow_fine_scale: bool = False,
) -> DurationOutcome:
    """Duration solve on the reverse network, mapped back to the original vertices and clock."""
    out = solve_duration(reverse(inst), budget, cfg, allow_fine_scale=allow_fine_scale)
    if out.route is None:
        return out
    arrive = arrival_time(reverse(inst), out.route, out.departure)
    out.route = reverse_route(inst, out.route)
    out.departure = inst.horizon - arrive
    # Mirroring can only shorten a route's duration, and an optimum cannot shrink.
    actual = arrival_time(inst, out.route, out.departure) - out.departure
    if actual > out.duration or (out.status is Status.OPTIMAL and actual != out.duration):
        raise RuntimeError(f"reversed certificate mismatch: {actual} != {out.duration}")
    out.duration = actual
    out.last_departure = None
    return out
