"""Instances, fixed-point times and route evaluation.

Times are plain Python ints expressed in units of ``10**-scale`` of the file
values.  The two sentinels ``PLUS_INF`` and ``MINUS_INF`` are the float
infinities, which compare correctly against any int.

Vertex ``0`` is the start depot and ``n + 1`` the end depot.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

PLUS_INF = math.inf
MINUS_INF = -math.inf

Time = int | float
Route = tuple[int, ...]


@dataclass(frozen=True, eq=True)
class Instance:
    """Complete digraph on ``0..n+1`` with travel times and time windows."""

    n: int
    horizon: int
    travel: tuple[tuple[int, ...], ...]
    window_open: tuple[int, ...]
    window_close: tuple[int, ...]
    scale: int = 0
    name: str = ""

    def __post_init__(self):
        size = self.n + 2
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if len(self.travel) != size or any(len(row) != size for row in self.travel):
            raise ValueError(f"travel matrix must be {size}x{size}")
        if len(self.window_open) != size or len(self.window_close) != size:
            raise ValueError(f"time windows must have {size} entries")
        for v in range(size):
            a, b = self.window_open[v], self.window_close[v]
            if not 0 <= a <= b <= self.horizon:
                raise ValueError(f"window of vertex {v} is [{a}, {b}], outside [0, {self.horizon}]")
            for w in range(size):
                if v != w and self.travel[v][w] < 0:
                    raise ValueError(f"negative travel time on arc {v}->{w}")

    @classmethod
    def build(cls, travel, window_open, window_close, horizon=None, scale=0, name=""):
        """Build from nested sequences of ints (``n + 2`` vertices)."""
        size = len(travel)
        if horizon is None:
            horizon = window_close[size - 1]
        return cls(
            n=size - 2,
            horizon=int(horizon),
            travel=tuple(tuple(int(x) for x in row) for row in travel),
            window_open=tuple(int(x) for x in window_open),
            window_close=tuple(int(x) for x in window_close),
            scale=scale,
            name=name,
        )

    @property
    def size(self) -> int:
        return self.n + 2

    @property
    def end(self) -> int:
        return self.n + 1

    @property
    def customers(self) -> range:
        return range(1, self.n + 1)

    def check_depots(self) -> None:
        """Raise unless both depots have the window ``[0, T]``."""
        for v in (0, self.end):
            if self.window_open[v] != 0 or self.window_close[v] != self.horizon:
                raise ValueError(f"depot {v} must have window [0, {self.horizon}]")

    def with_windows(self, window_open, window_close) -> "Instance":
        return Instance(
            self.n, self.horizon, self.travel, tuple(window_open), tuple(window_close), self.scale, self.name
        )


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    TIME_LIMIT = "TimeLimit"
    MEMORY_LIMIT = "MemoryLimit"

    def __str__(self):
        return self.value


@dataclass
class SolveOutcome:
    status: Status
    route: Optional[Route] = None
    objective: Optional[int] = None
    labels_created: int = 0
    labels_dominated: int = 0
    labels_pruned: int = 0
    elapsed: float = 0.0
    decision_calls: int = 0
    ub_history: list = field(default_factory=list)


# -- route evaluation -------------------------------------------------------


def arrival_profile(inst: Instance, r: Sequence[int], t: Time) -> list:
    """Earliest arrival at every vertex of ``r`` departing at ``t``, ignoring deadlines."""
    a, tau = inst.window_open, inst.travel
    times = [max(t, a[r[0]])]
    for prev, cur in zip(r, r[1:]):
        times.append(max(times[-1] + tau[prev][cur], a[cur]))
    return times


def arrival_time(inst: Instance, r: Sequence[int], t: Time) -> Time:
    """Arrival at the last vertex of ``r`` departing at ``t``; ``PLUS_INF`` if infeasible."""
    if t < inst.window_open[r[0]]:
        return PLUS_INF
    b = inst.window_close
    profile = arrival_profile(inst, r, t)
    if any(x > b[v] for x, v in zip(profile, r)):
        return PLUS_INF
    return profile[-1]


def latest_feasible_departure(inst: Instance, r: Sequence[int]) -> Time:
    """Latest departure for which ``r`` is feasible (backward pass), or ``MINUS_INF``."""
    a, b, tau = inst.window_open, inst.window_close, inst.travel
    if arrival_time(inst, r, a[r[0]]) == PLUS_INF:
        return MINUS_INF
    latest = b[r[-1]]
    for i in range(len(r) - 2, -1, -1):
        latest = min(b[r[i]], latest - tau[r[i]][r[i + 1]])
    return latest


def _travel_sum(inst: Instance, r: Sequence[int]) -> int:
    return sum(inst.travel[v][w] for v, w in zip(r, r[1:]))


def latest_departure(inst: Instance, r: Sequence[int], t: Time) -> Time:
    """Latest departure ``t'`` in ``[0, T]`` whose arrival is exactly ``t``."""
    if not 0 <= t <= inst.horizon:
        return MINUS_INF
    last = latest_feasible_departure(inst, r)
    if last == MINUS_INF:
        return MINUS_INF
    # On [a(v0), last] the arrival is max(t' + S, E).
    total = _travel_sum(inst, r)
    earliest = arrival_time(inst, r, inst.window_open[r[0]])
    if t < earliest:
        return MINUS_INF
    if t == earliest:
        return min(last, earliest - total)
    return t - total if t - total <= last else MINUS_INF


def latest_departure_by(inst: Instance, r: Sequence[int], ub: Time) -> Time:
    """Latest departure whose arrival is at most ``ub``, or ``MINUS_INF``."""
    last = latest_feasible_departure(inst, r)
    if last == MINUS_INF:
        return MINUS_INF
    earliest = arrival_time(inst, r, inst.window_open[r[0]])
    if earliest > ub:
        return MINUS_INF
    return min(last, ub - _travel_sum(inst, r))


def duration_of(inst: Instance, r: Sequence[int]) -> tuple[Time, Time]:
    """``(min_t arrival(t) - t, largest minimizing t)``; ``(PLUS_INF, MINUS_INF)`` if never feasible."""
    last = latest_feasible_departure(inst, r)
    if last == MINUS_INF:
        return PLUS_INF, MINUS_INF
    total = _travel_sum(inst, r)
    earliest = arrival_time(inst, r, inst.window_open[r[0]])
    return max(total, earliest - last), last


def reverse(inst: Instance) -> Instance:
    """Time-mirrored network: arcs flipped, windows ``[T - b, T - a]``, depots swapped.

    Customers keep their labels; vertex ``0`` of the result is ``n + 1`` of the input.
    """
    T, end = inst.horizon, inst.end
    relabel = [end] + list(range(1, end)) + [0]
    travel = tuple(tuple(inst.travel[relabel[w]][relabel[v]] for w in range(inst.size)) for v in range(inst.size))
    return Instance(
        inst.n,
        T,
        travel,
        tuple(T - inst.window_close[relabel[v]] for v in range(inst.size)),
        tuple(T - inst.window_open[relabel[v]] for v in range(inst.size)),
        inst.scale,
        inst.name,
    )


def reverse_route(inst: Instance, r: Sequence[int]) -> Route:
    """Map a route between an instance and its reverse (the map is an involution)."""
    end = inst.end
    swap = {0: end, end: 0}
    return tuple(swap.get(v, v) for v in reversed(r))


def is_complete_route(inst: Instance, r: Sequence[int]) -> bool:
    return (
        len(r) == inst.size
        and r[0] == 0
        and r[-1] == inst.end
        and sorted(r) == list(range(inst.size))
    )


# -- segment functions ------------------------------------------------------


class Segment(NamedTuple):
    """Arrival function of a partial route as a function of its start time.

    For a start ``t`` in ``[lo, hi]`` the arrival at the last vertex is
    ``max(t + total, earliest)``; outside that interval the segment is
    infeasible.  An empty interval (``hi < lo``) marks an infeasible segment.
    """

    first: int
    last: int
    lo: int
    hi: Time
    total: int
    earliest: Time

    @classmethod
    def vertex(cls, inst: Instance, v: int) -> "Segment":
        a = inst.window_open[v]
        return cls(v, v, a, inst.window_close[v], 0, a)

    @property
    def feasible(self) -> bool:
        return self.hi >= self.lo

    def then(self, inst: Instance, other: "Segment") -> "Segment":
        """This segment followed by ``other``."""
        tau = inst.travel[self.last][other.first]
        total = self.total + tau + other.total
        if not (self.feasible and other.feasible) or self.earliest + tau > other.hi:
            return Segment(self.first, other.last, self.lo, MINUS_INF, total, PLUS_INF)
        hi = min(self.hi, other.hi - tau - self.total)
        earliest = max(self.earliest + tau + other.total, other.earliest, self.lo + total)
        return Segment(self.first, other.last, self.lo, hi, total, earliest)

    def arrival(self, t: Time) -> Time:
        if self.lo <= t <= self.hi:
            return max(t + self.total, self.earliest)
        return PLUS_INF

    def departure_for(self, u: Time) -> Time:
        """Latest start with arrival exactly ``u``."""
        if not self.feasible or u < self.earliest:
            return MINUS_INF
        if u == self.earliest:
            return min(self.hi, self.earliest - self.total)
        return u - self.total if u - self.total <= self.hi else MINUS_INF

    def departure_by(self, ub: Time) -> Time:
        """Latest start with arrival at most ``ub``."""
        if not self.feasible or self.earliest > ub:
            return MINUS_INF
        return min(self.hi, ub - self.total)


def route_segment(inst: Instance, r: Sequence[int]) -> Segment:
    seg = Segment.vertex(inst, r[0])
    for v in r[1:]:
        seg = seg.then(inst, Segment.vertex(inst, v))
    return seg
