"""Brute-force and subset-DP reference solvers.

These deliberately avoid the solver code: each one re-derives arrival times
from the raw travel matrix and windows with its own forward recurrence.
They are exponential by design and refuse inputs beyond their size caps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import PLUS_INF, Instance, Route


@dataclass(frozen=True)
class OracleResult:
    objective: float
    route: Optional[Route] = None
    departure: Optional[int] = None
    exhaustive: bool = True


def _check_size(inst: Instance, limit: int, what: str) -> None:
    if inst.n > limit:
        raise ValueError(f"{what} is limited to n <= {limit}, got n = {inst.n}")


def enumerate_makespan(inst: Instance, t0: int = 0) -> OracleResult:
    """Minimum arrival over all customer orders, departing at ``t0``.

    Depth-first over permutations; a branch is cut only when its clock
    already violates a deadline or cannot beat the incumbent, both of which
    every completion would inherit.
    """
    _check_size(inst, 10, "enumerate_makespan")
    a, b, tau = inst.window_open, inst.window_close, inst.travel
    end = inst.end
    if t0 < a[0] or t0 > b[0]:
        return OracleResult(PLUS_INF)
    best = [PLUS_INF, None]
    path = [0]

    def dfs(v, clock, remaining):
        if clock >= best[0]:
            return
        if not remaining:
            arrive = max(clock + tau[v][end], a[end])
            if arrive <= b[end] and arrive < best[0]:
                best[0] = arrive
                best[1] = tuple(path) + (end,)
            return
        for w in list(remaining):
            arrive = max(clock + tau[v][w], a[w])
            if arrive > b[w]:
                continue
            remaining.remove(w)
            path.append(w)
            dfs(w, arrive, remaining)
            path.pop()
            remaining.add(w)

    dfs(0, t0, set(range(1, end)))
    return OracleResult(best[0], best[1])


def heldkarp_makespan(inst: Instance, t0: int = 0) -> OracleResult:
    """Subset DP over (visited customers, last vertex) keeping the earliest arrival.

    Earliest arrival is the only state worth keeping because arriving
    earlier never hurts under waiting semantics.  Only reachable states are
    stored, layer by layer.
    """
    _check_size(inst, 20, "heldkarp_makespan")
    a, b, tau = inst.window_open, inst.window_close, inst.travel
    end = inst.end
    if t0 < a[0] or t0 > b[0]:
        return OracleResult(PLUS_INF)
    # Shortest travel between vertices, ignoring windows: a state is dead once
    # some unvisited customer can no longer be reached before its deadline.
    size = inst.size
    sp = [list(row) for row in tau]
    for k in range(size):
        for i in range(size):
            for j in range(size):
                if sp[i][k] + sp[k][j] < sp[i][j]:
                    sp[i][j] = sp[i][k] + sp[k][j]
    layer = {(0, 0): t0}
    parents: list[dict] = []
    for _ in range(inst.n):
        nxt: dict = {}
        back: dict = {}
        for (mask, v), clock in layer.items():
            left = [w for w in range(1, end) if not mask >> w & 1]
            if any(clock + sp[v][w] > b[w] for w in left):
                continue
            for w in left:
                bit = 1 << w
                arrive = max(clock + tau[v][w], a[w])
                if arrive > b[w]:
                    continue
                key = (mask | bit, w)
                if arrive < nxt.get(key, PLUS_INF):
                    nxt[key] = arrive
                    back[key] = (mask, v)
        parents.append(back)
        layer = nxt
    best, best_key = PLUS_INF, None
    for key in sorted(layer):
        mask, v = key
        arrive = max(layer[key] + tau[v][end], a[end])
        if arrive <= b[end] and arrive < best:
            best, best_key = arrive, key
    if best_key is None:
        return OracleResult(PLUS_INF)
    route = [end]
    key = best_key
    for back in reversed(parents):
        route.append(key[1])
        key = back[key]
    route.append(0)
    return OracleResult(best, tuple(reversed(route)))


def oracle_duration(inst: Instance) -> OracleResult:
    """Minimum of ``arrival(t) - t`` over every order and every integer departure ``t``.

    Scans all departures at once: each search node carries the vector of
    arrival times for departures ``0..T``.
    """
    _check_size(inst, 8, "oracle_duration")
    T = inst.horizon
    if T > 100_000:
        raise ValueError(f"oracle_duration scans at most 1e5 departures, horizon is {T}")
    a, b, tau = inst.window_open, inst.window_close, inst.travel
    end = inst.end
    departures = np.arange(T + 1, dtype=float)
    start = departures.copy()
    start[(departures < a[0]) | (departures > b[0])] = np.inf
    best = [PLUS_INF, None, None]
    path = [0]

    def step(clock, v, w):
        arrive = np.maximum(clock + tau[v][w], a[w])
        arrive[arrive > b[w]] = np.inf
        return arrive

    def dfs(v, clock, remaining):
        if not remaining:
            arrive = step(clock, v, end)
            spent = arrive - departures
            i = int(np.argmin(spent[::-1]))
            i = T - i  # latest departure among the minimizers
            if spent[i] < best[0]:
                best[0] = spent[i]
                best[1] = tuple(path) + (end,)
                best[2] = i
            return
        for w in list(remaining):
            arrive = step(clock, v, w)
            if not np.isfinite(arrive).any():
                continue
            remaining.remove(w)
            path.append(w)
            dfs(w, arrive, remaining)
            path.pop()
            remaining.add(w)

    if np.isfinite(start).any():
        dfs(0, start, set(range(1, end)))
    if best[1] is None:
        return OracleResult(PLUS_INF)
    return OracleResult(int(best[0]), best[1], best[2])


def enumerate_feasible_routes(inst: Instance) -> set[Route]:
    """Every complete elementary route feasible when leaving the depot at time 0."""
    _check_size(inst, 7, "enumerate_feasible_routes")
    a, b, tau = inst.window_open, inst.window_close, inst.travel
    end = inst.end
    found: set[Route] = set()
    if a[0] > 0:
        return found
    path = [0]

    def dfs(v, clock, remaining):
        if not remaining:
            if max(clock + tau[v][end], a[end]) <= b[end]:
                found.add(tuple(path) + (end,))
            return
        for w in list(remaining):
            arrive = max(clock + tau[v][w], a[w])
            if arrive > b[w]:
                continue
            remaining.remove(w)
            path.append(w)
            dfs(w, arrive, remaining)
            path.pop()
            remaining.add(w)

    dfs(0, 0, set(range(1, end)))
    return found


def visit_times(inst: Instance, route: Route, t0: int = 0) -> list[int]:
    """Start-of-service times along ``route`` (no feasibility check)."""
    a, tau = inst.window_open, inst.travel
    times = [max(t0, a[route[0]])]
    for v, w in zip(route, route[1:]):
        times.append(max(times[-1] + tau[v][w], a[w]))
    return times


def is_finite(x) -> bool:
    return not (isinstance(x, float) and math.isinf(x))
