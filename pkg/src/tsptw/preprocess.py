"""Earliest-arrival / latest-departure bounds, precedences and the unreachable function.

``build`` runs the tightening fixpoint: bounds -> precedence -> windows, until
no window moves, and then materializes ``U(v, t)`` as a step function.
Vertex sets are int bitmasks (bit ``w`` set iff ``w`` is in the set).
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import MINUS_INF, PLUS_INF, Instance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundMatrices:
    eat: np.ndarray  # eat[w, v]: earliest arrival at v after visiting w
    ldt: np.ndarray  # ldt[w, v]: latest departure from w before visiting v


@dataclass(frozen=True)
class PrecedenceRelation:
    before: tuple[int, ...]  # before[v] is the bitmask {w : v precedes w}

    def precedes(self, v: int, w: int) -> bool:
        return bool(self.before[v] >> w & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(v, w) for v, mask in enumerate(self.before) for w in _members(mask)]


@dataclass(frozen=True)
class UnreachableFunction:
    """Per vertex: ascending thresholds and the set valid from each threshold on."""

    thresholds: tuple[tuple[float, ...], ...]
    sets: tuple[tuple[int, ...], ...]

    def query(self, v: int, t) -> int:
        i = bisect.bisect_right(self.thresholds[v], t) - 1
        return self.sets[v][i]


@dataclass(frozen=True)
class PreprocessResult:
    tightened: Instance
    bounds: Optional[BoundMatrices]
    precedence: Optional[PrecedenceRelation]
    unreachable: Optional[UnreachableFunction]
    feasible: bool
    iterations: int


def _members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _earliest_arrivals(tau: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All-sources earliest arrival with waiting, starting each source at its opening.

    Runs one dense Dijkstra per source, all sources in lockstep.  Arc
    functions ``x -> max(x + tau, a)`` are non-decreasing and never arrive
    before departure, so a settled vertex can never improve.
    """
    size = len(a)
    rows = np.arange(size)
    dist = np.full((size, size), np.inf)
    dist[rows, rows] = a
    settled = np.zeros((size, size), dtype=bool)
    for _ in range(size):
        masked = np.where(settled, np.inf, dist)
        u = masked.argmin(axis=1)
        du = masked[rows, u]
        active = np.isfinite(du)
        if not active.any():
            break
        settled[rows[active], u[active]] = True
        cand = np.maximum(du[:, None] + tau[u, :], a[None, :])
        cand[cand > b[None, :]] = np.inf
        cand[~active] = np.inf
        np.minimum(dist, cand, out=dist)
    return dist


def _arrays(inst: Instance):
    tau = np.array(inst.travel, dtype=float)
    a = np.array(inst.window_open, dtype=float)
    b = np.array(inst.window_close, dtype=float)
    return tau, a, b


def compute_eat(inst: Instance) -> np.ndarray:
    tau, a, b = _arrays(inst)
    return _earliest_arrivals(tau, a, b)


def compute_ldt(inst: Instance) -> np.ndarray:
    # Earliest arrivals on the mirrored network give T - latest departures.
    tau, a, b = _arrays(inst)
    T = float(inst.horizon)
    mirrored = _earliest_arrivals(tau.T.copy(), T - b, T - a)
    return T - mirrored.T


def compute_bounds(inst: Instance) -> BoundMatrices:
    return BoundMatrices(compute_eat(inst), compute_ldt(inst))


def compute_precedence(bounds: BoundMatrices) -> PrecedenceRelation:
    """``v`` precedes ``w`` iff ``EAT(w, v)`` is infinite or some third vertex ``z``
    can be placed neither before ``w``, nor between ``w`` and ``v``, nor after ``v``."""
    eat, ldt = bounds.eat, bounds.ldt
    size = eat.shape[0]
    before = []
    for v in range(size):
        # rows: w, columns: z
        z_first = eat.T > ldt[:, v][:, None]  # EAT(z, w) > LDT(w, v)
        z_last = eat[:, v][:, None] > ldt[v, :][None, :]  # EAT(w, v) > LDT(v, z)
        z_between = eat > ldt[:, v][None, :]  # EAT(w, z) > LDT(z, v)
        blocked = z_first & z_last & z_between
        blocked[:, v] = False
        np.fill_diagonal(blocked, False)
        prec = blocked.any(axis=1) | np.isinf(eat[:, v])
        prec[v] = False
        mask = 0
        for w in np.flatnonzero(prec):
            mask |= 1 << int(w)
        before.append(mask)
    return PrecedenceRelation(tuple(before))


def tighten_windows(inst: Instance, prec: PrecedenceRelation, bounds: BoundMatrices) -> tuple[Instance, bool]:
    """Raise ``a(w)`` to ``EAT(v, w)`` and lower ``b(v)`` to ``LDT(v, w)`` for every ``v`` before ``w``.

    The returned instance may carry empty windows; callers check for that
    before using it.
    """
    a = list(inst.window_open)
    b = list(inst.window_close)
    for v, w in prec.pairs():
        e = bounds.eat[v, w]
        if e > a[w]:
            a[w] = e
        d = bounds.ldt[v, w]
        if d < b[v]:
            b[v] = d
    changed = a != list(inst.window_open) or b != list(inst.window_close)
    if not changed:
        return inst, False
    # Infinite bounds can only appear on doomed vertices; clamp to keep ints.
    a = [int(x) if x != PLUS_INF else inst.horizon + 1 for x in a]
    b = [int(x) if x != MINUS_INF else -1 for x in b]
    return _unchecked_windows(inst, a, b), True


def _unchecked_windows(inst: Instance, a, b) -> Instance:
    # Bypass validation: an empty window is a legitimate (infeasible) outcome here.
    out = object.__new__(Instance)
    for name, value in (
        ("n", inst.n),
        ("horizon", inst.horizon),
        ("travel", inst.travel),
        ("window_open", tuple(a)),
        ("window_close", tuple(b)),
        ("scale", inst.scale),
        ("name", inst.name),
    ):
        object.__setattr__(out, name, value)
    return out


def unreachable_function(bounds: BoundMatrices, prec: PrecedenceRelation) -> UnreachableFunction:
    """``w`` is in ``U(v, t)`` iff ``v`` precedes ``w`` or ``t < EAT(w, v)`` (``w != v``)."""
    eat = bounds.eat
    size = eat.shape[0]
    thresholds, sets = [], []
    for v in range(size):
        base = prec.before[v]
        by_value: dict[float, int] = {}
        for w in range(size):
            if w != v and not base >> w & 1:
                by_value.setdefault(float(eat[w, v]), 0)
                by_value[float(eat[w, v])] |= 1 << w
        # From -inf every candidate is unreachable; each EAT value releases its vertices.
        current = base | sum(by_value.values())
        ts, ss = [MINUS_INF], [current]
        for value in sorted(by_value):
            if value == PLUS_INF:
                continue
            current &= ~by_value[value]
            ts.append(value)
            ss.append(current)
        thresholds.append(tuple(ts))
        sets.append(tuple(ss))
    return UnreachableFunction(tuple(thresholds), tuple(sets))


def query_unreachable(u: UnreachableFunction, v: int, t) -> set[int]:
    return set(_members(u.query(v, t)))


def _empty_window(inst: Instance) -> bool:
    return any(a > b for a, b in zip(inst.window_open, inst.window_close))


def _mutual_precedence(inst: Instance, prec: PrecedenceRelation) -> bool:
    for v in inst.customers:
        for w in _members(prec.before[v]):
            if w != v and 1 <= w <= inst.n and prec.precedes(w, v):
                return True
    return False


def build(inst: Instance) -> PreprocessResult:
    """Tighten windows to a fixpoint and build the unreachable function."""
    current = inst
    iterations = 0
    cap = 2 * inst.size * (inst.horizon + 1)
    while True:
        iterations += 1
        assert iterations <= cap, "window tightening failed to converge"
        bounds = compute_bounds(current)
        prec = compute_precedence(bounds)
        if _mutual_precedence(current, prec):
            log.debug("%s: mutual precedence after %d rounds", inst.name, iterations)
            return PreprocessResult(current, bounds, prec, None, False, iterations)
        current, changed = tighten_windows(current, prec, bounds)
        if _empty_window(current):
            log.debug("%s: empty window after %d rounds", inst.name, iterations)
            return PreprocessResult(current, bounds, prec, None, False, iterations)
        if not changed:
            break
    return PreprocessResult(current, bounds, prec, unreachable_function(bounds, prec), True, iterations)


def dump(result: PreprocessResult) -> str:
    """Text diagnostic: tightened windows, precedence pairs and U thresholds."""
    inst = result.tightened
    lines = [f"# {inst.name or 'instance'} feasible={str(result.feasible).lower()} iterations={result.iterations}"]
    for v in range(inst.size):
        lines.append(f"window {v} {inst.window_open[v]} {inst.window_close[v]}")
    if result.precedence is not None:
        for v, w in result.precedence.pairs():
            lines.append(f"prec {v} {w}")
    if result.unreachable is not None:
        u = result.unreachable
        for v in range(inst.size):
            for t, mask in zip(u.thresholds[v], u.sets[v]):
                shown = "-inf" if t == MINUS_INF else str(int(t))
                members = ",".join(map(str, _members(mask))) or "-"
                lines.append(f"unreach {v} {shown} {members}")
    return "\n".join(lines) + "\n"
