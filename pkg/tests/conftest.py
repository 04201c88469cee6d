"""Shared fixtures: the hand-checkable two-customer instance and small random instances."""

from __future__ import annotations

import pytest

from tsptw.generate import SplitMix64
from tsptw.model import Instance

ACCEPTANCE_LINES: list[str] = []


def e2_instance() -> Instance:
    """Two customers; only the order 1, 2 respects the window [3, 6] of customer 1."""
    travel = [
        [0, 2, 5, 10],
        [2, 0, 2, 5],
        [5, 2, 0, 2],
        [10, 5, 2, 0],
    ]
    return Instance.build(travel, [0, 3, 0, 0], [20, 6, 10, 20], name="e2")


@pytest.fixture
def e2() -> Instance:
    return e2_instance()


def random_matrix_instance(seed: int, n: int, horizon: int = 60, max_travel: int = 12, width: int = 30) -> Instance:
    """Asymmetric travel times (no triangle inequality) and random windows.

    Unlike the generator, nothing guarantees a feasible route, so these
    exercise the infeasible branches as well.
    """
    rng = SplitMix64(seed)
    size = n + 2
    travel = [[0 if v == w else rng.randint(0, max_travel) for w in range(size)] for v in range(size)]
    for v in range(size):
        travel[v][size - 1] = travel[v][0]
        travel[size - 1][v] = travel[0][v]
    travel[size - 1][size - 1] = 0
    a, b = [0], [horizon]
    for _ in range(n):
        lo = rng.randint(0, horizon)
        a.append(lo)
        b.append(min(horizon, lo + rng.randint(0, width)))
    a.append(0)
    b.append(horizon)
    return Instance.build(travel, a, b, horizon, 0, f"matrix-{seed}")


def perturbed(inst: Instance, seed: int) -> Instance:
    """Shrink every customer window to a random sub-window; often infeasible."""
    rng = SplitMix64(seed)
    a, b = list(inst.window_open), list(inst.window_close)
    for v in inst.customers:
        lo = rng.randint(a[v], b[v])
        hi = rng.randint(lo, b[v])
        a[v], b[v] = lo, hi
    return inst.with_windows(a, b)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
