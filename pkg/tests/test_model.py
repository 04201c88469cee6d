import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_matrix_instance
from tsptw.model import (
    MINUS_INF,
    PLUS_INF,
    Instance,
    Segment,
    arrival_profile,
    arrival_time,
    duration_of,
    is_complete_route,
    latest_departure,
    latest_departure_by,
    reverse,
    reverse_route,
    route_segment,
)


def scan_duration(inst, r):
    spent = [arrival_time(inst, r, t) - t for t in range(inst.horizon + 1)]
    best = min(spent)
    if best == PLUS_INF:
        return PLUS_INF, MINUS_INF
    return best, max(t for t, s in enumerate(spent) if s == best)


def all_routes(inst):
    for perm in itertools.permutations(inst.customers):
        yield (0, *perm, inst.end)


class TestE2:
    def test_profiles(self, e2):
        assert arrival_profile(e2, (0, 1, 2, 3), 0) == [0, 3, 5, 7]
        assert arrival_profile(e2, (0, 2, 1, 3), 0) == [0, 5, 7, 12]
        assert arrival_profile(e2, (0,), 0) == [0]

    def test_arrival(self, e2):
        assert arrival_time(e2, (0, 1, 2, 3), 0) == 7
        assert arrival_time(e2, (0, 2, 1, 3), 0) == PLUS_INF
        assert arrival_time(e2, (1,), 4) == 4

    def test_latest_departure(self, e2):
        assert latest_departure(e2, (0, 1, 2, 3), 7) == 1
        assert latest_departure(e2, (0, 1, 2, 3), 6) == MINUS_INF
        assert latest_departure(e2, (2,), 5) == 5

    def test_duration(self, e2):
        assert duration_of(e2, (0, 1, 2, 3)) == (6, 4)
        assert duration_of(e2, (0, 2, 1, 3)) == (PLUS_INF, MINUS_INF)
        assert duration_of(e2, (1,)) == (0, 6)

    def test_reverse(self, e2):
        rev = reverse(e2)
        assert (rev.window_open[1], rev.window_close[1]) == (14, 17)
        assert reverse(rev) == e2

    def test_reversed_route_arrival(self, e2):
        # Leaving the mirrored depot at 13 waits at customer 1 and arrives at 19.
        rev = reverse(e2)
        r = reverse_route(e2, (0, 1, 2, 3))
        assert r == (0, 2, 1, 3)
        assert arrival_time(rev, r, 13) == 19
        # Mirrored arrival equals T minus the latest forward departure still arriving by 7.
        assert arrival_time(rev, r, 20 - 7) == 20 - latest_departure(e2, (0, 1, 2, 3), 7)


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance.build([[0, 1], [1, 0]], [0, 0], [5, 4])
    with pytest.raises(ValueError):
        Instance.build([[0, -1], [1, 0]], [0, 0], [5, 5])
    with pytest.raises(ValueError):
        Instance.build([[0, 1, 1], [1, 0, 1], [1, 1, 0]], [0, 7, 0], [5, 6, 5])


def test_complete_route(e2):
    assert is_complete_route(e2, (0, 1, 2, 3))
    assert not is_complete_route(e2, (0, 1, 1, 3))
    assert not is_complete_route(e2, (0, 1, 3))
    assert not is_complete_route(e2, (1, 0, 2, 3))


def test_departure_outside_horizon(e2):
    assert latest_departure(e2, (0, 1, 2, 3), 25) == MINUS_INF


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 5), t=st.integers(0, 60), dt=st.integers(0, 60))
def test_arrival_monotone(seed, n, t, dt):
    inst = random_matrix_instance(seed, n)
    for r in itertools.islice(all_routes(inst), 20):
        u, u2 = arrival_time(inst, r, t), arrival_time(inst, r, min(60, t + dt))
        if u2 != PLUS_INF:
            assert u <= u2


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 5), t=st.integers(0, 60))
def test_inversion(seed, n, t):
    inst = random_matrix_instance(seed, n)
    for r in itertools.islice(all_routes(inst), 20):
        u = arrival_time(inst, r, t)
        if u != PLUS_INF:
            back = latest_departure(inst, r, u)
            assert back >= t
            assert arrival_time(inst, r, back) == u


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 5))
def test_duration_matches_scan(seed, n):
    inst = random_matrix_instance(seed, n)
    for r in itertools.islice(all_routes(inst), 30):
        assert duration_of(inst, r) == scan_duration(inst, r)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 5))
def test_reverse_duality_on_all_routes(seed, n):
    inst = random_matrix_instance(seed, n)
    rev, T = reverse(inst), inst.horizon
    for r in all_routes(inst):
        rr = reverse_route(inst, r)
        for t in range(0, T + 1, 3):
            for u in range(0, T + 1, 3):
                forward = arrival_time(inst, r, t) <= u
                backward = arrival_time(rev, rr, T - u) <= T - t
                assert forward == backward


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 6), ub=st.integers(0, 70))
def test_segment_agrees_with_recurrence(seed, n, ub):
    inst = random_matrix_instance(seed, n)
    for r in itertools.islice(all_routes(inst), 20):
        seg = route_segment(inst, r)
        for t in range(0, inst.horizon + 1, 5):
            assert seg.arrival(t) == arrival_time(inst, r, t)
        assert seg.departure_by(ub) == latest_departure_by(inst, r, ub)
        # Associativity of composition.
        left = route_segment(inst, r[:2]).then(inst, route_segment(inst, r[2:]))
        assert left.feasible == seg.feasible
        if seg.feasible:
            assert left == seg


def test_segment_vertex(e2):
    seg = Segment.vertex(e2, 1)
    assert seg.arrival(4) == 4
    assert seg.arrival(2) == PLUS_INF  # departing before the window opens is not a departure
    assert seg.arrival(7) == PLUS_INF
