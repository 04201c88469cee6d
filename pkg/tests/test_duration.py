import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_matrix_instance
from test_oracle import infeasible_pair
from tsptw.duration import (
    OPERATORS,
    LocalSearchConfig,
    ScaleTooFine,
    _Evaluator,
    last_departure_bound,
    ls_max_departure,
    ls_min_arrival,
    solve_duration,
    solve_duration_reversed,
)
from tsptw.generate import GeneratorSpec, generate
from tsptw.model import Instance, Status, arrival_time, duration_of, is_complete_route, route_segment
from tsptw.oracle import oracle_duration


def small(seed: int, n: int) -> Instance:
    # sigma 12 keeps the horizon well under 200 so the departure scan stays cheap.
    return generate(GeneratorSpec(("snn", "random", "beta")[seed % 3], n, 12, (0, 10, 20, 40)[seed % 4], "0.5", seed))


def test_ls_min_arrival_e2(e2):
    assert ls_min_arrival(e2, (0, 2, 1, 3), 0) == (0, 1, 2, 3)
    assert ls_min_arrival(e2, (0, 1, 2, 3), 0) == (0, 1, 2, 3)


def test_ls_single_customer():
    inst = Instance.build([[0, 2, 0], [2, 0, 2], [0, 2, 0]], [0, 0, 0], [9, 9, 9])
    assert ls_min_arrival(inst, (0, 1, 2), 0) == (0, 1, 2)
    assert ls_max_departure(inst, (0, 1, 2), 4) == ((0, 1, 2), 0)


def test_ls_max_departure_e2(e2):
    assert ls_max_departure(e2, (0, 1, 2, 3), 7) == ((0, 1, 2, 3), 1)


def test_last_departure_e2(e2):
    assert last_departure_bound(e2, 1) == 4
    assert last_departure_bound(e2, 4) == 4


def test_solve_e2(e2):
    out = solve_duration(e2)
    assert out.status is Status.OPTIMAL
    assert out.duration == 6 and 1 <= out.departure <= 4
    assert out.route == (0, 1, 2, 3)
    rev = solve_duration_reversed(e2)
    assert rev.status is Status.OPTIMAL and rev.duration == 6


def test_infeasible():
    assert solve_duration(infeasible_pair()).status is Status.INFEASIBLE
    assert solve_duration_reversed(infeasible_pair()).status is Status.INFEASIBLE


def test_scale_guard(e2):
    fine = Instance(e2.n, e2.horizon, e2.travel, e2.window_open, e2.window_close, 4)
    with pytest.raises(ScaleTooFine):
        solve_duration(fine)
    assert solve_duration(fine, allow_fine_scale=True).duration == 6


def test_config_validation():
    with pytest.raises(ValueError):
        LocalSearchConfig(operators=())
    with pytest.raises(ValueError):
        LocalSearchConfig(operators=("or_opt",))
    assert LocalSearchConfig().operators == OPERATORS


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(3, 7), op=st.sampled_from(OPERATORS), t=st.integers(0, 60))
def test_neighbour_segments_match_routes(seed, n, op, t):
    inst = random_matrix_instance(seed, n, width=60)
    route = (0, *inst.customers, inst.end)
    ev = _Evaluator(inst, route)
    seen = set()
    for seg, make in ev.neighbours(op):
        r = tuple(make())
        assert is_complete_route(inst, r)
        assert seg.arrival(t) == arrival_time(inst, r, t)
        assert seg == route_segment(inst, r) or not seg.feasible
        seen.add(r)
    assert route not in seen


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(2, 7), p=st.integers(0, 40))
def test_local_search_never_worsens(seed, n, p):
    inst = random_matrix_instance(seed, n, width=60)
    r = (0, *inst.customers, inst.end)
    better = ls_min_arrival(inst, r, p)
    assert arrival_time(inst, better, p) <= arrival_time(inst, r, p)
    q = arrival_time(inst, better, p)
    if q != float("inf"):
        moved, dep = ls_max_departure(inst, better, q)
        assert dep >= p and arrival_time(inst, moved, dep) == q


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**20), n=st.integers(1, 7))
def test_matches_oracle(seed, n):
    inst = small(seed, n)
    ref = oracle_duration(inst).objective
    for solver in (solve_duration, solve_duration_reversed):
        out = solver(inst)
        assert out.status is Status.OPTIMAL
        assert out.duration == ref
        assert arrival_time(inst, out.route, out.departure) - out.departure == ref
        assert duration_of(inst, out.route)[0] == ref


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**20), n=st.integers(2, 7))
def test_histories_are_monotone(seed, n):
    out = solve_duration(small(seed, n))
    inc, qs = out.incumbent_history, out.q_history
    assert all(x > y for x, y in zip(inc, inc[1:]))
    assert all(x <= y for x, y in zip(qs, qs[1:]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 6))
def test_matrix_instances_match_oracle(seed, n):
    inst = random_matrix_instance(seed, n)
    ref = oracle_duration(inst).objective
    out = solve_duration(inst)
    if out.status is Status.INFEASIBLE:
        assert ref == float("inf")
    else:
        assert out.duration == ref
        assert solve_duration_reversed(inst).duration == ref
