import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_matrix_instance
from test_oracle import infeasible_pair
from tsptw.generate import generate, random_spec
from tsptw.model import Instance, Status, arrival_time, is_complete_route, latest_departure_by
from tsptw.oracle import enumerate_makespan
from tsptw.preprocess import build
from tsptw.search import (
    DISCARD,
    PROCESS,
    BestTable,
    Budget,
    BudgetExceeded,
    SearchStats,
    decision_search,
    dominance_filter,
    extend,
    root_label,
    solve_makespan,
)


def test_decision_e2(e2):
    prep = build(e2)
    assert decision_search(prep.tightened, prep, 0, 8) == (0, 1, 2, 3)
    assert decision_search(prep.tightened, prep, 0, 7) is None


def test_depot_only_route():
    inst = Instance.build([[0, 3], [3, 0]], [0, 0], [10, 10])
    prep = build(inst)
    assert decision_search(inst, prep, 0, 4) == (0, 1)
    assert solve_makespan(inst).objective == 3


def test_extend_e2(e2):
    root = root_label(e2, 0, 8)
    child = extend(root, 2, e2, None, 8)
    assert child.route() == (2, 3)
    # Route <2, 3> leaving at 0 arrives at 2 and may leave as late as 8 - 2.
    assert child.earliest_arrival == 2
    assert child.latest_departure == latest_departure_by(e2, (2, 3), 8) == 6 <= e2.window_close[2]
    assert extend(root, 2, e2, None, 2) is None


def test_extend_prunes_on_unreachable():
    # Customer 1 must be served first and 2 cannot be reached from 1 before 6.
    travel = [[0, 2, 1, 0], [5, 0, 4, 5], [1, 4, 0, 1], [0, 2, 1, 0]]
    inst = Instance.build(travel, [0, 2, 2, 0], [30, 4, 30, 30])
    prep = build(inst)
    root = root_label(inst, 0, 6)
    assert extend(root, 2, inst, None, 6) is not None
    assert extend(root, 2, inst, prep, 6) is None


def test_dominance_clauses(e2):
    best = BestTable(e2.size)
    lbl = extend(root_label(e2, 0, 21), 2, e2, None, 21)
    assert dominance_filter(best, lbl, 21) == PROCESS
    assert best.get(2, lbl.visited) == (lbl.latest_departure, lbl.arrival_at_latest_departure)
    # A label with the same key and same departure is discarded when the stored arrival beats ub.
    assert dominance_filter(best, lbl, 21) == DISCARD
    best.put(2, lbl.visited, lbl.latest_departure + 1, 0)
    assert dominance_filter(best, lbl, 21) == DISCARD


def test_best_table_only_improves():
    for seed in range(20):
        inst = random_matrix_instance(seed, 5)
        prep = build(inst)
        if not prep.feasible:
            continue
        best = BestTable(inst.size)
        labels = [root_label(inst, 0, inst.horizon + 1)]
        for lbl in labels[:200]:
            before = best.get(lbl.vertex, lbl.visited)
            dominance_filter(best, lbl, inst.horizon + 1)
            after = best.get(lbl.vertex, lbl.visited)
            if before is not None:
                assert after[0] >= before[0]
                if after[0] == before[0]:
                    assert after[1] <= before[1] or after == before
            for w in range(inst.size):
                if not lbl.visited >> w & 1:
                    child = extend(lbl, w, inst, None, inst.horizon + 1)
                    if child is not None:
                        labels.append(child)


def test_solve_e2(e2):
    out = solve_makespan(e2)
    assert out.status is Status.OPTIMAL
    assert (out.route, out.objective) == ((0, 1, 2, 3), 7)
    assert out.ub_history == [21, 7]


def test_solve_infeasible():
    out = solve_makespan(infeasible_pair())
    assert out.status is Status.INFEASIBLE and out.route is None and out.objective is None


def test_explicit_ub(e2):
    assert solve_makespan(e2, ub=7).status is Status.INFEASIBLE
    assert solve_makespan(e2, ub=8).objective == 7


def test_budget_reports_incumbent():
    inst = generate(random_spec(3, 20, family="random", omega=100, sigma=100))
    out = solve_makespan(inst, budget=Budget.from_limits(max_labels=5))
    assert out.status is Status.MEMORY_LIMIT
    assert out.objective > solve_makespan(inst).objective
    assert arrival_time(inst, out.route, 0) == out.objective
    out = solve_makespan(inst, budget=Budget.from_limits(time_limit=0.0))
    assert out.status is Status.TIME_LIMIT


def test_budget_check():
    with pytest.raises(BudgetExceeded):
        Budget.from_limits(memory_mb=0.001).check(10)


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 7), t0=st.integers(0, 15))
def test_matches_enumeration(seed, n, t0):
    inst = random_matrix_instance(seed, n)
    out = solve_makespan(inst, t0)
    ref = enumerate_makespan(inst, t0)
    if out.status is Status.INFEASIBLE:
        assert ref.route is None
        return
    assert out.objective == ref.objective
    assert is_complete_route(inst, out.route)
    assert arrival_time(inst, out.route, t0) == out.objective
    assert all(x > y for x, y in zip(out.ub_history, out.ub_history[1:]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 7))
def test_switches_are_conservative(seed, n):
    inst = generate(random_spec(seed, n))
    ref = solve_makespan(inst).objective
    assert solve_makespan(inst, dominance=False).objective == ref
    assert solve_makespan(inst, unreachable=False).objective == ref
    assert solve_makespan(inst, dominance=False, unreachable=False).objective == ref


def test_stats_count(e2):
    stats = SearchStats()
    prep = build(e2)
    decision_search(prep.tightened, prep, 0, 21, stats=stats)
    assert stats.calls == 1 and stats.created >= 4
