from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mprkit.demand import dem
from mprkit.model import MprModel, TaskSet
from mprkit.project import load
from mprkit.schedulability import (
    InfeasibleAtM, UnboundedSearchError, ak_bound, candidate_offsets, cap_free_offset,
    checkpoint_offsets, first_violation_scan, is_schedulable, schedulability_load, search_limits,
)
from mprkit.supply import SupplyVariant

from strategies import tasksets


def test_ak_bound_hand_value():
    # (0 + 2 - 3(1/3) + 0 + 2) / (1/3) = 9
    assert ak_bound(TaskSet.of((3, 2, 3)), 0, MprModel(3, 3, 1)) == 9


def test_ak_bound_requires_slack():
    with pytest.raises(UnboundedSearchError):
        ak_bound(TaskSet.of((3, 2, 3)), 0, MprModel(3, 2, 1))
    assert TaskSet.of((3, 2, 3), (5, 1, 5)).deadline_slack_load == 0


def test_dedicated_uniprocessor_schedules_c2():
    c2 = load("table1").cluster("C2").taskset
    v = is_schedulable(c2, MprModel(8, 8, 1))
    assert v and v.witness is None


def test_zero_supply_fails_at_first_checkpoint():
    c2 = load("table1").cluster("C2").taskset
    v = is_schedulable(c2, MprModel(8, 0, 1))
    assert not v
    assert (v.witness.k, v.witness.A_k, v.witness.supply) == (0, 0, 0)
    assert v.checkpoints_evaluated == 1


def test_fig1_gedf_cluster_is_beyond_the_sufficient_test():
    ts = TaskSet.of((3, 2, 3), (6, 4, 6), (6, 3, 6))
    # with a perfect 2t supply the bound still exceeds it at k = 2nd task, A_k = 1
    assert dem(ts, 1, 1, 2) == 15 > 2 * 7
    for Pi in (1, 3, 6):
        assert not is_schedulable(ts, MprModel(Pi, 2 * Pi, 2), SupplyVariant.LINEAR_UPPER)


def test_load_examples():
    assert schedulability_load(TaskSet.of((3, 2, 3)), 1) == Fraction(2, 3)
    c3 = load("table1").cluster("C3").taskset
    load2 = schedulability_load(c3, 2)
    assert load2 == Fraction(17, 15)
    assert c3.utilization <= load2
    with pytest.raises(InfeasibleAtM):
        schedulability_load(c3, 1)


def test_single_task_load_tends_to_utilization():
    ts = TaskSet.of((10, 1, 10))
    assert schedulability_load(ts, 1) == Fraction(1, 10)


def test_checkpoints_and_candidates():
    ts = TaskSet.of((3, 1, 2), (5, 2, 5))
    # A + D_0 must land on some l T_i or l T_i + D_i
    cps = checkpoint_offsets(ts, 0, 12)
    assert cps == sorted(cps) and all(0 <= a < 12 for a in cps)
    assert 1 in cps and 2 not in cps  # 3 = T_1, 4 is nothing
    cf = cap_free_offset(ts, 0)
    cand = list(candidate_offsets(ts, 0, 40, True))
    assert list(range(min(cf, 40))) == [a for a in cand if a < cf]


def test_bandwidth_equal_to_utilization_is_decided():
    assert is_schedulable(TaskSet.of((3, 2, 3)), MprModel(3, 2, 1), SupplyVariant.IMPROVED)
    assert search_limits(TaskSet.of((3, 2, 3)), MprModel(3, 1, 1)) is None
    assert not is_schedulable(TaskSet.of((3, 2, 3)), MprModel(3, 1, 1), SupplyVariant.IMPROVED)


def _small_systems():
    return st.tuples(tasksets(max_size=3, max_period=8), st.integers(1, 3), st.integers(1, 6), st.data())


@given(_small_systems())
def test_no_first_violation_beyond_bound(args):
    ts, m, Pi, data = args
    lo = int(ts.utilization * Pi * 4) + 1
    hi = 4 * m * Pi
    if lo > hi:
        return
    model = MprModel(Pi, Fraction(data.draw(st.integers(lo, hi)), 4), m)
    for variant in (SupplyVariant.LINEAR_LOWER, SupplyVariant.EXACT):
        for k in range(len(ts)):
            b = ak_bound(ts, k, model)
            first = first_violation_scan(ts, model, variant, k, 4 * b + 4)
            assert first is None or first < b


@given(tasksets(max_size=3, max_period=8), st.integers(1, 3), st.integers(1, 6), st.data())
def test_full_dedicated_supply_never_stricter(ts, m, Pi, data):
    theta = Fraction(data.draw(st.integers(0, 4 * m * Pi)), 4)
    if Fraction(theta) / Pi <= ts.utilization:
        return
    small, full = MprModel(Pi, theta, m), MprModel(Pi, m * Pi, m)
    if is_schedulable(ts, small, SupplyVariant.EXACT):
        assert is_schedulable(ts, full, SupplyVariant.EXACT)


@given(tasksets(max_size=4, max_period=8), st.integers(1, 3), st.integers(1, 6), st.data())
def test_checkpoint_and_exhaustive_agree_for_improved(ts, m, Pi, data):
    q = data.draw(st.integers(4 * (m - 1) * Pi, 4 * m * Pi))
    model = MprModel(Pi, Fraction(q, 4), m)
    if model.bandwidth < ts.utilization:
        return
    fast = is_schedulable(ts, model, SupplyVariant.IMPROVED)
    slow = is_schedulable(ts, model, SupplyVariant.IMPROVED, exhaustive=True)
    assert bool(fast) == bool(slow)


@given(tasksets(max_size=3, max_period=8), st.integers(1, 3))
def test_load_dominates_ratios(ts, m):
    try:
        load_ = schedulability_load(ts, m)
    except InfeasibleAtM:
        return
    for k, tk in enumerate(ts):
        for A in range(3 * ts.hyperperiod):
            assert Fraction(dem(ts, k, A, m), A + tk.deadline) <= load_
    assert load_ >= ts.utilization
