from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mprkit.model import (
    Cluster, ClusterSystem, MprModel, SporadicTask, TaskSet, ceil_div, exact, floor_div,
    fmt_rat, gcd_periods, task, taskset_utilization,
)
from mprkit.project import load

from strategies import tasksets

rats = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)


def test_exact_conversions():
    assert exact("8.22") == Fraction(411, 50)
    assert exact(8.22) == Fraction(411, 50)
    assert exact("3/4") == Fraction(3, 4)
    assert exact(Fraction(6, 3)) == 2 and isinstance(exact(Fraction(6, 3)), int)
    with pytest.raises(TypeError):
        exact(True)
    assert fmt_rat(Fraction(411, 50)) == "411/50" and fmt_rat(4) == "4"


@given(rats, rats)
def test_rational_round_trip(a, b):
    assert (a + b) - b == a


@given(st.integers(-50, 50), st.integers(1, 20))
def test_floor_ceil_match_integers(a, b):
    assert floor_div(a, b) == a // b
    assert ceil_div(a, b) == -((-a) // b)


@pytest.mark.parametrize("T,C,D", [(3, 0, 3), (3, 4, 3), (3, 2, 4), (0, 1, 1)])
def test_task_rejects_bad_parameters(T, C, D):
    with pytest.raises(ValueError):
        SporadicTask(T, C, D)


def test_taskset_labels_and_validation():
    ts = TaskSet.of((3, 2, 3), (6, 4, 6))
    assert [t.label for t in ts] == ["tau1", "tau2"]
    with pytest.raises(ValueError):
        TaskSet(())
    with pytest.raises(ValueError):
        TaskSet((task(3, 1, label="a"), task(4, 1, label="a")))


def test_utilization_examples():
    assert taskset_utilization(TaskSet.of((60, 5, 60), (100, 5, 100))) == Fraction(2, 15)
    assert TaskSet.of((3, 2, 3)).utilization == Fraction(2, 3)
    p = load("table1")
    u1 = p.cluster("C1").taskset.utilization
    assert round(float(u1), 3) == 1.304
    c3 = p.cluster("C3").taskset
    assert round(float(c3.utilization), 4) == 1.1222
    assert round(float(c3.density), 4) == 1.1930


def test_gcd_periods_examples():
    assert gcd_periods(TaskSet.of((3, 1, 3), (6, 1, 6))) == 3
    assert gcd_periods(TaskSet.of((6, 1, 6), (4, 1, 4), (10, 1, 10))) == 2
    assert gcd_periods(TaskSet.of((3, 1, 2), (6, 1, 6)), include_deadlines=True) == 1


def test_c_sigma_and_slack_load():
    ts = load("table1").cluster("C1").taskset
    assert ts.c_sigma(1) == 0
    assert ts.c_sigma(2) == 10
    assert ts.c_sigma(4) == 30
    assert TaskSet.of((3, 2, 3)).deadline_slack_load == 0
    # (T - D) C / T for (45, 2, 40) is 5 * 2 / 45
    assert TaskSet.of((45, 2, 40)).deadline_slack_load == Fraction(2, 9)


@given(tasksets(), tasksets())
def test_utilization_additive(a, b):
    relabel = lambda ts, p: TaskSet(tuple(SporadicTask(t.period, t.wcet, t.deadline, p + t.label) for t in ts))
    joined = relabel(a, "a") + relabel(b, "b")
    assert joined.utilization == a.utilization + b.utilization


@given(tasksets(max_size=6))
def test_c_sigma_monotone_and_bounded(ts):
    vals = [ts.c_sigma(m) for m in range(1, len(ts) + 3)]
    assert vals[0] == 0
    assert all(x <= y for x, y in zip(vals, vals[1:]))
    assert vals[-1] == sum(t.wcet for t in ts)


def test_mpr_model_feasibility():
    g = MprModel(6, "8.22", 2)
    assert g.Theta == Fraction(411, 50) and g.bandwidth == Fraction(137, 100)
    assert str(g) == "<6, 411/50, 2>"
    with pytest.raises(ValueError):
        MprModel(6, 13, 2)
    bad = MprModel.unchecked(6, 13, 2)
    assert not bad.feasible
    with pytest.raises(ValueError):
        MprModel(0, 1, 1)


def test_cluster_rules():
    ts = TaskSet.of((3, 2, 3))
    Cluster(ts, "EDF", MprModel(3, 2, 1))
    with pytest.raises(ValueError):
        Cluster(ts, "EDF", MprModel(3, 2, 2))
    with pytest.raises(ValueError):
        Cluster(ts, "EDZL")


def test_cluster_system_common_period():
    a = Cluster(TaskSet.of((3, 2, 3)), "gEDF", MprModel(3, 2, 1))
    b = Cluster(TaskSet.of((6, 2, 6)), "gEDF", MprModel(6, 2, 1))
    ClusterSystem((a, a), 2)
    with pytest.raises(ValueError):
        ClusterSystem((a, b), 2)
    ClusterSystem((a, b), 2, "gEDF")
    with pytest.raises(ValueError):
        ClusterSystem((a,), 0)
