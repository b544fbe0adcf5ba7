"""Virtual-cluster algorithms for implicit-deadline sporadic tasks.

VC-IDT gives every task its own single-processor cluster sized to its
utilization. VC-USEDF isolates tasks heavier than m/(2m-1) the same way and
runs the rest as one gEDF cluster.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .inter_cluster import ScheduleTable, mcnaughton
from .interface import InfeasibleInterfaceError, min_processors
from .model import Cluster, MprModel, Policy, Rat, TaskSet, exact, gcd_periods
from .supply import SupplyVariant
from .transform import transform_def3

LOW_CLUSTER = "low"


class Flavor(str, enum.Enum):
    VC_IDT = "VC-IDT"
    VC_USEDF = "VC-USEDF"


@dataclass(frozen=True)
class VcSystem:
    clusters: Tuple[Cluster, ...]
    common_Pi: int
    table: ScheduleTable
    flavor: Flavor
    owner_map: Dict[str, str]

    @property
    def bandwidth(self) -> Rat:
        return exact(sum((Fraction(c.interface.bandwidth) for c in self.clusters), Fraction(0)))


@dataclass(frozen=True)
class Unschedulable:
    """Admission refused; ``reason`` says which condition failed."""

    reason: str

    def __bool__(self) -> bool:
        return False


def _require_implicit(ts: TaskSet) -> None:
    bad = [t.label for t in ts if not t.implicit]
    if bad:
        raise ValueError(f"implicit deadlines required, got D != T for {', '.join(bad)}")


def _single(task, Pi) -> Cluster:
    model = MprModel(Pi, Pi * Fraction(task.utilization), 1)
    return Cluster(TaskSet((task,)), Policy.EDF, model, task.label)


def _assemble(clusters, Pi, m, flavor) -> VcSystem:
    demands = []
    owner_map = {}
    for c in clusters:
        for srv in transform_def3(c.interface, prefix=f"{c.label}.").tasks:
            demands.append((srv.label, srv.wcet))
            owner_map[srv.label] = c.label
    table = mcnaughton(demands, m, (0, Pi))
    return VcSystem(tuple(clusters), Pi, table, flavor, owner_map)


def vcidt_build(ts: TaskSet, m: int):
    """One EDF cluster per task, all sharing the gcd of the periods.

    >>> sys = vcidt_build(TaskSet.of((3, 2, 3), (6, 4, 6)), 2)
    >>> [str(c.interface) for c in sys.clusters]
    ['<3, 2, 1>', '<3, 2, 1>']
    """
    _require_implicit(ts)
    if m < 1:
        raise ValueError("m must be positive")
    if ts.utilization > m:
        return Unschedulable(f"total utilization {ts.utilization} exceeds {m}")
    Pi = gcd_periods(ts)
    return _assemble([_single(t, Pi) for t in ts], Pi, m, Flavor.VC_IDT)


def vcidt_preemption_bound(ts: TaskSet, horizon: int) -> int:
    """At most one preemption per task in every window of the common period."""
    return len(ts) * math.ceil(Fraction(horizon, gcd_periods(ts)))


def usedf_threshold(m: int) -> Fraction:
    return Fraction(m, 2 * m - 1)


def usedf_vc_build(ts: TaskSet, m: int, resolution: Optional[Rat] = None):
    """Heavy tasks get private clusters, light ones share a gEDF cluster.

    The light cluster's interface uses the improved supply at the smallest
    processor count the generator accepts.
    """
    _require_implicit(ts)
    if m < 1:
        raise ValueError("m must be positive")
    thr = usedf_threshold(m)
    heavy = [t for t in ts if t.utilization > thr]
    light = [t for t in ts if t.utilization <= thr]
    alpha = sum((Fraction(t.utilization) for t in heavy), Fraction(0))
    if alpha > m:
        return Unschedulable(f"heavy utilization {exact(alpha)} exceeds {m}")
    Pi = gcd_periods(ts)
    clusters = [_single(t, Pi) for t in heavy]
    if light:
        try:
            res = min_processors(TaskSet(tuple(light)), Pi, SupplyVariant.IMPROVED, m_cap=m, resolution=resolution)
        except InfeasibleInterfaceError as err:
            return Unschedulable(f"light cluster has no interface within {m} processors: {err}")
        model = res.model
        if Fraction(model.Theta) / Pi > m - alpha:
            return Unschedulable(f"light cluster bandwidth {model.bandwidth} exceeds {exact(m - alpha)}")
        clusters.append(Cluster(TaskSet(tuple(light)), Policy.GEDF, model, LOW_CLUSTER))
    return _assemble(clusters, Pi, m, Flavor.VC_USEDF)


def usedf_vc_bound(alpha: Rat, m: int) -> Rat:
    """Utilization bound min(m, (m^2 + alpha m)/(2m - 1)).

    >>> usedf_vc_bound(0, 2)
    Fraction(4, 3)
    """
    alpha = exact(alpha)
    if alpha < 0 or alpha > m:
        raise ValueError("alpha must lie in [0, m]")
    if alpha > m - 1:
        return m
    return exact(min(Fraction(m), Fraction(m * m + alpha * m, 2 * m - 1)))
