"""Interface-to-server-task transformations.

Both transformations emit implicit-deadline tasks with period Pi whose total
capacity per period covers Theta. Servers that would carry zero capacity are
omitted, so a set may have fewer than m' tasks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .model import MprModel, SporadicTask, TaskSet, exact, floor_div, require_feasible


class Rounding(str, enum.Enum):
    EXACT = "exact"
    CEIL = "ceil"


@dataclass(frozen=True)
class ServerTaskSet:
    tasks: TaskSet
    source: MprModel
    rounding: Rounding = Rounding.EXACT

    @property
    def total_capacity(self):
        return exact(sum((Fraction(t.wcet) for t in self.tasks), Fraction(0)))


def _servers(model, caps, rounding, prefix):
    caps = [exact(c) for c in caps]
    if rounding is Rounding.CEIL:
        caps = [math.ceil(c) for c in caps]
    tasks = [
        SporadicTask(model.Pi, c, model.Pi, f"{prefix}s{i + 1}")
        for i, c in enumerate(caps)
        if c > 0
    ]
    if not tasks:
        raise ValueError(f"interface {model} has no capacity to serve")
    return ServerTaskSet(TaskSet(tuple(tasks)), model, rounding)


def transform_def2(model: MprModel, rounding: Rounding = Rounding.EXACT, prefix: str = "") -> ServerTaskSet:
    """Spread Theta evenly: k servers one unit above the floor, one partial, rest at the floor.

    >>> [t.wcet for t in transform_def2(MprModel(6, "8.22", 2), Rounding.CEIL).tasks]
    [5, 4]
    """
    require_feasible(model)
    rounding = Rounding(rounding)
    m = model.mprime
    a = floor_div(model.Theta, m)
    alpha = model.Theta - m * a
    k = floor_div(alpha, 1)
    middle = a + alpha - (k * floor_div(alpha, k) if k else 0)
    caps = [a + 1] * k + [middle] + [a] * (m - k - 1)
    return _servers(model, caps, rounding, prefix)


def transform_def3(model: MprModel, prefix: str = "") -> ServerTaskSet:
    """m' - 1 full servers plus one carrying the remainder."""
    require_feasible(model)
    m, Pi = model.mprime, model.Pi
    rest = model.Theta - (m - 1) * Pi
    if rest < 0:
        raise ValueError(f"{model}: Theta < (m'-1)*Pi, the full-server transformation does not apply")
    return _servers(model, [Pi] * (m - 1) + [rest], Rounding.EXACT, prefix)


def validate_transformation(sts: ServerTaskSet) -> bool:
    """Structural check that the servers demand what the interface supplies."""
    src = sts.source
    if len(sts.tasks) > src.mprime:
        return False
    if any(t.period != src.Pi or t.deadline != src.Pi or t.wcet > src.Pi for t in sts.tasks):
        return False
    total = sts.total_capacity
    if Rounding(sts.rounding) is Rounding.EXACT:
        return total == src.Theta
    return total >= src.Theta
