"""Random task-set generation for trial suites and experiment scripts."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import List, Optional, Sequence

from .model import SporadicTask, TaskSet

# divisors-rich periods keep hyperperiods small
PERIODS = (2, 3, 4, 5, 6, 8, 9, 10, 12, 14, 15, 18, 20, 21, 24, 28, 30, 35, 36, 40, 42, 45)


def uunifast(rng: random.Random, n: int, total: Fraction, grain: int = 100) -> List[Fraction]:
    """UUniFast utilizations summing exactly to ``total`` on a 1/grain grid.

    Individual values may exceed 1; callers reject those draws.
    """
    vals = []
    left = total
    for i in range(1, n):
        nxt = left * Fraction(rng.random() ** (1.0 / (n - i))).limit_denominator(10**6)
        vals.append(left - nxt)
        left = nxt
    vals.append(left)
    snapped = [max(Fraction(1, grain), Fraction(round(v * grain), grain)) for v in vals[:-1]]
    snapped.append(total - sum(snapped, Fraction(0)))
    return snapped


def implicit_taskset(
    rng: random.Random,
    n: int,
    total: Fraction,
    periods: Sequence[int] = PERIODS,
    max_hyperperiod: Optional[int] = 2520,
    tries: int = 1000,
) -> Optional[TaskSet]:
    """Implicit-deadline set with utilization exactly ``total``, or None."""
    for _ in range(tries):
        us = uunifast(rng, n, Fraction(total))
        if any(u <= 0 or u > 1 for u in us):
            continue
        ps = [rng.choice(periods) for _ in range(n)]
        if max_hyperperiod is not None and math.lcm(*ps) > max_hyperperiod:
            continue
        return TaskSet(tuple(SporadicTask(T, T * u, T) for T, u in zip(ps, us)))
    return None


def constrained_taskset(rng: random.Random, n: int, max_period: int = 12, quarter: bool = True) -> TaskSet:
    """Small constrained-deadline set with quarter-unit capacities."""
    tasks = []
    for _ in range(n):
        T = rng.randint(2, max_period)
        D = rng.randint(1, T)
        C = Fraction(rng.randint(1, 4 * D), 4) if quarter else Fraction(rng.randint(1, D))
        tasks.append(SporadicTask(T, C, D))
    return TaskSet(tuple(tasks))
