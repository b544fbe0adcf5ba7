"""Task, task-set and resource-model types.

All time quantities are exact. Periods, deadlines and interface periods are
Python ints; capacities and budgets are ``int`` or ``fractions.Fraction``.
Integral fractions are collapsed to ``int`` so that hot loops stay on the fast
integer path.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import reduce
from typing import Iterator, Optional, Union

Rat = Union[int, Fraction]


def exact(value) -> Rat:
    """Convert ``value`` to an exact rational, collapsing integral values to int.

    Strings may be ``"p/q"`` or decimals; floats go through their shortest
    repr so that ``8.22`` becomes ``411/50`` rather than a binary artefact.

    >>> exact("8.22")
    Fraction(411, 50)
    >>> exact(Fraction(6, 3))
    2
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not time values")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        q = value
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        q = Fraction(repr(value))
    elif isinstance(value, (str, Decimal)):
        q = Fraction(str(value).strip())
    else:
        raise TypeError(f"cannot interpret {value!r} as a rational")
    return q.numerator if q.denominator == 1 else q


def fmt_rat(value: Rat) -> str:
    """Render a rational as ``p/q`` (or a bare integer)."""
    q = Fraction(value)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def floor_div(a: Rat, b: Rat) -> int:
    """Exact floor(a / b) for rationals."""
    if isinstance(a, int) and isinstance(b, int):
        return a // b
    return math.floor(Fraction(a) / Fraction(b))


def ceil_div(a: Rat, b: Rat) -> int:
    return -floor_div(-a, b)


class Policy(str, enum.Enum):
    """Scheduling policy tags used by clusters and the simulator."""

    GEDF = "gEDF"
    EDF = "EDF"
    LLF = "LLF"
    EDZL = "EDZL"
    FPEDF = "fpEDF"
    USEDF = "USEDF"


class InterScheduler(str, enum.Enum):
    MCNAUGHTON = "McNaughton"
    GEDF = "gEDF"


@dataclass(frozen=True)
class SporadicTask:
    """Sporadic task (T, C, D) with constrained deadline 0 < C <= D <= T."""

    period: int
    wcet: Rat
    deadline: int
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "wcet", exact(self.wcet))
        for name in ("period", "deadline"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise TypeError(f"{name} must be an integer, got {v!r}")
        if not 0 < self.wcet <= self.deadline <= self.period:
            raise ValueError(
                f"task {self.label or '?'} violates 0 < C <= D <= T: "
                f"({self.period}, {self.wcet}, {self.deadline})"
            )

    @property
    def utilization(self) -> Fraction:
        return Fraction(self.wcet) / self.period

    @property
    def density(self) -> Fraction:
        return Fraction(self.wcet) / self.deadline

    @property
    def implicit(self) -> bool:
        return self.deadline == self.period

    def as_tuple(self):
        return (self.period, self.wcet, self.deadline)


def task(T: int, C, D: Optional[int] = None, label: str = "") -> SporadicTask:
    """Shorthand constructor in the conventional (T, C, D) order."""
    return SporadicTask(T, C, T if D is None else D, label)


@dataclass(frozen=True)
class TaskSet:
    """Ordered, nonempty collection of tasks with unique labels.

    Tasks without a label are named ``tau<i>`` (1-based) on construction.
    """

    tasks: tuple

    def __post_init__(self):
        tasks = tuple(self.tasks)
        if not tasks:
            raise ValueError("task set must be nonempty")
        named = []
        for i, t in enumerate(tasks):
            if not isinstance(t, SporadicTask):
                t = SporadicTask(*t)
            if not t.label:
                t = SporadicTask(t.period, t.wcet, t.deadline, f"tau{i + 1}")
            named.append(t)
        labels = [t.label for t in named]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate task labels in {labels}")
        object.__setattr__(self, "tasks", tuple(named))

    @classmethod
    def of(cls, *specs) -> "TaskSet":
        """Build from (T, C, D) tuples or tasks: ``TaskSet.of((3, 2, 3), (6, 4, 6))``."""
        return cls(tuple(s if isinstance(s, SporadicTask) else task(*s) for s in specs))

    def __iter__(self) -> Iterator[SporadicTask]:
        return iter(self.tasks)

    def __len__(self) -> int:
        return len(self.tasks)

    def __getitem__(self, i) -> SporadicTask:
        return self.tasks[i]

    def __add__(self, other: "TaskSet") -> "TaskSet":
        return TaskSet(self.tasks + other.tasks)

    def index(self, label: str) -> int:
        for i, t in enumerate(self.tasks):
            if t.label == label:
                return i
        raise KeyError(label)

    @property
    def utilization(self) -> Fraction:
        return taskset_utilization(self)

    @property
    def density(self) -> Fraction:
        return sum((t.density for t in self.tasks), Fraction(0))

    @property
    def deadline_slack_load(self) -> Fraction:
        """Sum of (T - D) C / T over all tasks."""
        return sum((Fraction((t.period - t.deadline) * t.wcet) / t.period for t in self.tasks), Fraction(0))

    def c_sigma(self, mprime: int) -> Rat:
        """Sum of the ``mprime - 1`` largest capacities."""
        if mprime < 1:
            raise ValueError("mprime must be positive")
        top = sorted((t.wcet for t in self.tasks), reverse=True)[: mprime - 1]
        return exact(sum(top, Fraction(0)))

    @property
    def hyperperiod(self) -> int:
        return reduce(math.lcm, (t.period for t in self.tasks))


def taskset_utilization(ts: TaskSet) -> Fraction:
    """Exact total utilization.

    >>> taskset_utilization(TaskSet.of((60, 5, 60), (100, 5, 100)))
    Fraction(2, 15)
    """
    return sum((t.utilization for t in ts), Fraction(0))


def gcd_periods(ts: TaskSet, include_deadlines: bool = False) -> int:
    """Gcd of all periods, optionally together with all deadlines."""
    vals = [t.period for t in ts]
    if include_deadlines:
        vals += [t.deadline for t in ts]
    return reduce(math.gcd, vals)


@dataclass(frozen=True)
class MprModel:
    """Multiprocessor periodic resource <Pi, Theta, m'>.

    Theta units are supplied every Pi time units using at most m' processors
    at once. Construction rejects Theta > m' Pi; use :meth:`unchecked` to
    build such a model on purpose.
    """

    Pi: int
    Theta: Rat
    mprime: int

    def __post_init__(self):
        object.__setattr__(self, "Theta", exact(self.Theta))
        self._validate_shape()
        if self.Theta > self.mprime * self.Pi:
            raise ValueError(f"infeasible MPR model: Theta={self.Theta} > m'*Pi={self.mprime * self.Pi}")

    def _validate_shape(self):
        if isinstance(self.Pi, bool) or not isinstance(self.Pi, int) or self.Pi < 1:
            raise ValueError(f"Pi must be a positive integer, got {self.Pi!r}")
        if isinstance(self.mprime, bool) or not isinstance(self.mprime, int) or self.mprime < 1:
            raise ValueError(f"m' must be a positive integer, got {self.mprime!r}")
        if self.Theta < 0:
            raise ValueError("Theta must be nonnegative")

    @classmethod
    def unchecked(cls, Pi: int, Theta, mprime: int) -> "MprModel":
        """Build a model without the feasibility check (for negative tests)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "Pi", Pi)
        object.__setattr__(obj, "Theta", exact(Theta))
        object.__setattr__(obj, "mprime", mprime)
        obj._validate_shape()
        return obj

    @property
    def feasible(self) -> bool:
        return self.Theta <= self.mprime * self.Pi

    @property
    def bandwidth(self) -> Fraction:
        return Fraction(self.Theta) / self.Pi

    def __str__(self):
        return f"<{self.Pi}, {fmt_rat(self.Theta)}, {self.mprime}>"


def require_feasible(model: MprModel) -> None:
    if not model.feasible:
        raise ValueError(f"infeasible MPR model {model}")


@dataclass(frozen=True)
class Cluster:
    """A task set with its intra-cluster scheduler and optional interface."""

    taskset: TaskSet
    scheduler: Policy = Policy.GEDF
    interface: Optional[MprModel] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "scheduler", Policy(self.scheduler))
        if self.scheduler not in (Policy.GEDF, Policy.EDF, Policy.LLF):
            raise ValueError(f"cluster scheduler must be gEDF, EDF or LLF, got {self.scheduler.value}")
        if self.scheduler is Policy.EDF and self.interface is not None and self.interface.mprime != 1:
            raise ValueError("an EDF cluster needs an interface with m' = 1")


@dataclass(frozen=True)
class ClusterSystem:
    clusters: tuple
    m: int
    inter_scheduler: InterScheduler = InterScheduler.MCNAUGHTON

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))
        object.__setattr__(self, "inter_scheduler", InterScheduler(self.inter_scheduler))
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.inter_scheduler is InterScheduler.MCNAUGHTON:
            periods = {c.interface.Pi for c in self.clusters if c.interface is not None}
            if any(c.interface is None for c in self.clusters) or len(periods) > 1:
                raise ValueError("McNaughton inter-scheduling needs interfaces with one common period")
