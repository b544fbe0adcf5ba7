"""Inter-cluster scheduling: McNaughton tables and gEDF composition."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .interface import DEFAULT_RESOLUTION, InterfaceResult, min_processors
from .model import MprModel, Rat, SporadicTask, TaskSet, exact, fmt_rat
from .supply import SupplyVariant
from .transform import ServerTaskSet


class McNaughtonError(ValueError):
    pass


class JobOverflowError(McNaughtonError):
    """A single demand exceeds the interval length."""


class AggregateOverflowError(McNaughtonError):
    """Total demand exceeds m times the interval length."""


@dataclass(frozen=True)
class Segment:
    start: Rat
    end: Rat
    owner: str


@dataclass(frozen=True)
class ScheduleTable:
    """Per-processor ownership of one scheduling window."""

    interval: Tuple[Rat, Rat]
    processors: Tuple[Tuple[Segment, ...], ...]

    @property
    def length(self) -> Rat:
        return self.interval[1] - self.interval[0]

    @property
    def m(self) -> int:
        return len(self.processors)

    def owners(self) -> List[str]:
        seen = []
        for proc in self.processors:
            for s in proc:
                if s.owner not in seen:
                    seen.append(s.owner)
        return seen

    def allocation(self, owner: str) -> Rat:
        return exact(sum((Fraction(s.end - s.start) for p in self.processors for s in p if s.owner == owner), Fraction(0)))

    def segments_of(self, owner) -> List[Tuple[int, Segment]]:
        return [(i, s) for i, p in enumerate(self.processors) for s in p if s.owner == owner]

    def validate(self) -> None:
        """Raise AssertionError unless every table invariant holds."""
        lo, hi = self.interval
        for proc in self.processors:
            prev = lo
            for s in proc:
                assert lo <= s.start < s.end <= hi, f"segment {s} outside {self.interval}"
                assert s.start >= prev, f"overlap or disorder at {s}"
                prev = s.end
        for owner in self.owners():
            segs = self.segments_of(owner)
            assert len({i for i, _ in segs}) <= 2, f"{owner} spans more than two processors"
            for x in range(len(segs)):
                for y in range(x + 1, len(segs)):
                    (i, a), (j, b) = segs[x], segs[y]
                    if i != j:
                        assert a.end <= b.start or b.end <= a.start, f"{owner} runs in parallel"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["processor", "start", "end", "owner"])
        w.writerow(["interval", fmt_rat(self.interval[0]), fmt_rat(self.interval[1]), ""])
        for i, proc in enumerate(self.processors):
            if not proc:
                w.writerow([i, "", "", ""])
            for s in proc:
                w.writerow([i, fmt_rat(s.start), fmt_rat(s.end), s.owner])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ScheduleTable":
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["processor", "start", "end", "owner"] or rows[1][0] != "interval":
            raise ValueError("not a schedule table")
        interval = (exact(rows[1][1]), exact(rows[1][2]))
        procs: List[List[Segment]] = []
        for p, start, end, owner in rows[2:]:
            p = int(p)
            while len(procs) <= p:
                procs.append([])
            if start:
                procs[p].append(Segment(exact(start), exact(end), owner))
        return cls(interval, tuple(tuple(p) for p in procs))


def mcnaughton(demands: Sequence[Tuple[str, Rat]], m: int, interval=(0, 1)) -> ScheduleTable:
    """Wrap-around packing of demands onto m processors over one interval.

    >>> t = mcnaughton([("J1", 5), ("J2", 4), ("J3", 3)], 2, (0, 6))
    >>> [(s.owner, s.start, s.end) for s in t.processors[1]]
    [('J2', 0, 3), ('J3', 3, 6)]
    """
    if m < 1:
        raise ValueError("m must be positive")
    start, end = exact(interval[0]), exact(interval[1])
    length = end - start
    if length <= 0:
        raise ValueError("empty interval")
    demands = [(label, exact(c)) for label, c in demands]
    for label, c in demands:
        if c < 0:
            raise ValueError(f"negative demand for {label}")
        if c > length:
            raise JobOverflowError(f"{label} needs {fmt_rat(c)} > interval length {fmt_rat(length)}")
    total = sum((Fraction(c) for _, c in demands), Fraction(0))
    if total > m * length:
        raise AggregateOverflowError(f"total demand {fmt_rat(exact(total))} > {m} x {fmt_rat(length)}")
    procs: List[List[Segment]] = [[] for _ in range(m)]
    p, pos = 0, start
    for label, c in demands:
        left = c
        while left > 0:
            take = min(end - pos, left)
            procs[p].append(Segment(exact(pos), exact(pos + take), label))
            left -= take
            pos += take
            if pos == end:
                p, pos = p + 1, start
    return ScheduleTable((start, end), tuple(tuple(x) for x in procs))


def admit_identical_period(interfaces: Sequence[MprModel], m: int) -> bool:
    """McNaughton admission of common-period interfaces: total bandwidth at most m."""
    periods = {g.Pi for g in interfaces}
    if len(periods) > 1:
        raise ValueError(f"interfaces have different periods {sorted(periods)}")
    return sum((g.bandwidth for g in interfaces), Fraction(0)) <= m


def server_table(server_sets: Sequence[ServerTaskSet], m: int) -> ScheduleTable:
    """McNaughton table over one common period for the given server sets."""
    periods = {s.source.Pi for s in server_sets}
    if len(periods) != 1:
        raise ValueError("server sets must share one period")
    Pi = periods.pop()
    demands = [(t.label, t.wcet) for s in server_sets for t in s.tasks]
    return mcnaughton(demands, m, (0, Pi))


def compose_gedf(
    server_sets: Sequence[ServerTaskSet],
    Pi_out: int,
    variant: SupplyVariant = SupplyVariant.LINEAR_LOWER,
    m_cap: Optional[int] = None,
    resolution=DEFAULT_RESOLUTION,
) -> InterfaceResult:
    """Interface for gEDF scheduling of all server tasks together."""
    tasks = []
    for j, s in enumerate(server_sets):
        for t in s.tasks:
            tasks.append(SporadicTask(t.period, t.wcet, t.deadline, f"c{j + 1}.{t.label}"))
    return min_processors(TaskSet(tuple(tasks)), Pi_out, variant, m_cap, resolution)
