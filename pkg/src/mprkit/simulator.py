"""Deterministic discrete-event simulation of global and clustered scheduling.

Decisions are taken at every integer instant and at every release, deadline,
job completion and supply-segment boundary. Running jobs keep their
processor when they stay selected; newly selected jobs take the lowest free
processor their group may use.
"""

from __future__ import annotations

import bisect
import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .model import Policy, Rat, TaskSet, exact, fmt_rat


class EventKind(str, enum.Enum):
    RELEASE = "Release"
    DISPATCH = "Dispatch"
    PREEMPT = "Preempt"
    MIGRATE = "Migrate"
    COMPLETE = "Complete"
    MISS = "Miss"


_ORDER = {k: i for i, k in enumerate(
    [EventKind.COMPLETE, EventKind.MISS, EventKind.RELEASE, EventKind.PREEMPT, EventKind.DISPATCH, EventKind.MIGRATE]
)}


@dataclass(frozen=True)
class Event:
    time: Rat
    kind: EventKind
    task: str
    processor: Optional[int] = None
    job: int = 0


@dataclass(frozen=True)
class SynchronousPeriodic:
    """Every task releases at time 0 and then exactly every period."""


@dataclass(frozen=True)
class ExplicitReleases:
    releases: Tuple[Tuple[str, Rat], ...]


ArrivalPattern = Union[SynchronousPeriodic, ExplicitReleases]
SYNCHRONOUS = SynchronousPeriodic()


@dataclass
class SimTrace:
    events: List[Event] = field(default_factory=list)
    preemptions: int = 0
    migrations: int = 0
    misses: List[Tuple[str, Rat]] = field(default_factory=list)
    horizon: Rat = 0

    def summary(self) -> dict:
        return {
            "horizon": fmt_rat(self.horizon),
            "misses": len(self.misses),
            "preemptions": self.preemptions,
            "migrations": self.migrations,
            "missed": [[task, fmt_rat(d)] for task, d in self.misses],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "kind", "task", "processor", "job"])
        for e in self.events:
            w.writerow([fmt_rat(e.time), e.kind.value, e.task, "" if e.processor is None else e.processor, e.job])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "summary": self.summary(),
                "events": [
                    [fmt_rat(e.time), e.kind.value, e.task, e.processor, e.job] for e in self.events
                ],
            }
        )

    def execution_intervals(self) -> Dict[Tuple[str, int], List[Tuple[Rat, Rat, int]]]:
        """Reconstruct (start, end, processor) execution pieces per job."""
        open_: Dict[Tuple[str, int], Tuple[Rat, int]] = {}
        out: Dict[Tuple[str, int], List[Tuple[Rat, Rat, int]]] = {}
        for e in self.events:
            key = (e.task, e.job)
            if e.kind is EventKind.DISPATCH:
                open_[key] = (e.time, e.processor)
            elif e.kind is EventKind.MIGRATE and key in open_:
                s, p = open_[key]
                if e.time > s:
                    out.setdefault(key, []).append((s, e.time, p))
                open_[key] = (e.time, e.processor)
            elif e.kind in (EventKind.PREEMPT, EventKind.COMPLETE) and key in open_:
                s, p = open_.pop(key)
                if e.time > s:
                    out.setdefault(key, []).append((s, e.time, p))
        for key, (s, p) in open_.items():
            if self.horizon > s:
                out.setdefault(key, []).append((s, self.horizon, p))
        return out


class DeadlineMiss(Exception):
    """Raised in strict mode at the first missed deadline."""


@dataclass
class _Job:
    task: int
    label: str
    seq: int
    release: Rat
    deadline: Rat
    remaining: Rat
    proc: Optional[int] = None
    last_proc: Optional[int] = None
    missed: bool = False


def _priority(policy: Policy, m: int, tasks: TaskSet, idx: Sequence[int]):
    """Return key(job, t) ordering jobs of one group, most urgent first."""
    def lax(j, t):
        return j.deadline - t - j.remaining

    if policy in (Policy.GEDF, Policy.EDF):
        return lambda j, t: (j.deadline, lax(j, t), j.task, j.seq)
    if policy is Policy.LLF:
        return lambda j, t: (lax(j, t), j.task, j.seq)
    if policy is Policy.EDZL:
        return lambda j, t: (0 if lax(j, t) <= 0 else 1, j.deadline, lax(j, t), j.task, j.seq)
    if policy is Policy.FPEDF:
        heavy = [i for i in idx if tasks[i].utilization > Fraction(1, 2)]
        heavy.sort(key=lambda i: (-tasks[i].utilization, i))
        rank = {i: r for r, i in enumerate(heavy[: max(0, m - 1)])}
        low = len(rank)
        return lambda j, t: (rank.get(j.task, low), j.deadline, lax(j, t), j.task, j.seq)
    if policy is Policy.USEDF:
        thr = Fraction(m, 2 * m - 1)
        heavy = {i for i in idx if tasks[i].utilization > thr}
        return lambda j, t: (0 if j.task in heavy else 1, j.deadline, lax(j, t), j.task, j.seq)
    raise ValueError(f"unsupported policy {policy}")


class _Group:
    """Tasks scheduled together on the processors their supply provides.

    Times inside the engine are integers in units of 1/scale.
    """

    def __init__(self, task_idx, key, segments=None, period=None, m=None):
        self.tasks = set(task_idx)
        self.key = key
        self.segments = segments  # None means processors range(m) always
        self.period = period
        self.m = m
        self.jobs: List[_Job] = []
        if segments is not None:
            self.bounds = sorted({x for a, b, _ in segments for x in (a, b)})

    def scaled(self, scale: int) -> None:
        if self.segments is not None:
            self.segments = [(int(a * scale), int(b * scale), p) for a, b, p in self.segments]
            self.period = int(self.period * scale)
            self.bounds = sorted({x for a, b, _ in self.segments for x in (a, b)})

    def procs_at(self, t: int) -> List[int]:
        if self.segments is None:
            return list(range(self.m))
        phase = t % self.period
        return sorted(p for a, b, p in self.segments if a <= phase < b)

    def next_boundary(self, t: int) -> Optional[int]:
        if self.segments is None or not self.bounds:
            return None
        base = t - t % self.period
        i = bisect.bisect_right(self.bounds, t - base)
        if i < len(self.bounds):
            return base + self.bounds[i]
        return base + self.period + self.bounds[0]


def _releases(tasks: TaskSet, arrivals: ArrivalPattern, horizon) -> List[Tuple[Rat, int]]:
    out = []
    if isinstance(arrivals, SynchronousPeriodic):
        for i, t in enumerate(tasks):
            r = 0
            while r < horizon:
                out.append((r, i))
                r += t.period
    else:
        last: Dict[int, Rat] = {}
        for label, time in sorted(arrivals.releases, key=lambda x: (exact(x[1]), x[0])):
            i = tasks.index(label)
            time = exact(time)
            if time < 0:
                raise ValueError("release times must be nonnegative")
            if i in last and time - last[i] < tasks[i].period:
                raise ValueError(f"releases of {label} closer than its period")
            last[i] = time
            if time < horizon:
                out.append((time, i))
    out.sort()
    return out


def _denominator(x) -> int:
    return x.denominator if isinstance(x, Fraction) else 1


def _run(tasks: TaskSet, groups: List[_Group], arrivals, horizon, strict: bool) -> SimTrace:
    horizon = exact(horizon)
    trace = SimTrace(horizon=horizon)
    rel = _releases(tasks, arrivals, horizon)
    dens = [_denominator(horizon)] + [_denominator(t.wcet) for t in tasks]
    dens += [_denominator(r) for r, _ in rel]
    for g in groups:
        if g.segments is not None:
            dens += [_denominator(x) for x in g.bounds] + [_denominator(g.period)]
    scale = math.lcm(*dens)
    for g in groups:
        g.scaled(scale)
    rel = [(int(r * scale), i) for r, i in rel]
    wcet = [int(t.wcet * scale) for t in tasks]
    dl = [t.deadline * scale for t in tasks]
    H = int(horizon * scale)
    group_of = {}
    for g in groups:
        for i in g.tasks:
            group_of[i] = g

    def at(x: int) -> Rat:
        return x // scale if x % scale == 0 else Fraction(x, scale)

    ri = 0
    active: List[_Job] = []
    running: List[_Job] = []
    seqs = [0] * len(tasks)
    t = 0
    events = trace.events
    E = Event

    while True:
        now = at(t)
        for j in active:
            if not j.missed and j.deadline <= t and j.remaining > 0:
                j.missed = True
                trace.misses.append((j.label, at(j.deadline)))
                events.append(E(at(j.deadline), EventKind.MISS, j.label, j.proc, j.seq))
        if strict and trace.misses:
            raise DeadlineMiss(trace)
        if t >= H:
            break
        while ri < len(rel) and rel[ri][0] <= t:
            r, i = rel[ri]
            ri += 1
            seqs[i] += 1
            job = _Job(i, tasks[i].label, seqs[i], r, r + dl[i], wcet[i])
            active.append(job)
            group_of[i].jobs.append(job)
            events.append(E(now, EventKind.RELEASE, job.label, None, job.seq))

        chosen: Dict[int, int] = {}
        for g in groups:
            if not g.jobs:
                continue
            procs = g.procs_at(t)
            if not procs:
                continue
            ready = g.jobs
            if len(ready) > len(procs):
                ready = sorted(ready, key=lambda j: g.key(j, t))[: len(procs)]
            free = list(procs)
            fresh = []
            for j in ready:
                if j.proc is not None and j.proc in free:
                    free.remove(j.proc)
                    chosen[id(j)] = j.proc
                else:
                    fresh.append(j)
            for j in fresh:
                chosen[id(j)] = free.pop(0)
        for j in running:
            if id(j) not in chosen:
                events.append(E(now, EventKind.PREEMPT, j.label, j.proc, j.seq))
                trace.preemptions += 1
                j.proc = None
        running = []
        for j in active:
            p = chosen.get(id(j))
            if p is None:
                continue
            if j.proc is None:
                events.append(E(now, EventKind.DISPATCH, j.label, p, j.seq))
                if j.last_proc is not None and j.last_proc != p:
                    events.append(E(now, EventKind.MIGRATE, j.label, p, j.seq))
                    trace.migrations += 1
            elif j.proc != p:
                events.append(E(now, EventKind.MIGRATE, j.label, p, j.seq))
                trace.migrations += 1
            j.proc = p
            j.last_proc = p
            running.append(j)

        nxt = t - t % scale + scale
        if ri < len(rel) and rel[ri][0] < nxt:
            nxt = rel[ri][0]
        for j in active:
            if not j.missed and t < j.deadline < nxt:
                nxt = j.deadline
        for j in running:
            if t + j.remaining < nxt:
                nxt = t + j.remaining
        for g in groups:
            if g.jobs:
                b = g.next_boundary(t)
                if b is not None and b < nxt:
                    nxt = b
        if nxt > H:
            nxt = H
        dt = nxt - t
        t = nxt
        finished = False
        for j in running:
            j.remaining -= dt
            if j.remaining <= 0:
                finished = True
                events.append(E(at(t), EventKind.COMPLETE, j.label, j.proc, j.seq))
                j.proc = None
        if finished:
            running = [j for j in running if j.remaining > 0]
            active = [j for j in active if j.remaining > 0]
            for g in groups:
                g.jobs = [j for j in g.jobs if j.remaining > 0]
    return trace


def simulate_global(
    ts: TaskSet,
    m: int,
    policy: Policy = Policy.GEDF,
    arrivals: ArrivalPattern = SYNCHRONOUS,
    horizon: Optional[int] = None,
    strict: bool = False,
) -> SimTrace:
    """Run a global policy on m dedicated processors."""
    policy = Policy(policy)
    if m < 1:
        raise ValueError("m must be positive")
    horizon = ts.hyperperiod if horizon is None else horizon
    idx = range(len(ts))
    group = _Group(idx, _priority(policy, m, ts, idx), m=m)
    return _run(ts, [group], arrivals, horizon, strict)


def simulate_hierarchical(
    system,
    arrivals: ArrivalPattern = SYNCHRONOUS,
    horizon: Optional[int] = None,
    table=None,
    owner_map: Optional[Dict[str, str]] = None,
    strict: bool = False,
) -> SimTrace:
    """Run clusters on the supply a periodically repeated table gives them.

    ``system`` is either an object with ``clusters``, ``table`` and
    ``owner_map`` attributes (a virtual-cluster system) or a sequence of
    clusters, in which case ``table`` must be given. Table owners map to
    cluster labels through ``owner_map`` (identity by default).
    """
    if hasattr(system, "table"):
        clusters = list(system.clusters)
        table = system.table if table is None else table
        owner_map = getattr(system, "owner_map", None) if owner_map is None else owner_map
    else:
        clusters = list(system)
    if table is None:
        raise ValueError("a supply table is required")
    labels = [c.label for c in clusters]
    if len(set(labels)) != len(labels) or any(not l for l in labels):
        raise ValueError("clusters need unique nonempty labels")
    owner_map = dict(owner_map or {o: o for o in table.owners()})
    for owner in table.owners():
        if owner_map.get(owner) not in labels:
            raise ValueError(f"table owner {owner!r} matches no cluster")
    if not clusters:
        return SimTrace(horizon=horizon or 0)
    lo, hi = table.interval
    period = hi - lo
    all_tasks = []
    spans = []
    for c in clusters:
        start = len(all_tasks)
        all_tasks.extend(c.taskset)
        spans.append(range(start, len(all_tasks)))
    tasks = TaskSet(tuple(all_tasks))
    groups = []
    for c, span in zip(clusters, spans):
        segs = [
            (s.start - lo, s.end - lo, p)
            for p, proc in enumerate(table.processors)
            for s in proc
            if owner_map.get(s.owner) == c.label
        ]
        if not segs:
            raise ValueError(f"cluster {c.label!r} has no supply in the table")
        key = _priority(c.scheduler, max(1, len({p for _, _, p in segs})), tasks, span)
        groups.append(_Group(span, key, segments=segs, period=period))
    horizon = tasks.hyperperiod if horizon is None else horizon
    return _run(tasks, groups, arrivals, horizon, strict)


def dedicated_table(sizes: Sequence[Tuple[str, int]], length: Rat = 1):
    """Table giving each named owner a block of whole processors."""
    from .inter_cluster import ScheduleTable, Segment

    procs = []
    for owner, n in sizes:
        for _ in range(n):
            procs.append((Segment(0, exact(length), owner),))
    return ScheduleTable((0, exact(length)), tuple(procs))


# -- supply measurement -----------------------------------------------------


def _pieces_from_table(table, owners):
    lo, hi = table.interval
    return [(s.start - lo, s.end - lo) for p in table.processors for s in p if s.owner in owners], hi - lo


def _window_supply(pieces, period, s, w):
    """Total owner time inside [s, s + w) for pieces repeated every period."""
    if period is None:
        return sum(max(0, min(b, s + w) - max(a, s)) for a, b in pieces)
    total = 0
    k0 = math.floor(s / period)
    k1 = math.floor((s + w) / period)
    for k in range(k0, k1 + 1):
        off = k * period
        for a, b in pieces:
            lo = max(a + off, s)
            hi = min(b + off, s + w)
            if hi > lo:
                total += hi - lo
    return total


def supply_from_trace(source, owner, window, resolution=Fraction(1, 4)) -> Rat:
    """Minimum supply to ``owner`` over every placement of a length-``window`` interval.

    ``source`` is a ScheduleTable (repeated periodically) or a SimTrace (placements
    inside its horizon). ``owner`` is one label or a collection of labels.
    """
    owners = {owner} if isinstance(owner, str) else set(owner)
    window = exact(window)
    resolution = Fraction(exact(resolution))
    if window < 0 or resolution <= 0:
        raise ValueError("window must be nonnegative and resolution positive")
    if window == 0:
        return 0
    if isinstance(source, SimTrace):
        pieces = [
            (a, b)
            for (label, _), segs in source.execution_intervals().items()
            if label in owners
            for a, b, _ in segs
        ]
        period = None
        span = source.horizon - window
        if span < 0:
            raise ValueError("window longer than the trace")
    else:
        pieces, period = _pieces_from_table(source, owners)
        span = period
    n = int(span / resolution)
    starts = {resolution * i for i in range(n + (0 if period else 1))}
    # window edges meeting piece boundaries give the exact minimum
    for a, b in pieces:
        for x in (a, b):
            for c in (x, x - window):
                if period is not None:
                    c = c - math.floor(c / period) * period
                if 0 <= c <= span and (period is None or c < period):
                    starts.add(Fraction(c))
    return exact(Fraction(min(_window_supply(pieces, period, s, window) for s in starts)))
