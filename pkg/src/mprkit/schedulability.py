"""Global-EDF schedulability of a task set on an MPR interface.

The test compares DEM against the interface supply for every task k and
every offset A_k below a search limit. The limit is the closed-form bound
when the interface bandwidth exceeds the task-set utilization. When the two
are equal, a periodicity argument applies instead: past a computable point,
DEM grows by exactly U * H per hyperperiod H, and so does the supply, so one
extra hyperperiod settles the question.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional

from .demand import DemandEvaluator
from .model import MprModel, Rat, TaskSet, ceil_div, exact, require_feasible
from .supply import SupplyVariant, supply


class UnboundedSearchError(ValueError):
    """Interface bandwidth does not exceed the task-set utilization."""


class InfeasibleAtM(ValueError):
    """Schedulability load exceeds the processor count asked about."""

    def __init__(self, load, mprime):
        super().__init__(f"schedulability load {load} exceeds m'={mprime}")
        self.load = load
        self.mprime = mprime


@dataclass(frozen=True)
class Witness:
    k: int
    A_k: int
    demand: Rat
    supply: Rat


@dataclass(frozen=True)
class SchedVerdict:
    schedulable: bool
    witness: Optional[Witness] = None
    checkpoints_evaluated: int = 0

    def __bool__(self):
        return self.schedulable


def ak_bound(ts: TaskSet, k: int, model: MprModel) -> int:
    """Exclusive upper limit on A_k beyond which no first violation can occur.

    >>> from mprkit.model import TaskSet
    >>> ak_bound(TaskSet.of((3, 2, 3)), 0, MprModel(3, 3, 1))
    9
    """
    bw = model.bandwidth
    u = ts.utilization
    if bw <= u:
        raise UnboundedSearchError(f"bandwidth {bw} does not exceed utilization {u}")
    m = model.mprime
    tk = ts[k]
    B = bw * (2 + 2 * (model.Pi - Fraction(model.Theta) / m))
    num = ts.c_sigma(m) + m * tk.wcet - tk.deadline * (bw - u) + ts.deadline_slack_load + B
    return max(0, math.ceil(num / (bw - u)))


def periodic_limit(ts: TaskSet, model: MprModel) -> int:
    """Offset limit that suffices when the bandwidth equals the utilization.

    Past ``t0`` every interference term is either uncapped or capped by a
    full-utilization task, so DEM(t + H) = DEM(t) + U H with H a common
    multiple of all periods and Pi; supply grows by the same amount.
    """
    Tmax = max(t.period for t in ts)
    Cmax = max(t.wcet for t in ts)
    t0 = Tmax + 2 * model.Pi + 2
    if model.Theta > 0:
        # past the first supply period the closed-form sbf is exactly periodic
        t0 += model.Pi * (ceil_div(model.mprime, model.Theta) + 1)
    for t in ts:
        u = t.utilization
        if u < 1:
            t0 = max(t0, math.ceil((t.wcet + Cmax + t.period) / (1 - u)) + Tmax)
    H = math.lcm(ts.hyperperiod, model.Pi)
    return t0 + H


def checkpoint_offsets(ts: TaskSet, k: int, limit: int) -> List[int]:
    """Offsets A in [0, limit) with A + D_k in {l T_i, l T_i + D_i}, plus 0."""
    Dk = ts[k].deadline
    pts = {0} if limit > 0 else set()
    hi = limit + Dk
    for t in ts:
        for base in (0, t.deadline):
            start = base
            if start < Dk:
                start += ((Dk - start + t.period - 1) // t.period) * t.period
            pts.update(x - Dk for x in range(start, hi, t.period))
    return sorted(p for p in pts if 0 <= p < limit)


def cap_free_offset(ts: TaskSet, k: int) -> Optional[int]:
    """Offset from which no interval cap binds in task ``k``'s interference terms.

    Each W_i(t) is at most U_i t + 2 C_i, so a cap t - C_k (or A_k for k
    itself) stops binding once t is large enough, unless the task has full
    utilization. Returns None when some cap may bind forever.
    """
    tk = ts[k]
    start = 0
    for i, ti in enumerate(ts):
        u = ti.utilization
        if u == 1:
            return None
        if i == k:
            a = math.floor(tk.wcet / (1 - u)) + 1
        else:
            a = math.floor((2 * ti.wcet + tk.wcet) / (1 - u)) - tk.deadline + 1
        start = max(start, a)
    # the step into the first checkpoint-only offset must also be cap free
    return start + 1


def uses_checkpoints(model: MprModel, variant: SupplyVariant) -> bool:
    """Whether skipping non-checkpoint offsets is sound for this supply.

    Where no cap binds, DEM rises by at most m' - 1 per unit between
    checkpoints, so skipping is sound when the supply rises at least as fast.
    """
    variant = SupplyVariant(variant)
    if variant is SupplyVariant.IMPROVED:
        return True
    if variant in (SupplyVariant.LINEAR_LOWER, SupplyVariant.LINEAR_UPPER):
        return model.bandwidth >= model.mprime - 1
    return False


def offset_stream(ts: TaskSet, k: int, skip: bool) -> Iterator[int]:
    """Unbounded ascending offsets to evaluate for task ``k``.

    Every integer while caps may bind; beyond that, checkpoints only (when
    ``skip`` is allowed).
    """
    free = cap_free_offset(ts, k) if skip else None
    if free is None:
        yield from itertools.count()
        return
    yield from range(free)
    Dk = ts[k].deadline
    lo = free + Dk
    heap = []
    for i, t in enumerate(ts):
        for base in (0, t.deadline):
            x = base if base >= lo else base + ((lo - base + t.period - 1) // t.period) * t.period
            heap.append((x, t.period, i, base))
    heapq.heapify(heap)
    last = None
    while True:
        x, period, i, base = heap[0]
        heapq.heapreplace(heap, (x + period, period, i, base))
        if x != last:
            last = x
            yield x - Dk


def candidate_offsets(ts: TaskSet, k: int, limit: int, skip: bool) -> List[int]:
    """Offsets to evaluate below ``limit``."""
    return list(itertools.takewhile(lambda a: a < limit, offset_stream(ts, k, skip)))


def search_limits(ts: TaskSet, model: MprModel) -> Optional[List[int]]:
    """Per-task exclusive offset limits, or None when the bandwidth is too low."""
    bw, u = model.bandwidth, ts.utilization
    if bw > u:
        return [ak_bound(ts, k, model) for k in range(len(ts))]
    if bw == u:
        lim = periodic_limit(ts, model)
        return [lim] * len(ts)
    return None


def is_schedulable(
    ts: TaskSet,
    model: MprModel,
    variant: SupplyVariant = SupplyVariant.EXACT,
    exhaustive: bool = False,
) -> SchedVerdict:
    """Check DEM <= supply for every task and every offset below the limit.

    ``exhaustive`` forces evaluation at every integer offset even where the
    checkpoint shortcut would be sound.
    """
    require_feasible(model)
    variant = SupplyVariant(variant)
    demand = DemandEvaluator(ts, model.mprime)
    cps = uses_checkpoints(model, variant) and not exhaustive
    limits = search_limits(ts, model)
    count = 0
    if limits is None:
        # bandwidth below utilization: a violation exists for every k; find the first
        for k in range(len(ts)):
            A = 0
            while True:
                d = demand(k, A)
                s = supply(model, A + ts[k].deadline, variant)
                count += 1
                if d > s:
                    return SchedVerdict(False, Witness(k, A, d, s), count)
                A += 1
    for k, lim in enumerate(limits):
        Dk = ts[k].deadline
        for A in candidate_offsets(ts, k, lim, cps):
            d = demand(k, A)
            s = supply(model, A + Dk, variant)
            count += 1
            if d > s:
                return SchedVerdict(False, Witness(k, A, d, s), count)
    return SchedVerdict(True, None, count)


def first_violation_scan(ts: TaskSet, model: MprModel, variant: SupplyVariant, k: int, limit: int):
    """Smallest integer A_k < limit violating DEM <= supply, or None."""
    demand = DemandEvaluator(ts, model.mprime)
    Dk = ts[k].deadline
    for A in range(limit):
        if demand(k, A) > supply(model, A + Dk, variant):
            return A
    return None


def schedulability_load(ts: TaskSet, mprime: int) -> Fraction:
    """Largest DEM/(A_k + D_k) over all tasks and integer offsets.

    Offsets where a cap may bind are all scanned. Past them, and once the
    running maximum rho reaches m' - 1, DEM - rho t cannot rise between
    checkpoints, so only checkpoints are scanned. The scan ends because
    DEM(t) <= U t + K_k with K_k = C_sigma + (m'-1) C_k + U', so no ratio past
    K_k/(rho - U) can beat rho; if rho equals U the periodic limit closes it.

    Raises InfeasibleAtM when the load exceeds ``mprime``.
    """
    if mprime < 1:
        raise ValueError("m' must be positive")
    u = ts.utilization
    demand = DemandEvaluator(ts, mprime)
    S = demand.scale
    best = Fraction(0)
    for k, tk in enumerate(ts):
        best = max(best, Fraction(demand(k, 0), tk.deadline))
    per = None
    chunk = 2048
    for k, tk in enumerate(ts):
        K = ts.c_sigma(mprime) + (mprime - 1) * tk.wcet + ts.deadline_slack_load
        A_cur = 0
        while True:
            if best > u:
                lim = math.floor(K / (best - u)) - tk.deadline + 1
            else:
                if per is None:
                    per = _periodic_limit_for_load(ts, u, mprime)
                lim = per
            if A_cur >= lim:
                break
            offs = [A for A in candidate_offsets(ts, k, lim, best >= mprime - 1) if A >= A_cur][:chunk]
            if not offs:
                break
            ds = demand.raw_many(k, offs)
            bn, bd = best.numerator, best.denominator
            for A, d in zip(offs, ds):
                if d * bd > bn * S * (A + tk.deadline):
                    best = Fraction(d, S * (A + tk.deadline))
                    bn, bd = best.numerator, best.denominator
            A_cur = offs[-1] + 1
    if best > mprime:
        raise InfeasibleAtM(best, mprime)
    return exact(best) if best.denominator == 1 else best


def _periodic_limit_for_load(ts: TaskSet, u: Fraction, mprime: int) -> int:
    # a zero-blackout supply at rate u: any period works, 1 keeps the horizon short
    return periodic_limit(ts, MprModel.unchecked(1, u, max(1, mprime)))
