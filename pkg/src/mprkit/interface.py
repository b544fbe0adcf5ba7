"""Minimum-bandwidth MPR interface generation for gEDF clusters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .demand import DemandEvaluator
from .model import MprModel, Rat, TaskSet, exact
from .schedulability import ak_bound, is_schedulable, offset_stream, periodic_limit, uses_checkpoints
from .supply import SupplyVariant

DEFAULT_RESOLUTION = Fraction(1, 100)
CHUNK = 2048


class InfeasibleInterfaceError(ValueError):
    """No processor count in the searched range admits an interface."""


@dataclass(frozen=True)
class InterfaceResult:
    model: MprModel
    load: Fraction
    m_range_searched: Tuple[int, int]
    per_m_bandwidth: Tuple = ()
    variant: SupplyVariant = SupplyVariant.LINEAR_LOWER


def _grid_up(x, res) -> Rat:
    if res is None:
        return exact(Fraction(x))
    return exact(math.ceil(Fraction(x) / res) * res)


def _improved_req(Pi: int, m: int, t: int, d) -> Fraction:
    """Smallest Theta with zero-blackout supply at length t reaching d."""
    k, r = divmod(t, Pi)
    if d <= k * (m * Pi - r) + r * (m - 1):
        return Fraction(0) if k == 0 else max(Fraction(0), Fraction(d - r * (m - 1), k))
    return max(Fraction(m * Pi - r), Fraction(d - r * m + m * Pi, k + 1))


def _lsbf_gap(Pi, m, t, d, theta):
    theta = Fraction(theta)
    return theta / Pi * (t - 2 * Pi + 2 * theta / m - 2) - d


def _lsbf_req(Pi: int, m: int, t: int, d, res: Fraction) -> Fraction:
    """Smallest grid Theta with the linear lower bound at length t reaching d.

    The gap is a convex quadratic in Theta that is negative at 0, so its
    nonnegative set on [0, inf) is [root, inf); a float estimate of the root
    is corrected by exact checks on the grid.
    """
    a = 2.0 / (m * Pi)
    b = (t - 2 * Pi - 2) / Pi
    root = (-b + math.sqrt(b * b + 4 * a * float(d))) / (2 * a)
    j = max(0, math.ceil(root / float(res) - 1e-6))
    while _lsbf_gap(Pi, m, t, d, j * res) < 0:
        j += 1
    while j > 0 and _lsbf_gap(Pi, m, t, d, (j - 1) * res) >= 0:
        j -= 1
    return j * res


def special_case_integral_u(ts: TaskSet) -> bool:
    """Whether bandwidth equal to an integral utilization can suffice.

    Only a single processor with every deadline implicit qualifies.

    >>> special_case_integral_u(TaskSet.of((2, 1, 2), (2, 1, 2)))
    True
    """
    u = ts.utilization
    if u.denominator != 1:
        raise ValueError("utilization is not integral")
    return u == 1 and all(t.implicit for t in ts)


def _supply_check(variant, Pi, m, theta, S):
    """Integer test ``raw_demand / S <= supply(theta, t)`` for fixed theta."""
    th = Fraction(theta)
    p, q = th.numerator, th.denominator
    if variant is SupplyVariant.IMPROVED:
        gap = m * Pi * q - p

        def ok(d, t):
            k, r = divmod(t, Pi)
            return d * q <= S * (k * p + r * m * q - min(r * q, gap))

        return ok
    L = Pi * m * q * q
    c1 = S * m * p * q
    c0 = S * (m * p * q * (-2 * Pi - 2) + 2 * p * p)
    return lambda d, t: d * L <= c1 * t + c0


def _offset_limit(ts, k, Pi, m, theta) -> int:
    model = MprModel(Pi, theta, m)
    if model.bandwidth > ts.utilization:
        return ak_bound(ts, k, model)
    return periodic_limit(ts, model)


def _search_theta(ts, Pi, m, variant, res, skip):
    """Raise Theta along ascending offsets until no offset below the bound fails.

    Theta only rises, and only at offsets the current Theta fails; the
    supply is increasing in Theta wherever it already covers a demand, so
    offsets passed earlier stay passed and the result is the largest
    per-offset requirement. Each task's scan stops at the offset bound for
    the current Theta; scans are resumed if a later Theta moves a bound up.
    """
    u = ts.utilization
    lower = u * Pi
    if variant is SupplyVariant.IMPROVED:
        lower = max(lower, Fraction((m - 1) * Pi))
    cap = m * Pi
    if lower > cap:
        return None
    demand = DemandEvaluator(ts, m)
    S = demand.scale
    theta = _grid_up(lower, res)
    if theta > cap:
        return None
    ok = _supply_check(variant, Pi, m, theta, S)
    streams = [offset_stream(ts, k, skip) for k in range(len(ts))]
    heads = [next(st) for st in streams]
    pending = True
    while pending:
        pending = False
        for k in range(len(ts)):
            Dk = ts[k].deadline
            while True:
                lim = _offset_limit(ts, k, Pi, m, theta)
                if heads[k] >= lim:
                    break
                chunk = [heads[k]]
                for A in streams[k]:
                    if A >= lim or len(chunk) >= CHUNK:
                        heads[k] = A
                        break
                    chunk.append(A)
                for A, d in zip(chunk, demand.raw_many(k, chunk)):
                    t = A + Dk
                    if ok(d, t):
                        continue
                    dq = Fraction(d, S)
                    if variant is SupplyVariant.IMPROVED:
                        req = _improved_req(Pi, m, t, dq)
                    else:
                        req = _lsbf_req(Pi, m, t, dq, res)
                    theta = _grid_up(max(req, theta), res)
                    if theta > cap:
                        return None
                    ok = _supply_check(variant, Pi, m, theta, S)
                    pending = True
        if pending:
            pending = any(heads[k] < _offset_limit(ts, k, Pi, m, theta) for k in range(len(ts)))
    return theta


def min_capacity(
    ts: TaskSet,
    Pi: int,
    mprime: int,
    variant: SupplyVariant = SupplyVariant.LINEAR_LOWER,
    resolution: Optional[Rat] = DEFAULT_RESOLUTION,
) -> Optional[Rat]:
    """Smallest Theta <= m' Pi passing the test, or None when none does.

    ``resolution`` is the Theta grid; ``None`` asks for the exact minimum,
    which only the zero-blackout variant supports.
    """
    variant = SupplyVariant(variant)
    if Pi < 1 or mprime < 1:
        raise ValueError("Pi and m' must be positive")
    res = None if resolution is None else Fraction(exact(resolution))
    if res is None and variant is not SupplyVariant.IMPROVED:
        raise ValueError(f"variant {variant.value} needs a finite resolution")
    u = ts.utilization
    if u > mprime:
        return None
    if u == mprime:
        # only full bandwidth is left; the test itself decides
        model = MprModel(Pi, mprime * Pi, mprime)
        return model.Theta if is_schedulable(ts, model, variant) else None

    if variant is SupplyVariant.EXACT or variant is SupplyVariant.LINEAR_UPPER:
        theta = _bisect_theta(ts, Pi, mprime, variant, res)
    else:
        theta = _search_theta(ts, Pi, mprime, variant, res, skip=True)
        if (
            theta is not None
            and variant is SupplyVariant.LINEAR_LOWER
            and not uses_checkpoints(MprModel(Pi, theta, mprime), variant)
        ):
            theta = _search_theta(ts, Pi, mprime, variant, res, skip=False)
    if theta is None:
        return None
    model = MprModel(Pi, theta, mprime)
    if not is_schedulable(ts, model, variant):
        raise AssertionError(f"generated interface {model} fails its own test")
    return theta


def _bisect_theta(ts, Pi, m, variant, res):
    lo = math.ceil(ts.utilization * Pi / res)
    hi = math.floor(m * Pi / res)
    if hi < lo or not is_schedulable(ts, MprModel(Pi, hi * res, m), variant):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if is_schedulable(ts, MprModel(Pi, mid * res, m), variant):
            hi = mid
        else:
            lo = mid + 1
    return exact(hi * res)


def processor_range(ts: TaskSet, m_cap: Optional[int] = None) -> Tuple[int, int]:
    """Search range for the processor count: ceil(U) up to the dedicated-safe count."""
    lo = max(1, math.ceil(ts.utilization))
    if m_cap is not None:
        return lo, m_cap
    slack = min(t.deadline - t.wcet for t in ts)
    if slack == 0:
        raise ValueError("a task has D = C; pass m_cap to bound the processor search")
    return lo, math.ceil(sum(Fraction(t.wcet) for t in ts) / slack) + len(ts)


def min_processors(
    ts: TaskSet,
    Pi: int,
    variant: SupplyVariant = SupplyVariant.LINEAR_LOWER,
    m_cap: Optional[int] = None,
    resolution: Optional[Rat] = DEFAULT_RESOLUTION,
) -> InterfaceResult:
    """Interface at the smallest processor count that admits one.

    Probes grow geometrically from the low end of the range (so cheap small
    m' are tried first), a binary search closes the last gap, and a downward
    probe guards against feasibility that is not monotone in m'.
    """
    variant = SupplyVariant(variant)
    lo, hi = processor_range(ts, m_cap)
    seen: Dict[int, Optional[Rat]] = {}

    def probe(m):
        if m not in seen:
            seen[m] = min_capacity(ts, Pi, m, variant, resolution)
        return seen[m]

    if hi < lo:
        raise InfeasibleInterfaceError(f"empty processor range [{lo}, {hi}] at Pi={Pi}")
    a, step, b = lo, 1, None
    while True:
        if probe(a) is not None:
            b = a
            break
        if a == hi:
            raise InfeasibleInterfaceError(f"no interface with m' in [{lo}, {hi}] at Pi={Pi}")
        lo_gap = a + 1
        a = min(hi, a + step)
        step *= 2
    a = lo if b == lo else lo_gap
    while a < b:
        mid = (a + b) // 2
        if probe(mid) is not None:
            b = mid
        else:
            a = mid + 1
    best = a
    while best - 1 >= lo and probe(best - 1) is not None:
        best -= 1
    theta = seen[best]
    model = MprModel(Pi, theta, best)
    per_m = tuple(sorted(seen.items()))
    return InterfaceResult(model, model.bandwidth, (lo, hi), per_m, variant)
