"""Global-EDF demand: workload with carry-in, dbf, interference and DEM."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import Rat, SporadicTask, TaskSet, exact


def _n(q):
    return exact(q) if isinstance(q, Fraction) else q


def carry_in(task: SporadicTask, t: int) -> Rat:
    """Carry-in bound CI(t) of a task over a window of length t."""
    T, C, D = task.period, task.wcet, task.deadline
    return _n(min(C, max(0, t - ((t + T - D) // T) * T)))


def workload_bound(task: SporadicTask, t: int) -> Rat:
    """Workload bound W(t): full jobs inside the window plus carry-in.

    >>> from mprkit.model import task
    >>> workload_bound(task(3, 2, 3), 7)
    5
    """
    T, C, D = task.period, task.wcet, task.deadline
    jobs = (t + T - D) // T
    return _n(jobs * C + min(C, max(0, t - jobs * T)))


def dbf(task: SporadicTask, t: int) -> Rat:
    T, C, D = task.period, task.wcet, task.deadline
    return _n(max(0, (t + T - D) // T) * C)


@dataclass(frozen=True)
class InterferenceTerms:
    i_hat: tuple
    i_bar: tuple
    carry_in_set: tuple

    @property
    def gaps(self):
        return tuple(_n(b - h) for h, b in zip(self.i_hat, self.i_bar))


def _select(gaps, size):
    # largest gaps first, lower index on ties
    order = sorted(range(len(gaps)), key=lambda i: (-gaps[i], i))
    return tuple(sorted(order[:size]))


def interference_terms(ts: TaskSet, k: int, A_k: int, mprime: int) -> InterferenceTerms:
    """Per-task interference bounds without and with carry-in for task ``k``."""
    if A_k < 0 or mprime < 1:
        raise ValueError("need A_k >= 0 and m' >= 1")
    tk = ts[k]
    t = A_k + tk.deadline
    cap = t - tk.wcet
    hats, bars = [], []
    for i, ti in enumerate(ts):
        w = workload_bound(ti, t)
        ci = carry_in(ti, t)
        if i == k:
            hats.append(_n(min(w - tk.wcet - ci, A_k)))
            bars.append(_n(min(w - tk.wcet, A_k)))
        else:
            hats.append(_n(min(w - ci, cap)))
            bars.append(_n(min(w, cap)))
    gaps = [b - h for h, b in zip(hats, bars)]
    return InterferenceTerms(tuple(hats), tuple(bars), _select(gaps, min(mprime - 1, len(ts))))


def dem(ts: TaskSet, k: int, A_k: int, mprime: int) -> Rat:
    """Upper bound on the demand task ``k`` sees over a window of length A_k + D_k."""
    terms = interference_terms(ts, k, A_k, mprime)
    total = mprime * ts[k].wcet + sum(terms.i_hat)
    total += sum(terms.i_bar[i] - terms.i_hat[i] for i in terms.carry_in_set)
    return _n(total)


class DemandEvaluator:
    """Fast repeated DEM evaluation for one task set and one m'.

    Same arithmetic as :func:`dem`, carried out on integers: capacities are
    scaled by the lcm of their denominators (``scale``) and :meth:`raw`
    returns DEM in those units.
    """

    def __init__(self, ts: TaskSet, mprime: int):
        self.ts = ts
        self.mprime = mprime
        self.scale = math.lcm(*(Fraction(t.wcet).denominator for t in ts))
        S = self.scale
        self.params = [(t.period, int(t.wcet * S), t.deadline) for t in ts]
        self.L = min(mprime - 1, len(ts))

    def raw(self, k: int, A: int) -> int:
        S = self.scale
        Tk, Ck, Dk = self.params[k]
        t = A + Dk
        cap = t * S - Ck
        As = A * S
        total = self.mprime * Ck
        gaps = []
        for i, (T, C, D) in enumerate(self.params):
            jobs = (t + T - D) // T
            base = jobs * C
            ci = min(C, max(0, (t - jobs * T) * S))
            if i == k:
                h = min(base - Ck, As)
                b = min(base - Ck + ci, As)
            else:
                h = min(base, cap)
                b = min(base + ci, cap)
            total += h
            if self.L:
                gaps.append(b - h)
        if self.L:
            gaps.sort(reverse=True)
            total += sum(gaps[: self.L])
        return total

    def raw_many(self, k: int, offsets) -> list:
        """:meth:`raw` for many offsets at once (vectorized)."""
        if len(offsets) == 0:
            return []
        S = self.scale
        Tk, Ck, Dk = self.params[k]
        A = np.asarray(offsets, dtype=np.int64)
        t = A + Dk
        cap = t * S - Ck
        As = A * S
        total = np.full(A.shape, self.mprime * Ck, dtype=np.int64)
        gaps = np.empty((len(self.params), A.size), dtype=np.int64)
        for i, (T, C, D) in enumerate(self.params):
            jobs = (t + T - D) // T
            base = jobs * C
            ci = np.minimum(C, np.maximum(0, (t - jobs * T) * S))
            if i == k:
                h = np.minimum(base - Ck, As)
                b = np.minimum(base - Ck + ci, As)
            else:
                h = np.minimum(base, cap)
                b = np.minimum(base + ci, cap)
            total += h
            gaps[i] = b - h
        if self.L:
            n = len(self.params)
            total += np.partition(gaps, n - self.L, axis=0)[n - self.L:].sum(axis=0)
        return total.tolist()

    def __call__(self, k: int, A: int) -> Rat:
        d = self.raw(k, A)
        return d // self.scale if d % self.scale == 0 else Fraction(d, self.scale)
