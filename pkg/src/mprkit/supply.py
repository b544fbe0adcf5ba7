"""Supply bound functions of the multiprocessor periodic resource model.

``sbf`` is the closed form evaluated at integer interval lengths (clamped at
zero); between integers it interpolates, except on the unit slot that opens a
supply block, where the full ``m'`` rate applies first. ``sbf_oracle`` is an
independent referee: it lays out the worst-case periodic supply pattern and
slides a window over it.
"""

from __future__ import annotations

import bisect
import enum
from fractions import Fraction

from .model import MprModel, Rat, ceil_div, exact, floor_div, require_feasible


class SupplyVariant(str, enum.Enum):
    EXACT = "exact"
    LINEAR_LOWER = "lsbf"
    IMPROVED = "improved"
    LINEAR_UPPER = "usbf"


def _norm(q) -> Rat:
    return exact(q) if isinstance(q, Fraction) else q


def _sbf_at_int(model: MprModel, n: int) -> Rat:
    Pi, Th, m = model.Pi, model.Theta, model.mprime
    tp = n - (Pi - ceil_div(Th, m))
    if tp < 0:
        return 0
    alpha = floor_div(Th, m)
    beta = Th - m * alpha
    y = Pi - alpha
    q, x = divmod(tp, Pi)
    val = q * Th + max(0, m * x - (m * Pi - Th))
    if not 1 <= x <= y:
        val -= m - beta
    return _norm(max(0, val))


def sbf(model: MprModel, t) -> Rat:
    """Minimum supply of ``model`` over any interval of length ``t``.

    >>> sbf(MprModel(6, "8.22", 2), 2)
    0
    """
    require_feasible(model)
    t = exact(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    n = floor_div(t, 1)
    e0 = _sbf_at_int(model, n)
    if t == n:
        return e0
    frac = t - n
    e1 = _sbf_at_int(model, n + 1)
    tp = n - (model.Pi - ceil_div(model.Theta, model.mprime))
    if tp >= model.Pi and tp % model.Pi == 0:
        # first unit after a block boundary: supply arrives at full rate
        return _norm(min(e0 + model.mprime * frac, e1))
    return _norm(e0 + frac * (e1 - e0))


def lsbf(model: MprModel, t) -> Rat:
    """Linear lower bound of ``sbf``; deliberately not clamped at zero."""
    require_feasible(model)
    Pi, Th, m = model.Pi, model.Theta, model.mprime
    return _norm(Fraction(Th, 1) / Pi * (exact(t) - (2 * (Pi - Fraction(Th) / m) + 2)))


def lsbf_intercept(model: MprModel) -> Rat:
    """Length at which ``lsbf`` crosses zero."""
    return _norm(2 * (model.Pi - Fraction(model.Theta) / model.mprime) + 2)


def improved_applicable(model: MprModel) -> bool:
    """Whether the zero-blackout supply describes a real schedule.

    The McNaughton layout of the server tasks needs m' - 1 full processors,
    i.e. Theta >= (m' - 1) Pi; below that the formula overshoots the budget.
    """
    return (model.mprime - 1) * model.Pi <= model.Theta <= model.mprime * model.Pi


def sbf_improved(model: MprModel, t) -> Rat:
    """Zero-blackout supply of a McNaughton-scheduled interface.

    >>> sbf_improved(MprModel(6, "8.22", 2), 3)
    3
    """
    require_feasible(model)
    if not improved_applicable(model):
        raise ValueError(f"improved supply needs Theta >= (m'-1)*Pi, got {model}")
    t = exact(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    Pi, Th, m = model.Pi, model.Theta, model.mprime
    k = floor_div(t, Pi)
    r = t - k * Pi
    return _norm(k * Th + r * m - min(r, m * Pi - Th))


def usbf(model: MprModel, t) -> Rat:
    require_feasible(model)
    return _norm(Fraction(model.Theta) / model.Pi * exact(t))


def supply(model: MprModel, t, variant: SupplyVariant) -> Rat:
    variant = SupplyVariant(variant)
    if variant is SupplyVariant.EXACT:
        return sbf(model, t)
    if variant is SupplyVariant.LINEAR_LOWER:
        return lsbf(model, t)
    if variant is SupplyVariant.IMPROVED:
        return sbf_improved(model, t)
    return usbf(model, t)


def sbf_corner(model: MprModel) -> str:
    """Classify the model: ``"general"``, ``"beta_zero"`` or ``"alpha_zero"``.

    The closed form is exact only in the general class; in the other two it is
    more pessimistic than the supply pattern it describes.
    """
    alpha = floor_div(model.Theta, model.mprime)
    if model.Theta - model.mprime * alpha == 0:
        return "beta_zero"
    if alpha == 0:
        return "alpha_zero"
    return "general"


# -- oracle -----------------------------------------------------------------


def supply_pattern(model: MprModel, periods: int):
    """Worst-case supply layout as sorted ``(start, end, rate)`` segments.

    The first period delivers its budget as early as possible (full-rate
    slices, then the remainder slot); every later period delivers it as late
    as possible (remainder slot, then full-rate slices). The gap in between
    is the longest stretch without supply.
    """
    Pi, Th, m = model.Pi, model.Theta, model.mprime
    alpha = floor_div(Th, m)
    beta = Th - m * alpha
    segs = []
    if alpha:
        segs.append((0, alpha, m))
    if beta:
        segs.append((alpha, alpha + 1, beta))
    for j in range(1, periods):
        end = (j + 1) * Pi
        if beta:
            segs.append((end - alpha - 1, end - alpha, beta))
        if alpha:
            segs.append((end - alpha, end, m))
    return segs


class _Cumulative:
    def __init__(self, segs):
        self.starts = [s for s, _, _ in segs]
        self.segs = segs
        self.prefix = [0]
        for s, e, r in segs:
            self.prefix.append(self.prefix[-1] + (e - s) * r)

    def __call__(self, x):
        i = bisect.bisect_right(self.starts, x) - 1
        if i < 0:
            return 0
        s, e, r = self.segs[i]
        return self.prefix[i] + (min(x, e) - s) * r


def sbf_oracle(model: MprModel, t, resolution=Fraction(1, 4)) -> Rat:
    """Brute-force minimum supply over window placements in the pattern.

    Window starts run over one period at ``resolution`` steps, together with
    every start that aligns either window edge with a segment boundary, so
    the minimum of the piecewise-linear window supply is attained exactly.
    """
    require_feasible(model)
    t = exact(t)
    resolution = Fraction(exact(resolution))
    if resolution <= 0 or (1 / resolution).denominator != 1:
        raise ValueError("resolution must be 1/k for a positive integer k")
    if t < 0:
        raise ValueError("t must be nonnegative")
    Pi = model.Pi
    periods = max(3, ceil_div(t + Pi, Pi) + 1)
    segs = supply_pattern(model, periods)
    F = _Cumulative(segs)
    steps = int(Pi / resolution)
    starts = {resolution * i for i in range(steps)}
    for s, e, _ in segs:
        for b in (s, e):
            for c in (b, b - t):
                if 0 <= c < Pi:
                    starts.add(Fraction(c))
    return _norm(min(F(s + t) - F(s) for s in starts))
