from fractions import Fraction

import pytest
from hypothesis import given

from mprkit.model import MprModel
from mprkit.supply import (
    SupplyVariant, improved_applicable, lsbf, lsbf_intercept, sbf, sbf_corner, sbf_improved,
    sbf_oracle, supply, supply_pattern, usbf,
)

from strategies import improved_models, mpr_models

Q = Fraction(1, 4)
G1 = MprModel(6, "8.22", 2)
G3 = MprModel(5, "5.83", 2)


def grid(model, periods=4):
    return [Q * i for i in range(int(periods * model.Pi / Q) + 1)]


def test_sbf_examples():
    assert sbf(G1, 0) == 0
    assert sbf(G1, 2) == 0
    # pinned from the sliding-window oracle at 1/100 resolution
    assert sbf(G3, 12) == sbf_oracle(G3, 12, Fraction(1, 100)) == Fraction(1149, 100)
    assert sbf(G3, 5) == sbf_oracle(G3, 5, Fraction(1, 100)) == Fraction(183, 100)


def test_sbf_blackout_length():
    # no supply for 2 Pi - 2 ceil(Theta/m') units, then it starts
    assert sbf(G1, 2) == 0 and sbf(G1, 3) > 0


def test_lsbf_examples():
    assert lsbf(G1, Fraction(578, 100)) == 0
    assert lsbf_intercept(G1) == Fraction(289, 50)
    assert lsbf(G1, Fraction(1178, 100)) == Fraction(411, 50)
    assert lsbf(G1, 0) < 0


def test_improved_examples():
    assert sbf_improved(G3, 5) == Fraction(583, 100)
    assert sbf_improved(G3, 10) == Fraction(1166, 100)
    assert sbf_improved(G1, 3) == 3


def test_improved_rejects_models_without_full_processors():
    m = MprModel(6, 6, 4)
    assert not improved_applicable(m)
    with pytest.raises(ValueError):
        sbf_improved(m, 4)


def test_usbf_examples():
    assert usbf(G1, 6) == Fraction(411, 50)
    assert usbf(G1, 0) == 0
    assert usbf(MprModel(8, "2.34", 1), 4) == Fraction(117, 100)


def test_oracle_examples():
    assert sbf_oracle(MprModel(6, 12, 2), 4) == 8
    assert sbf_oracle(G1, 2) == 0
    with pytest.raises(ValueError):
        sbf_oracle(G1, 2, Fraction(2, 3))


def test_supply_dispatch_and_infeasible_model():
    assert supply(G1, 6, SupplyVariant.LINEAR_UPPER) == usbf(G1, 6)
    assert supply(G1, 6, "improved") == sbf_improved(G1, 6)
    with pytest.raises(ValueError):
        sbf(MprModel.unchecked(2, 5, 2), 1)


def test_pattern_budget_per_period():
    segs = supply_pattern(G3, 3)
    for j in range(3):
        lo, hi = j * 5, (j + 1) * 5
        got = sum((min(e, hi) - max(s, lo)) * r for s, e, r in segs if min(e, hi) > max(s, lo))
        assert got == G3.Theta


@given(mpr_models())
def test_lower_bound_holds_outside_alpha_zero(model):
    if sbf_corner(model) == "alpha_zero":
        return
    for t in grid(model):
        assert max(0, lsbf(model, t)) <= sbf(model, t)


@given(mpr_models())
def test_closed_form_matches_oracle_in_general_class(model):
    if sbf_corner(model) != "general":
        return
    for t in grid(model):
        assert sbf(model, t) == sbf_oracle(model, t)


@given(mpr_models())
def test_sbf_nondecreasing_outside_alpha_zero(model):
    if sbf_corner(model) == "alpha_zero":
        return
    vals = [sbf(model, t) for t in grid(model)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_beta_zero_corner_is_pessimistic():
    # dedicated two processors: the closed form subtracts m' in the x outside [1, y] branch
    m = MprModel(6, 12, 2)
    assert sbf_corner(m) == "beta_zero"
    assert sbf(m, 4) == 6 and sbf_oracle(m, 4) == 8


def test_alpha_zero_corner_known_counterexample():
    m = MprModel(2, Fraction(1, 4), 1)
    assert sbf_corner(m) == "alpha_zero"
    assert sbf(m, 7) == 0 < lsbf(m, 7) == Fraction(3, 16)


@given(improved_models())
def test_improved_properties(model):
    ts = grid(model)
    vals = [sbf_improved(model, t) for t in ts]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    for k in range(5):
        assert sbf_improved(model, k * model.Pi) == k * model.Theta
    strict = (model.mprime - 1) * model.Pi < model.Theta < model.mprime * model.Pi
    for t, v in zip(ts, vals):
        assert usbf(model, t) >= v
        if strict:
            assert (usbf(model, t) == v) == (t % model.Pi == 0)
    for n in range(4 * model.Pi):
        assert sbf_improved(model, n + 1) - sbf_improved(model, n) >= model.mprime - 1
        assert sbf_improved(model, n) >= sbf(model, n)
