from fractions import Fraction

import pytest
from hypothesis import given

from mprkit.model import MprModel, SporadicTask, TaskSet
from mprkit.transform import (
    Rounding, ServerTaskSet, transform_def2, transform_def3, validate_transformation,
)

from strategies import improved_models, mpr_models


def triples(sts):
    return [t.as_tuple() for t in sts.tasks]


@pytest.mark.parametrize("model, expected", [
    (MprModel(6, "8.22", 2), [(6, 5, 6), (6, 4, 6)]),
    (MprModel(8, "2.34", 1), [(8, 3, 8)]),
    (MprModel(5, "5.83", 2), [(5, 3, 5), (5, 3, 5)]),
])
def test_def2_ceil_reference_sets(model, expected):
    assert triples(transform_def2(model, Rounding.CEIL)) == expected


def test_def2_exact_split():
    sts = transform_def2(MprModel(5, "5.83", 2), Rounding.EXACT)
    assert triples(sts) == [(5, 3, 5), (5, Fraction(283, 100), 5)]
    assert validate_transformation(sts)


def test_def2_with_k_zero():
    # alpha < 1, so no server sits above the floor
    assert triples(transform_def2(MprModel(4, "6.5", 2))) == [(4, Fraction(7, 2), 4), (4, 3, 4)]


@pytest.mark.parametrize("model, expected", [
    (MprModel(6, "8.22", 2), [(6, 6, 6), (6, Fraction(111, 50), 6)]),
    (MprModel(3, 2, 1), [(3, 2, 3)]),
    (MprModel(5, 10, 2), [(5, 5, 5), (5, 5, 5)]),
])
def test_def3_examples(model, expected):
    sts = transform_def3(model)
    assert triples(sts) == expected
    assert validate_transformation(sts)


def test_def3_rejects_low_capacity():
    with pytest.raises(ValueError):
        transform_def3(MprModel(6, 5, 2))


def test_validation_catches_short_capacity():
    fake = ServerTaskSet(TaskSet.of((6, 6, 6)), MprModel(6, "8.22", 2))
    assert not validate_transformation(fake)
    too_many = ServerTaskSet(TaskSet.of((6, 2, 6), (6, 2, 6), (6, 2, 6)), MprModel(6, 6, 2))
    assert not validate_transformation(too_many)
    wrong_period = ServerTaskSet(TaskSet(( SporadicTask(5, 4, 5), SporadicTask(6, 4, 6))), MprModel(6, 8, 2))
    assert not validate_transformation(wrong_period)


@given(mpr_models())
def test_def2_totals(model):
    if model.Theta == 0:
        return
    ex = transform_def2(model, Rounding.EXACT)
    assert ex.total_capacity == model.Theta
    assert len(ex.tasks) <= model.mprime
    assert all(t.wcet <= model.Pi for t in ex.tasks)
    assert validate_transformation(ex)
    ce = transform_def2(model, Rounding.CEIL)
    assert model.Theta <= ce.total_capacity <= model.Theta + model.mprime
    assert validate_transformation(ce)


@given(improved_models())
def test_def3_totals(model):
    if model.Theta == (model.mprime - 1) * model.Pi:
        return
    sts = transform_def3(model)
    assert sts.total_capacity == model.Theta
    assert len(sts.tasks) == model.mprime
    assert sum(1 for t in sts.tasks if t.wcet == model.Pi) >= model.mprime - 1
