from fractions import Fraction as F

import pytest
from hypothesis import given

from cartan.algebra import GroupPoint, mul
from cartan.curves import Direction
from cartan.staircase import commutator_target, commutator_word, staircase, staircase_target

from conftest import nonzero_rationals, rationals


def test_unit_commutator_by_hand():
    # exp(X2) exp(X1) exp(-X2) exp(-X1), multiplied out by hand
    assert commutator_word(1, 1).end == GroupPoint(0, 0, 1, F(-1, 2), F(-1, 2))
    assert commutator_target(1, 1) == GroupPoint(0, 0, 1, F(-1, 2), F(-1, 2))


def test_letter_pattern():
    curve = staircase(F(1, 2), "x4")
    assert curve.letters() == [Direction.MINUS_X2, Direction.PLUS_X1, Direction.PLUS_X2, Direction.MINUS_X1,
                               Direction.MINUS_X2, Direction.MINUS_X1, Direction.PLUS_X2, Direction.PLUS_X1]
    assert curve.duration == 8


@pytest.mark.parametrize("lam", [F(1), F(-1), F(2, 3), F(-7, 5), F(1, 120)])
def test_staircase_targets(lam):
    assert staircase(lam, "x4").end == GroupPoint(0, 0, 0, lam ** 3, 0)
    assert staircase(lam, "x5").end == GroupPoint(0, 0, 0, 0, lam ** 3)


@given(nonzero_rationals)
def test_endpoint_and_length(lam):
    for axis in ("x4", "x5"):
        c = staircase(lam, axis)
        assert c.end == staircase_target(lam, axis)
        assert c.length() == 8 * abs(lam)


@given(rationals, rationals)
def test_staircase_is_left_translation_invariant(a, b):
    start = GroupPoint(a, b, 1, 0, F(1, 3))
    c = staircase(F(3, 4), "x5", start=start)
    assert c.end == mul(start, (0, 0, 0, 0, F(27, 64)))


def test_bad_axis():
    with pytest.raises(ValueError):
        staircase(1, "x3")
