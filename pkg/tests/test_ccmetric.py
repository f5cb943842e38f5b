import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan.algebra import GroupPoint, exp_horizontal, inv, mul
from cartan.ccmetric import (DistanceBudget, ball_box_scan, canonical_word, cc_lower, cc_upper,
                             euclidean_from_cc, rescore)
from cartan.curves import PolygonalCurve

FAST = DistanceBudget(restarts=2, iterations=100)


def test_budget_validation():
    with pytest.raises(ValueError):
        DistanceBudget(pieces=4)
    with pytest.raises(ValueError):
        DistanceBudget(restarts=0)


def test_identical_points():
    r = cc_upper((1, 2, 3, 4, 5), (1, 2, 3, 4, 5))
    assert r.value == 0 and r.ok


def test_horizontal_target_is_straight_line():
    r = cc_upper((0, 0, 0, 0, 0), exp_horizontal(F(3, 5), F(4, 5)), FAST)
    assert r.value == pytest.approx(1.0, abs=1e-12)
    assert r.lower == pytest.approx(1.0)


def test_vertical_target_bounds():
    r = cc_upper((0, 0, 0, 0, 0), (0, 0, 0, 1, 0), FAST)
    assert r.ok and r.lower == 0
    # the x4 staircase of unit height has length 8; optimization does better
    assert 1.0 < r.value < 8.0


def test_left_invariance():
    g = GroupPoint(F(1, 10), F(-1, 5), F(1, 20), F(1, 100), 0)
    p = GroupPoint(1, 2, 3, -1, F(1, 2))
    a = cc_upper((0, 0, 0, 0, 0), g, FAST)
    b = cc_upper(p, mul(p, g), FAST)
    assert a.value == pytest.approx(b.value, rel=1e-9)


def test_witness_is_checked_exactly():
    q = GroupPoint(F(1, 3), F(1, 7), F(1, 50), 0, F(1, 200))
    r = cc_upper((0, 0, 0, 0, 0), q, FAST)
    length, res = rescore(r.witness, q)
    assert res <= 1e-9 and length == r.value
    assert r.lower <= r.value


def test_deterministic():
    q = (0.2, -0.1, 0.05, 0.01, -0.02)
    assert cc_upper((0,) * 5, q, FAST).value == cc_upper((0,) * 5, q, FAST).value


@settings(max_examples=15)
@given(st.tuples(*[st.fractions(-1, 1, max_denominator=20)] * 5))
def test_canonical_word_reaches_target(g):
    w = PolygonalCurve(pieces=tuple(canonical_word(np.array([float(c) for c in g]))))
    end = np.array([float(c) for c in w.end])
    np.testing.assert_allclose(end, [float(c) for c in g], atol=1e-9)


@settings(max_examples=10)
@given(st.tuples(*[st.floats(-0.5, 0.5)] * 5), st.tuples(*[st.floats(-0.5, 0.5)] * 5))
def test_bounds_are_ordered(p, q):
    r = cc_upper(p, q, FAST)
    assert r.ok and cc_lower(p, q) <= r.value * (1 + 1e-12)


def test_euclidean_conversion():
    assert euclidean_from_cc((0, 0, 0, 0, 0), 0) == 0
    p = (0.5, 0.1, 0, 0, 0)
    d = 1e-3
    q = mul(p, exp_horizontal(0, d))
    e = math.dist([float(c) for c in p], [float(c) for c in q])
    assert e <= euclidean_from_cc(p, d)


def test_ball_box_scan_small():
    rep = ball_box_scan(2, radius=0.5, budget=FAST, seed=1)
    assert rep.kappa_ratio > 0 and rep.holder_ratio > 0 and rep.skipped == 0
