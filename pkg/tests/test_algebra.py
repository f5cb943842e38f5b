from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from scipy.integrate import solve_ivp

from cartan.algebra import (IDENTITY, X1, X2, AlgebraElement, GroupPoint, bch3, bracket, exp_horizontal,
                            exp_to_group, format_rational, frame, group_to_exp, inv, mul, mul_via_bch,
                            parse_point)

from conftest import points, rationals


def test_brackets_of_the_basis():
    assert bracket(X2, X1) == AlgebraElement(0, 0, 1, 0, 0)
    X3 = bracket(X2, X1)
    assert bracket(X3, X1) == AlgebraElement(0, 0, 0, 1, 0)
    assert bracket(X3, X2) == AlgebraElement(0, 0, 0, 0, 1)
    assert bracket(X1, X2) == AlgebraElement(0, 0, -1, 0, 0)


def test_bch_of_generators_hand_expansion():
    # X + Y + [X,Y]/2 + ([X,[X,Y]] + [Y,[Y,X]])/12 with X = X2, Y = X1
    assert bch3(X2, X1) == AlgebraElement(1, 1, F(1, 2), F(1, 12), F(-1, 12))


def test_mul_hand_computed():
    p, q = (1, 2, 3, 4, 5), (6, 7, 8, 9, 10)
    assert mul(p, q) == GroupPoint(7, 9, 4, F(17, 2), F(75, 2))


def test_exp_horizontal_closed_form():
    assert exp_horizontal(2, 3) == GroupPoint(2, 3, -3, 2, 6)
    assert exp_horizontal(F(1, 2), 0) == GroupPoint(F(1, 2), 0, 0, 0, 0)


def test_integer_input_stays_exact():
    out = mul((1, 1, 0, 0, 0), (1, 1, 0, 0, 0))
    assert all(isinstance(c, F) for c in out)
    assert all(isinstance(c, F) for c in mul_via_bch((1, 2, 3, 4, 5), (0, 1, 0, 0, 0)))


def _frame_ode(p, u1, u2):
    # left-invariant fields written out independently of the library
    def rhs(_, y):
        x1, x2 = y[0], y[1]
        return [u1, u2, -u2 * x1, 0.5 * u2 * x1 * x1, u2 * x1 * x2]

    sol = solve_ivp(rhs, (0, 1), [float(c) for c in p], rtol=1e-12, atol=1e-12)
    return sol.y[:, -1]


@pytest.mark.parametrize("p,u", [((0, 0, 0, 0, 0), (1.0, 2.0)), ((0.5, -1, 0.3, 2, -0.7), (-0.4, 1.3)),
                                 ((2, 3, -1, 0.25, 1), (0.0, -2.0))])
def test_mul_matches_flow_of_frame(p, u):
    got = np.array([float(c) for c in mul(p, exp_horizontal(*u))])
    np.testing.assert_allclose(got, _frame_ode(p, *u), atol=1e-9)


def test_frame_columns():
    p = GroupPoint(2, 3, 0, 0, 0)
    x1, x2 = frame(p)[:2]
    assert x1 == (1, 0, 0, 0, 0)
    assert x2 == (0, 1, -2, 2, 6)


@given(points, points)
def test_mul_equals_bch_pipeline(p, q):
    assert mul(p, q) == mul_via_bch(p, q)


@given(points, points, points)
def test_associativity(p, q, r):
    assert mul(mul(p, q), r) == mul(p, mul(q, r))


@given(points)
def test_inverse_and_identity(p):
    assert mul(p, inv(p)) == IDENTITY
    assert mul(inv(p), p) == IDENTITY
    assert mul(p, IDENTITY) == GroupPoint(*p)


@given(points)
def test_exp_log_roundtrip(p):
    assert exp_to_group(group_to_exp(p)) == GroupPoint(*p)


@given(rationals, rationals)
def test_exp_horizontal_is_exponential(a, b):
    assert exp_horizontal(a, b) == exp_to_group((a, b, 0, 0, 0))


def test_float_backend_close_to_exact():
    p, q = (F(1, 3), F(-2, 7), F(5, 11), 1, F(1, 9)), (F(3, 5), 2, F(-1, 4), F(2, 3), 0)
    exact = mul(p, q)
    approx = mul([float(c) for c in p], [float(c) for c in q])
    np.testing.assert_allclose([float(c) for c in exact], approx, rtol=1e-14)


def test_parse_and_format():
    p = parse_point("(1/2, -3, 0, 7/9, 1)")
    assert p == GroupPoint(F(1, 2), -3, 0, F(7, 9), 1)
    assert format_rational(F(-7, 9)) == "-7/9"
    assert format_rational(F(4)) == "4"
    with pytest.raises(ValueError):
        parse_point("1,2,3")
