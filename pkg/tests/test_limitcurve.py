import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cartan.algebra import GroupPoint
from cartan.curves import Direction
from cartan.limitcurve import (CurveAddress, cell_check, derivative_probe, direction, eval_gamma,
                               gap_bound_check, junction_distance, letter_grid_check, level_params,
                               lipschitz_check, materialize, midpoint_times, ratio, sample_csv, step_bound,
                               tail_bound)

N2 = 2_350_080_000


def test_level_two_by_hand():
    p = level_params(2)
    assert p.lam == F(17, 15)
    assert p.N == 80 * 17 * 120 ** 3 == N2


def test_level_three_recurrence():
    p = level_params(3)
    assert p.lam == F(77, 75) * F(17, 15)
    assert p.N == 80 * 77 * (600 * N2) ** 3
    assert ratio(3) % (8 * 77) == 0


def test_kappa_scales_N():
    assert level_params(2, kappa=3).N == 3 * N2


def test_deep_levels_are_big_integers():
    lams = [level_params(n).lam for n in range(1, 11)]
    assert all(1 <= lam < F(3, 2) for lam in lams)
    assert all(b > a for a, b in zip(lams, lams[1:]))
    # the decimal string of N_10 would exceed Python's default digit limit
    assert level_params(10).N.bit_length() > 10 ** 5


def test_invalid_levels():
    with pytest.raises(ValueError):
        level_params(0)
    with pytest.raises(ValueError):
        level_params(2, kappa=0)


def test_values_at_known_times():
    assert eval_gamma(2, F(6, 17)) == GroupPoint(F(1, 3), 0, 0, 0, F(1, 1728000))
    assert eval_gamma(1, F(1, 2)) == GroupPoint(F(1, 2), 0, 0, 0, 0)
    assert eval_gamma(2, F(5, 17)) == GroupPoint(F(1, 3), 0, 0, 0, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_endpoints_fixed(n):
    assert eval_gamma(n, 0) == GroupPoint(0, 0, 0, 0, 0)
    assert eval_gamma(n, 1) == GroupPoint(1, 0, 0, 0, 0)


def test_knots_inherited_from_previous_level():
    rng = random.Random(3)
    for _ in range(20):
        t = F(rng.randint(0, N2), N2)
        assert eval_gamma(3, t) == eval_gamma(2, t)


def test_materialized_matches_lazy():
    c = materialize(2)
    for t in (F(1, 7), F(1, 3), F(12, 17), F(99, 100)):
        assert c(t) == eval_gamma(2, t)
    with pytest.raises(ValueError):
        materialize(3)


def test_addresses():
    a = CurveAddress.containing(2, F(1, 2))
    assert a.j == N2 // 2 and a.interval[1] == F(1, 2)
    assert a.parent() == CurveAddress(1, 1)
    assert [x.n for x in CurveAddress(3, 5).ancestors()] == [1, 2, 3]
    with pytest.raises(IndexError):
        CurveAddress(2, N2 + 1)


def test_direction_first_and_middle_letters():
    assert direction(CurveAddress(2, 1))[0] == Direction.PLUS_X1
    # the up staircase occupies letters 41..48 of 136; its first letter moves along +X2
    j = 40 * (N2 // 136) + 1
    assert direction(CurveAddress(2, j))[0] == Direction.PLUS_X2


def test_letter_grid_level_two():
    assert letter_grid_check(1)
    assert letter_grid_check(2)


@given(st.integers(1, level_params(3).N))
def test_level_three_cells(j):
    assert cell_check(CurveAddress(3, j))


@given(st.fractions(0, 1, max_denominator=10 ** 9))
def test_memo_is_transparent(t):
    assert eval_gamma(3, t) == eval_gamma(3, t, cache=False)


@given(st.fractions(0, 1, max_denominator=10 ** 6), st.fractions(0, 1, max_denominator=10 ** 6))
def test_planar_lipschitz(s, t):
    assert lipschitz_check(2, min(s, t), max(s, t))


def test_bounds():
    assert step_bound(1) == F(2, 5)
    assert step_bound(2) == F(2, N2 * 25)
    assert tail_bound(1) > step_bound(1)
    assert tail_bound(2) < tail_bound(1)


def test_gap_check_planar():
    for t in (F(1, 4), F(6, 17), F(1, 2), F(9, 10)):
        rep = gap_bound_check(1, t)
        assert rep.planar_ok and rep.planar_gap <= 0.4
    # on the middle straight phase x1 has caught up exactly
    assert gap_bound_check(1, F(1, 2)).planar_gap == 0


def test_level_three_close_to_level_two():
    t = F(123456789, 10 ** 9)
    p, q = eval_gamma(2, t), eval_gamma(3, t)
    assert max(abs(float(a - b)) for a, b in zip(p, q)) < float(tail_bound(2)) * 10


def test_derivative_probe():
    rep = derivative_probe(2, F(1, 34))
    assert rep.direction == Direction.PLUS_X1
    assert rep.quotient[0] == pytest.approx(17 / 15, abs=1e-12)
    assert rep.matches()
    with pytest.raises(ValueError):
        derivative_probe(2, F(5, 17))
    assert junction_distance(2, F(5, 17)) == 0


def test_csv_export():
    lines = sample_csv(2, 5).splitlines()
    assert lines[0] == "t,x1,x2,x3,x4,x5" and len(lines) == 6
    assert midpoint_times(2) == [F(1, 4), F(3, 4)]
