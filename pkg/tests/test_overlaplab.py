import numpy as np
import pytest
from scipy.integrate import quad

from cartan.curves import horizontality_residual
from cartan.modification import ModificationSpec, build
from cartan.overlaplab import (C1HFamilySpec, MollifiedControls, TrigControls, badintersect_harness, bypass,
                               coincidence_measure, generate, lusin_experiment, member_samples, members,
                               midpoint_grid, smoothed_copy)

UNIT = ModificationSpec(0, 1, 1, 5, "alpha+")


def test_mollified_displacement_matches_quadrature():
    ctrl = MollifiedControls((1.0, -0.5), [(0.3, -0.4, 1.0), (0.7, 0.2, -0.25)], 0.01)
    for t in (0.1, 0.305, 0.5, 0.71, 1.0):
        for i in range(2):
            want = quad(lambda s: float(ctrl.velocity(s)[i]), 0, t, points=[0.29, 0.31, 0.69, 0.71],
                        epsabs=1e-13)[0]
            assert float(ctrl.displacement(t)[i]) == pytest.approx(want, abs=1e-11)


def test_trig_displacement_matches_quadrature():
    rng = np.random.default_rng(0)
    ctrl = TrigControls((0.8, -0.1), rng.normal(size=(2, 3)), rng.normal(size=(2, 3)))
    for t in (0.2, 0.55, 1.0):
        for i in range(2):
            want = quad(lambda s: float(ctrl.velocity(s)[i]), 0, t, epsabs=1e-13)[0]
            assert float(ctrl.displacement(t)[i]) == pytest.approx(want, abs=1e-11)


def test_self_coincidence_is_total():
    c = build(UNIT)
    assert coincidence_measure(c, c, grid=1000) == 1.0
    with pytest.raises(ValueError):
        coincidence_measure(c, c, tau=0)


def test_bypass_coincidence_closed_form():
    w = 1e-3
    m = bypass(UNIT, w)
    # it shares the first and last straight phases except near the two corners
    frac = coincidence_measure(member_samples(m, 20_000), build(UNIT), grid=20_000)
    assert frac == pytest.approx(10 / 17 - 2 * w, abs=2e-4)


def test_smoothed_copy_follows_first_segment():
    c = build(UNIT)
    m = smoothed_copy(c, 0, 2, 1e-3)
    states = member_samples(m, 2000)
    ts = midpoint_grid(2000)
    early = ts < 5 / 17 - 2e-3
    np.testing.assert_allclose(states[early], c.sample(ts[early]), atol=1e-12)


def test_members_are_horizontal_and_deterministic():
    spec = C1HFamilySpec(count=20, seed=4)
    curves = generate(spec)
    # smoothed copies that dip below the floor are dropped
    assert 0 < len(curves) < 20
    assert all(min(abs(cc.u1)) >= 0.5 for cc in curves)
    assert all(horizontality_residual(cc.grid, cc.states) < 1e-6 for cc in curves)
    a, b = members(spec), members(spec)
    assert [m.label for m in a] == [m.label for m in b]


def test_family_validation_and_json():
    with pytest.raises(ValueError):
        C1HFamilySpec(kind="spiral")
    with pytest.raises(ValueError):
        C1HFamilySpec(floor=2.0, bound=1.5)
    spec = C1HFamilySpec(kind="trig", count=3, target=UNIT)
    assert C1HFamilySpec.from_json(spec.to_json()) == spec
    with pytest.raises(ValueError):
        C1HFamilySpec.from_json({"colour": 1})


def test_line_members_respect_floor():
    spec = C1HFamilySpec(kind="lines", count=10, seed=2)
    grid = np.linspace(0, 1, 101)
    assert all(m.floor_margin(grid, 1) >= 0.5 for m in members(spec))


def test_badintersect_small():
    rep = badintersect_harness(UNIT, C1HFamilySpec(count=10, seed=1), grid=5000)
    assert rep.passed and rep.max_coincidence <= 0.82
    assert rep.to_csv().startswith("curve_id,kind,coincidence")
    with pytest.raises(ValueError):
        badintersect_harness(UNIT, C1HFamilySpec(count=2, floor=0.25))


def test_lusin_small():
    table = lusin_experiment([1, 2], C1HFamilySpec(count=8, seed=7, include_gamma1=True), grid=2000)
    assert [r.level for r in table.rows] == [1, 2]
    # gamma_1 is a family member, so level 1 coincides fully
    assert table.rows[0].max == 1.0
    assert table.non_increasing
