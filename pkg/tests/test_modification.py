from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cartan.algebra import GroupPoint
from cartan.curves import Direction
from cartan.modification import (ModificationSpec, Variant, build, deviation_check, letter_direction,
                                 verify_structure)

UNIT = ModificationSpec(0, 1, 1, 5, Variant.ALPHA_PLUS)

specs = st.builds(
    ModificationSpec,
    a=st.fractions(0, F(1, 2), max_denominator=40),
    b=st.fractions(F(3, 5), 1, max_denominator=40),
    lam=st.fractions(1, F(149, 100), max_denominator=100),
    Q=st.sampled_from([5, 6, 9, 25]),
    variant=st.sampled_from(list(Variant)),
)


def test_derived_quantities_unit_case():
    assert UNIT.lam_prime == F(17, 15)
    assert UNIT.mu == F(1, 120)
    assert UNIT.pieces == 17
    assert UNIT.delta == F(1, 17)
    assert UNIT.interval(6) == (F(5, 17), F(6, 17))


@pytest.mark.parametrize("kwargs", [dict(a=0, b=0, lam=1, Q=5), dict(a=0, b=1, lam=F(3, 2), Q=5),
                                    dict(a=0, b=1, lam=1, Q=4), dict(a=0, b=2, lam=1, Q=5)])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        ModificationSpec(**kwargs)


def test_segment_layout():
    c = build(UNIT)
    assert len(c.segments) == 19
    assert c.segments[0].duration == 5 * UNIT.delta
    assert all(s.speed == F(17, 15) for s in c.segments)
    assert c.length() == F(17, 15) * UNIT.L


def test_overpass_heights_alpha_and_beta():
    t = 6 * UNIT.delta
    assert build(UNIT)(t) == GroupPoint(F(1, 3), 0, 0, 0, F(1, 120) ** 3)
    beta = UNIT.with_variant("beta+")
    assert build(beta)(t) == GroupPoint(0, F(1, 3), 0, -F(1, 120) ** 3, 0)


@pytest.mark.parametrize("variant,end", [("alpha+", (1, 0)), ("alpha-", (-1, 0)), ("beta+", (0, 1)),
                                         ("beta-", (0, -1))])
def test_endpoints(variant, end):
    c = build(ModificationSpec(F(1, 4), F(3, 4), F(6, 5), 7, variant))
    s = F(6, 5) * F(1, 2)
    assert c(F(1, 4)) == GroupPoint(0, 0, 0, 0, 0)
    assert c.end == GroupPoint(end[0] * s, end[1] * s, 0, 0, 0)


def test_minus_is_reversed_and_negated():
    plus, minus = build(UNIT), build(UNIT.with_variant("alpha-"))
    assert [s.direction for s in minus.segments] == [-s.direction for s in reversed(plus.segments)]


def test_letter_table_edges():
    Q = 5
    assert letter_direction(Variant.ALPHA_PLUS, Q, 1)[:2] == (Direction.PLUS_X1, "straight")
    # the first up letter is the first letter of the x5 staircase
    assert letter_direction(Variant.ALPHA_PLUS, Q, 8 * Q + 1)[0] == Direction.PLUS_X2
    assert letter_direction(Variant.ALPHA_MINUS, Q, 1)[0] == Direction.MINUS_X1


def test_verify_structure_requires_multiple():
    with pytest.raises(ValueError):
        verify_structure(UNIT, 100)


@given(specs)
def test_structure_holds(spec):
    rep = verify_structure(spec, 8 * spec.pieces)
    assert rep.passed, rep.failures[:3]


@given(specs, st.fractions(0, 1, max_denominator=997))
def test_deviation_chain_exact(spec, u):
    rep = deviation_check(spec, spec.a + u * spec.L)
    assert rep.exact_ok, rep.claims
    assert rep.proof_bound <= 2 * spec.L / spec.Q


def test_deviation_outside_interval():
    with pytest.raises(ValueError):
        deviation_check(UNIT, F(3, 2))


def test_json_roundtrip():
    spec = ModificationSpec(F(1, 3), F(2, 3), F(7, 6), 11, "beta-")
    assert ModificationSpec.from_json(spec.to_json()) == spec
