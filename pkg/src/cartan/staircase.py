"""Eight-letter commutator words that climb straight up into the third layer.

With ``F(l, m) = exp(m X2) exp(l X1) exp(-m X2) exp(-l X1)`` one has

    F(l, m) = exp(l m X3 - l^2 m X4 / 2 - l m^2 X5 / 2),

and the X3 parts cancel in ``F(l, -l) F(-l, -l) = exp(l^3 X4)`` and
``F(-l, l) F(-l, -l) = exp(l^3 X5)``. Letters are laid out left to right, so
the curve's value after letter k is the product of the first k factors.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import IDENTITY, GroupPoint
from .curves import Direction, Segment, SegmentCurve

AXES = ("x4", "x5")


def _letter(axis: int, value, duration) -> Segment:
    return Segment(Direction.from_signed(axis, value), abs(value), duration)


def commutator_letters(lam, mu, duration=1) -> list[Segment]:
    """The four segments of ``F(lam, mu)``, each lasting ``duration``."""
    return [
        _letter(2, mu, duration),
        _letter(1, lam, duration),
        _letter(2, -mu, duration),
        _letter(1, -lam, duration),
    ]


def commutator_word(lam, mu, start: GroupPoint = IDENTITY, t0=0) -> SegmentCurve:
    """``F(lam, mu)`` as a 4-segment curve on ``[t0, t0 + 4]``."""
    return SegmentCurve(start, t0, tuple(commutator_letters(lam, mu)))


def staircase_letters(lam, axis: str = "x4", duration=1) -> list[Segment]:
    """Letters of the staircase reaching ``lam**3`` on the chosen vertical axis."""
    if axis == "x4":
        words = (lam, -lam), (-lam, -lam)
    elif axis == "x5":
        words = (-lam, lam), (-lam, -lam)
    else:
        raise ValueError(f"axis must be 'x4' or 'x5', got {axis!r}")
    out = []
    for l, m in words:
        out.extend(commutator_letters(l, m, duration))
    return out


def staircase(lam, axis: str = "x4", start: GroupPoint = IDENTITY, t0=0) -> SegmentCurve:
    """Staircase curve on ``[t0, t0 + 8]`` from ``start`` to ``start * (0,0,0,lam^3,0)``
    (or the x5 analogue); every letter has speed ``|lam|`` and unit duration."""
    return SegmentCurve(start, t0, tuple(staircase_letters(lam, axis)))


def staircase_target(lam, axis: str = "x4") -> GroupPoint:
    cube = lam ** 3
    return GroupPoint(0, 0, 0, cube, 0) if axis == "x4" else GroupPoint(0, 0, 0, 0, cube)


def commutator_target(lam, mu):
    """Closed form of ``F(lam, mu)`` in first-kind coordinates."""
    from .algebra import AlgebraElement

    return AlgebraElement(0, 0, lam * mu, -Fraction(1, 2) * lam * lam * mu,
                          -Fraction(1, 2) * lam * mu * mu)
