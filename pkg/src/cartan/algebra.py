"""Lie algebra and group arithmetic for the free Carnot group of step 3, rank 2.

The algebra has basis X1..X5 with the only non-zero brackets

    [X2, X1] = X3,   [X3, X1] = X4,   [X3, X2] = X5.

Group points are stored in exponential coordinates of the second kind, i.e.
``(x1, ..., x5)`` stands for ``exp(x5 X5) exp(x4 X4) exp(x3 X3) exp(x2 X2) exp(x1 X1)``.

Every function here is a polynomial in its inputs, so the same code serves two
backends: pass :class:`fractions.Fraction` coordinates for exact arithmetic or
floats (and numpy arrays, componentwise) for numerical work. Plain ints are
promoted to Fractions on entry, so integer inputs stay exact.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import NamedTuple, Sequence, Union

Scalar = Union[int, float, Fraction]


def exactify(value):
    """Promote ints to Fractions, leave floats and Fractions alone."""
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    return value


def to_fraction(value) -> Fraction:
    """Convert ints, floats, ``"p/q"`` strings or Fractions to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    # numpy scalars and the like
    return Fraction(float(value))


class AlgebraElement(NamedTuple):
    """Coefficients of ``c1 X1 + ... + c5 X5``."""

    c1: Scalar = 0
    c2: Scalar = 0
    c3: Scalar = 0
    c4: Scalar = 0
    c5: Scalar = 0

    def __add__(self, other):  # type: ignore[override]
        return AlgebraElement(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        return AlgebraElement(*(a - b for a, b in zip(self, other)))

    def __neg__(self):
        return AlgebraElement(*(-a for a in self))

    def __mul__(self, k):  # type: ignore[override]
        return AlgebraElement(*(k * a for a in self))

    __rmul__ = __mul__

    def __truediv__(self, k):
        return AlgebraElement(*(a / k for a in self))

    def exact(self) -> "AlgebraElement":
        return AlgebraElement(*(to_fraction(a) for a in self))


class GroupPoint(NamedTuple):
    """A point of the group in second-kind exponential coordinates."""

    x1: Scalar = 0
    x2: Scalar = 0
    x3: Scalar = 0
    x4: Scalar = 0
    x5: Scalar = 0

    def exact(self) -> "GroupPoint":
        return GroupPoint(*(to_fraction(a) for a in self))

    def as_float(self) -> "GroupPoint":
        return GroupPoint(*(float(a) for a in self))


_0, _1 = Fraction(0), Fraction(1)
ZERO = AlgebraElement(_0, _0, _0, _0, _0)
IDENTITY = GroupPoint(_0, _0, _0, _0, _0)

X1 = AlgebraElement(_1, _0, _0, _0, _0)
X2 = AlgebraElement(_0, _1, _0, _0, _0)
X3 = AlgebraElement(_0, _0, _1, _0, _0)
X4 = AlgebraElement(_0, _0, _0, _1, _0)
X5 = AlgebraElement(_0, _0, _0, _0, _1)
BASIS = (X1, X2, X3, X4, X5)


def bracket(a: Sequence, b: Sequence) -> AlgebraElement:
    """Lie bracket ``[a, b]`` from the structure constants.

    Anything of total weight above 3 vanishes, so only the pairs
    (X2, X1), (X3, X1) and (X3, X2) contribute.
    """
    zero = a[0] * 0  # keeps the backend of the inputs
    return AlgebraElement(
        zero,
        zero,
        a[1] * b[0] - a[0] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[2] * b[1] - a[1] * b[2],
    )


def bch3(a: Sequence, b: Sequence) -> AlgebraElement:
    """Truncated Baker-Campbell-Hausdorff product, exact in step 3.

    ``exp(a) * exp(b) = exp(a + b + [a,b]/2 + ([a,[a,b]] + [b,[b,a]])/12)``.
    """
    a = AlgebraElement(*map(exactify, a))
    b = AlgebraElement(*map(exactify, b))
    ab = bracket(a, b)
    ba = -ab
    third = bracket(a, ab) + bracket(b, ba)
    return a + b + ab / 2 + third / 12


def group_to_exp(p: Sequence) -> AlgebraElement:
    """First-kind coordinates of a point: fold the five-factor word with :func:`bch3`."""
    x1, x2, x3, x4, x5 = map(exactify, p)
    z = x1 * 0
    acc = AlgebraElement(z, z, z, z, x5)
    acc = bch3(acc, AlgebraElement(z, z, z, x4, z))
    acc = bch3(acc, AlgebraElement(z, z, x3, z, z))
    acc = bch3(acc, AlgebraElement(z, x2, z, z, z))
    acc = bch3(acc, AlgebraElement(x1, z, z, z, z))
    return acc


def exp_to_group(a: Sequence) -> GroupPoint:
    """Second-kind coordinates of ``exp(a)``.

    Inverts :func:`group_to_exp`, whose closed form is triangular:
    ``a3 = x3 + x1 x2/2``, ``a4 = x4 + x1 x3/2 + x1^2 x2/12``,
    ``a5 = x5 + x2 x3/2 - x1 x2^2/12``.
    """
    a1, a2, a3, a4, a5 = map(exactify, a)
    x3 = a3 - a1 * a2 / 2
    x4 = a4 - a1 * x3 / 2 - a1 * a1 * a2 / 12
    x5 = a5 - a2 * x3 / 2 + a1 * a2 * a2 / 12
    return GroupPoint(a1, a2, x3, x4, x5)


def mul(p: Sequence, q: Sequence) -> GroupPoint:
    """Group product ``p * q``.

    Frozen from ``exp_to_group(bch3(group_to_exp(p), group_to_exp(q)))``;
    the test-suite checks the two agree exactly.
    """
    x1, x2, x3, x4, x5 = map(exactify, p)
    y1, y2, y3, y4, y5 = map(exactify, q)
    return GroupPoint(
        x1 + y1,
        x2 + y2,
        x3 + y3 - x1 * y2,
        x4 + y4 - x1 * y3 + x1 * x1 * y2 / 2,
        x5 + y5 - x2 * y3 + x1 * x2 * y2 + x1 * y2 * y2 / 2,
    )


def mul_via_bch(p: Sequence, q: Sequence) -> GroupPoint:
    """Reference product through first-kind coordinates (slow, used as an oracle)."""
    return exp_to_group(bch3(group_to_exp(p), group_to_exp(q)))


def inv(p: Sequence) -> GroupPoint:
    x1, x2, x3, x4, x5 = map(exactify, p)
    return GroupPoint(
        -x1,
        -x2,
        -x3 - x1 * x2,
        -x4 - x1 * x3 - x1 * x1 * x2 / 2,
        -x5 - x2 * x3 - x1 * x2 * x2 / 2,
    )


def exp_horizontal(a1, a2) -> GroupPoint:
    """``exp(a1 X1 + a2 X2)`` in second-kind coordinates."""
    a1, a2 = exactify(a1), exactify(a2)
    return GroupPoint(a1, a2, -a1 * a2 / 2, a1 * a1 * a2 / 6, a1 * a2 * a2 / 3)


def frame(p: Sequence) -> tuple[tuple, tuple, tuple, tuple, tuple]:
    """The left-invariant fields X1(p), ..., X5(p) as coordinate 5-vectors."""
    x1, x2 = p[0], p[1]
    return (
        (1, 0, 0, 0, 0),
        (0, 1, -x1, x1 * x1 / 2, x1 * x2),
        (0, 0, 1, -x1, -x2),
        (0, 0, 0, 1, 0),
        (0, 0, 0, 0, 1),
    )


def parse_point(text: str) -> GroupPoint:
    """Parse ``"x1,x2,x3,x4,x5"`` (rational strings allowed) into an exact point."""
    parts = [s for s in text.replace("(", "").replace(")", "").split(",") if s.strip()]
    if len(parts) != 5:
        raise ValueError(f"expected 5 coordinates, got {len(parts)}: {text!r}")
    return GroupPoint(*(to_fraction(s) for s in parts))


def format_rational(x) -> str:
    x = to_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
