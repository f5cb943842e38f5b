"""Overpass modification curves alpha+-, beta+-.

A horizontal segment of speed ``lam`` on ``[a, b]`` is replaced by a curve with
the same endpoints and speed ``lam' = (1 + 2/(3Q)) lam``. The interval is cut
into ``3Q + 2`` equal pieces ``I_1 .. I_{3Q+2}``:

    I_1..I_Q           straight along the segment's direction
    I_{Q+1}            staircase up (8 letters) by mu^3 in x5 (alpha) or -mu^3 in x4 (beta)
    I_{Q+2}..I_{2Q+1}  straight
    I_{2Q+2}           the same staircase retraced
    I_{2Q+3}..I_{3Q+2} straight

with ``mu = lam L / (24 Q)`` and ``L = b - a``. The minus variants are the plus
curves run backwards and translated back to the origin.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import IDENTITY, GroupPoint, inv, mul, to_fraction
from .curves import Direction, Segment, SegmentCurve
from .staircase import staircase_letters


class Variant(enum.Enum):
    ALPHA_PLUS = "alpha+"
    ALPHA_MINUS = "alpha-"
    BETA_PLUS = "beta+"
    BETA_MINUS = "beta-"

    @property
    def axis(self) -> int:
        return 1 if self in (Variant.ALPHA_PLUS, Variant.ALPHA_MINUS) else 2

    @property
    def sign(self) -> int:
        return 1 if self in (Variant.ALPHA_PLUS, Variant.BETA_PLUS) else -1

    @property
    def direction(self) -> Direction:
        return Direction.from_signed(self.axis, self.sign)

    @classmethod
    def for_direction(cls, d: Direction) -> "Variant":
        return {
            Direction.PLUS_X1: cls.ALPHA_PLUS,
            Direction.MINUS_X1: cls.ALPHA_MINUS,
            Direction.PLUS_X2: cls.BETA_PLUS,
            Direction.MINUS_X2: cls.BETA_MINUS,
        }[d]


@dataclass(frozen=True)
class ModificationSpec:
    a: Fraction
    b: Fraction
    lam: Fraction
    Q: int
    variant: Variant = Variant.ALPHA_PLUS

    def __post_init__(self):
        for name in ("a", "b", "lam"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if not isinstance(self.variant, Variant):
            object.__setattr__(self, "variant", Variant(self.variant))
        if int(self.Q) != self.Q:
            raise ValueError(f"Q must be an integer, got {self.Q}")
        object.__setattr__(self, "Q", int(self.Q))
        L = self.b - self.a
        if not 0 < L <= 1:
            raise ValueError(f"need 0 < b - a <= 1, got {L}")
        if not 1 <= self.lam < Fraction(3, 2):
            raise ValueError(f"need 1 <= lambda < 3/2, got {self.lam}")
        if self.Q < 5:
            raise ValueError(f"need Q >= 5, got {self.Q}")

    @property
    def L(self) -> Fraction:
        return self.b - self.a

    @property
    def lam_prime(self) -> Fraction:
        return (1 + Fraction(2, 3 * self.Q)) * self.lam

    @property
    def mu(self) -> Fraction:
        return self.lam * self.L / (24 * self.Q)

    @property
    def pieces(self) -> int:
        return 3 * self.Q + 2

    @property
    def delta(self) -> Fraction:
        return self.L / self.pieces

    def interval(self, i: int) -> tuple[Fraction, Fraction]:
        """Endpoints of the ``i``-th of the ``3Q + 2`` equal intervals (1-based)."""
        if not 1 <= i <= self.pieces:
            raise IndexError(i)
        return self.a + (i - 1) * self.delta, self.a + i * self.delta

    def with_variant(self, variant) -> "ModificationSpec":
        return ModificationSpec(self.a, self.b, self.lam, self.Q, Variant(variant))

    def to_json(self) -> dict:
        from .algebra import format_rational

        return {"a": format_rational(self.a), "b": format_rational(self.b),
                "lambda": format_rational(self.lam), "Q": self.Q, "variant": self.variant.value}

    @classmethod
    def from_json(cls, data: dict) -> "ModificationSpec":
        return cls(to_fraction(data["a"]), to_fraction(data["b"]), to_fraction(data["lambda"]),
                   int(data["Q"]), Variant(data.get("variant", "alpha+")))


def _up_letters(variant: Variant) -> list[Direction]:
    """Letter directions of the up-staircase of the plus curve on the same axis."""
    if variant.axis == 1:
        return [s.direction for s in staircase_letters(Fraction(1), "x5")]
    return [s.direction for s in staircase_letters(Fraction(-1), "x4")]


_UP = {v: tuple(_up_letters(v)) for v in Variant}


def letter_direction(variant: Variant, Q: int, ell: int) -> tuple[Direction, str, int]:
    """Direction of letter ``ell`` (1-based) in the ``8(3Q+2)`` letter grid.

    Returns ``(direction, phase, i)`` where ``phase`` is one of ``"straight"``,
    ``"stair-up"``, ``"stair-down"`` (named for the plus curve) and ``i`` the
    1-based index of the interval holding the letter.
    """
    variant = Variant(variant)
    total = 8 * (3 * Q + 2)
    if not 1 <= ell <= total:
        raise IndexError(ell)
    flip = variant.sign < 0
    k = total + 1 - ell if flip else ell
    i = (k - 1) // 8 + 1
    r = (k - 1) % 8
    up = _UP[variant]
    if i == Q + 1:
        d, phase = up[r], "stair-up"
    elif i == 2 * Q + 2:
        d, phase = -up[7 - r], "stair-down"
    else:
        d, phase = Direction.from_signed(variant.axis, 1), "straight"
    if flip:
        d = -d
        i = 3 * Q + 3 - i
    return d, phase, i


@functools.lru_cache(maxsize=4096)
def build(spec: ModificationSpec) -> SegmentCurve:
    """The modification curve for ``spec`` as 19 maximal segments from the origin."""
    lp, d = spec.lam_prime, spec.delta
    forward = Direction.from_signed(spec.variant.axis, 1)
    if spec.variant.axis == 1:
        stair = staircase_letters(spec.mu, "x5")
    else:
        stair = staircase_letters(-spec.mu, "x4")
    # rescale each unit-time letter of speed mu to duration delta/8; 8 mu / delta == lam'
    up = [Segment(s.direction, lp, d / 8) for s in stair]
    down = [s.reversed() for s in reversed(up)]
    straight = Segment(forward, lp, spec.Q * d)
    segs = [straight, *up, straight, *down, straight]
    if spec.variant.sign < 0:
        segs = [s.reversed() for s in reversed(segs)]
    return SegmentCurve(IDENTITY, spec.a, tuple(segs))


def reference_segment(spec: ModificationSpec, t) -> GroupPoint:
    """The unmodified segment ``exp(+-lam (t - a) V)`` at time ``t``."""
    s = spec.variant.sign * spec.lam * (to_fraction(t) - spec.a)
    return GroupPoint(s, 0, 0, 0, 0) if spec.variant.axis == 1 else GroupPoint(0, s, 0, 0, 0)


# --- structure -----------------------------------------------------------------

@dataclass
class StructureReport:
    N: int
    cells_checked: int = 0
    start_ok: bool = False
    end_ok: bool = False
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.start_ok and self.end_ok and not self.failures


def verify_structure(spec: ModificationSpec, N: int) -> StructureReport:
    """Check exactly that every cell of an N-partition carries one ``lam'``-segment.

    ``N`` must be a positive multiple of ``8(3Q+2)``. Cells inside straight
    intervals must move along ``+-V`` of the variant.
    """
    unit = 8 * spec.pieces
    if N <= 0 or N % unit:
        raise ValueError(f"N={N} is not a positive multiple of 8(3Q+2)={unit}")
    curve = build(spec)
    report = StructureReport(N)
    report.start_ok = curve(spec.a) == IDENTITY
    sL = spec.variant.sign * spec.lam * spec.L
    end = GroupPoint(sL, 0, 0, 0, 0) if spec.variant.axis == 1 else GroupPoint(0, sL, 0, 0, 0)
    report.end_ok = curve(spec.b) == end
    width = spec.L / N
    per_interval = N // spec.pieces
    straight_dir = spec.variant.direction
    for j in range(1, N + 1):
        c0, c1 = spec.a + (j - 1) * width, spec.a + j * width
        k = curve.segment_index(c0 + width / 2)
        seg = curve.segments[k]
        problems = []
        if not (curve.times[k] <= c0 and c1 <= curve.times[k + 1]):
            problems.append("cell straddles a junction")
        if seg.speed != spec.lam_prime:
            problems.append(f"speed {seg.speed} != lam'")
        p0 = curve(c0)
        if curve(c1) != mul(p0, _step(seg.direction, spec.lam_prime * width)):
            problems.append("endpoint is not a lam'-segment image")
        i = (j - 1) // per_interval + 1
        if i not in (spec.Q + 1, 2 * spec.Q + 2) and seg.direction != straight_dir:
            problems.append(f"straight interval {i} moves along {seg.direction}")
        report.cells_checked += 1
        if problems:
            report.failures.append((j, problems))
    return report


def _step(direction: Direction, s) -> GroupPoint:
    s = direction.sign * s
    return GroupPoint(s, 0, 0, 0, 0) if direction.axis == 1 else GroupPoint(0, s, 0, 0, 0)


# --- deviation from the unmodified segment --------------------------------------------

@dataclass
class DeviationReport:
    t: Fraction
    phase: int
    bound: Fraction
    proof_bound: Fraction
    claims: list = field(default_factory=list)
    length_ok: bool = False
    cc_upper: float | None = None
    witness_ok: bool | None = None

    @property
    def exact_ok(self) -> bool:
        return all(ok for _, ok in self.claims) and self.proof_bound <= self.bound and self.length_ok

    @property
    def passed(self) -> bool:
        return self.exact_ok and self.witness_ok is not False


def _phase_of(spec: ModificationSpec, tau: Fraction) -> int:
    """Phase 1..5 of relative time ``tau`` on the plus curve (closed, first match)."""
    Q, d = spec.Q, spec.delta
    if tau <= Q * d:
        return 1
    if tau <= (Q + 1) * d:
        return 2
    if tau <= (2 * Q + 1) * d:
        return 3
    if tau <= (2 * Q + 2) * d:
        return 4
    return 5


def deviation_check(spec: ModificationSpec, t, budget=None, slack: float | None = None) -> DeviationReport:
    """Certify ``d_c(exp(+-lam (t-a) V), rho(t)) <= 2 L / Q`` two ways.

    The exact part replays the triangle-inequality chain phase by phase with
    rational arithmetic and confirms the structural facts it relies on against
    the built curve. If ``budget`` is given, a numerical witness from
    :func:`cartan.ccmetric.cc_upper` must also come in under the bound times
    ``slack``.
    """
    from .config import DEFAULTS

    t = to_fraction(t)
    if not spec.a <= t <= spec.b:
        raise ValueError(f"t={t} outside [{spec.a}, {spec.b}]")
    L, Q, lam, lp, d = spec.L, spec.Q, spec.lam, spec.lam_prime, spec.delta
    bound = 2 * L / Q
    # minus variants mirror onto the plus curve at a + b - t
    tau = t - spec.a if spec.variant.sign > 0 else spec.b - t
    plus = build(spec.with_variant(Variant.ALPHA_PLUS if spec.variant.axis == 1 else Variant.BETA_PLUS))
    axis = spec.variant.axis
    rho = lambda s: plus(spec.a + s)  # noqa: E731
    ref = lambda s: _step(Direction.from_signed(axis, 1), lam * s)  # noqa: E731
    gap = lambda s: mul(inv(ref(s)), rho(s))  # noqa: E731

    def straight_dev(s):
        return (lp - lam) * s if s <= Q * d else abs(lp * s - 2 * lam * L / (3 * Q) - lam * s)

    def only_axis(g, value):
        want = _step(Direction.from_signed(axis, 1), value)
        return g == want

    phase = _phase_of(spec, tau)
    claims = []
    if phase == 1:
        dev = (lp - lam) * tau
        claims.append(("curve is exp(lam' tau V)", only_axis(gap(tau), dev)))
        claims.append(("|tau lam' - tau lam| = 2 lam tau / 3Q", dev == 2 * lam * tau / (3 * Q)))
        claims.append(("deviation < L/Q", dev < L / Q))
        proof = dev
    elif phase == 5:
        x = lp * tau - 2 * lam * L / (3 * Q)
        dev = abs(x - lam * tau)
        claims.append(("curve is exp((lam' tau - 2 lam L / 3Q) V)", only_axis(gap(tau), x - lam * tau)))
        claims.append(("deviation = 2 lam (L - tau) / 3Q", dev == 2 * lam * (L - tau) / (3 * Q)))
        claims.append(("deviation < L/Q", dev < L / Q))
        proof = dev
    elif phase == 3:
        mid_start = (Q + 1) * d
        t_prime = lam * L / 3 + lp * (tau - mid_start)
        mu3 = spec.mu ** 3
        vertical = GroupPoint(0, 0, 0, 0, mu3) if axis == 1 else GroupPoint(0, 0, 0, -mu3, 0)
        claims.append(("curve = (t' V) * vertical offset",
                       rho(tau) == mul(_step(Direction.from_signed(axis, 1), t_prime), vertical)))
        claims.append(("8 mu = lam L / 3Q", 8 * spec.mu == lam * L / (3 * Q)))
        claims.append(("lam' (Q+1) delta = (Q+1) lam L / 3Q", lp * mid_start == (Q + 1) * lam * L / (3 * Q)))
        claims.append(("|t' - lam tau| <= tau (lam' - lam) + lam L / 3Q",
                       abs(t_prime - lam * tau) <= tau * (lp - lam) + lam * L / (3 * Q)))
        claims.append(("tau (lam' - lam) <= L/Q", tau * (lp - lam) <= L / Q))
        proof = 8 * spec.mu + abs(t_prime - lam * tau)
    else:
        if phase == 2:
            anchor = Q * d
            arc = lp * (tau - anchor)
            drift = lam * (tau - anchor)
        else:
            anchor = (2 * Q + 2) * d
            arc = lp * (anchor - tau)
            drift = lam * (anchor - tau)
        at_anchor = straight_dev(anchor)
        claims.append(("staircase arc <= lam L / 3Q < L / 2Q", arc <= lam * L / (3 * Q) < L / (2 * Q)))
        claims.append(("reference drift <= lam L / (3Q+2) < L / 2Q", drift <= lam * d < L / (2 * Q)))
        claims.append(("deviation at the staircase foot < L/Q", at_anchor < L / Q))
        foot = at_anchor if phase == 2 else -at_anchor
        claims.append(("foot deviation matches the curve", only_axis(gap(anchor), foot)))
        proof = arc + drift + at_anchor

    report = DeviationReport(t, phase, bound, proof, claims)
    report.length_ok = build(spec).length() == lp * L and lp * L < Fraction(17, 10)
    if budget is not None:
        from .ccmetric import cc_upper

        slack = DEFAULTS.cc_slack if slack is None else slack
        result = cc_upper(reference_segment(spec, t), build(spec)(t), budget)
        report.cc_upper = result.value
        report.witness_ok = result.ok and result.value <= float(bound) * slack
    return report
