"""Horizontal curves: axis segments, polygonal curves, lifted control curves.

A horizontal curve has velocity in span{X1, X2}. Three representations live here:

* :class:`SegmentCurve` -- concatenations of horizontal ``lambda V``-segments with
  ``V`` in {+X1, -X1, +X2, -X2}. Evaluation is exact for rational data.
* :class:`PolygonalCurve` -- pieces of constant but arbitrary horizontal velocity.
  Used for distance witnesses.
* :class:`ControlCurve` -- sampled controls with RK4-lifted states.
"""

from __future__ import annotations

import bisect
import csv
import enum
import io
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import (
    IDENTITY,
    GroupPoint,
    exactify,
    exp_horizontal,
    format_rational,
    mul,
    to_fraction,
)
from .config import DEFAULTS


class Direction(enum.Enum):
    PLUS_X1 = "+x1"
    MINUS_X1 = "-x1"
    PLUS_X2 = "+x2"
    MINUS_X2 = "-x2"

    @property
    def axis(self) -> int:
        return 1 if self in (Direction.PLUS_X1, Direction.MINUS_X1) else 2

    @property
    def sign(self) -> int:
        return 1 if self in (Direction.PLUS_X1, Direction.PLUS_X2) else -1

    def __neg__(self) -> "Direction":
        return _NEGATED[self]

    @classmethod
    def from_signed(cls, axis: int, value) -> "Direction":
        """Direction along ``axis`` pointing with the sign of ``value`` (zero counts as +)."""
        if axis == 1:
            return cls.MINUS_X1 if value < 0 else cls.PLUS_X1
        return cls.MINUS_X2 if value < 0 else cls.PLUS_X2

    def unit(self) -> tuple[int, int]:
        return (self.sign, 0) if self.axis == 1 else (0, self.sign)

    def __str__(self) -> str:
        return self.value


_NEGATED = {
    Direction.PLUS_X1: Direction.MINUS_X1,
    Direction.MINUS_X1: Direction.PLUS_X1,
    Direction.PLUS_X2: Direction.MINUS_X2,
    Direction.MINUS_X2: Direction.PLUS_X2,
}


def flow(p: Sequence, direction: Direction, speed, dt) -> GroupPoint:
    """``p * exp(speed * dt * V)``; exact when the inputs are Fractions."""
    if speed < 0 or dt < 0:
        raise ValueError("speed and dt must be non-negative")
    s = direction.sign * exactify(speed) * exactify(dt)
    if direction.axis == 1:
        return mul(p, (s, 0, 0, 0, 0))
    return mul(p, (0, s, 0, 0, 0))


@dataclass(frozen=True)
class Segment:
    direction: Direction
    speed: Fraction | float
    duration: Fraction | float

    def __post_init__(self):
        object.__setattr__(self, "speed", exactify(self.speed))
        object.__setattr__(self, "duration", exactify(self.duration))
        if self.speed < 0:
            raise ValueError(f"negative speed {self.speed}")
        if self.duration <= 0:
            raise ValueError(f"non-positive duration {self.duration}")

    @property
    def length(self):
        return self.speed * self.duration

    def reversed(self) -> "Segment":
        return Segment(-self.direction, self.speed, self.duration)


@dataclass(frozen=True)
class SegmentCurve:
    """Concatenation of horizontal segments starting at ``start`` at time ``t0``."""

    start: GroupPoint = IDENTITY
    t0: Fraction | float = 0
    segments: tuple[Segment, ...] = ()
    # derived, filled in __post_init__
    times: tuple = field(init=False, repr=False, compare=False)
    knots: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "start", GroupPoint(*(exactify(c) for c in self.start)))
        object.__setattr__(self, "t0", exactify(self.t0))
        times = [self.t0]
        knots = [self.start]
        for seg in self.segments:
            times.append(times[-1] + seg.duration)
            knots.append(flow(knots[-1], seg.direction, seg.speed, seg.duration))
        object.__setattr__(self, "times", tuple(times))
        object.__setattr__(self, "knots", tuple(knots))

    @property
    def t1(self):
        return self.times[-1]

    @property
    def end(self) -> GroupPoint:
        return self.knots[-1]

    @property
    def duration(self):
        return self.t1 - self.t0

    def length(self):
        return sum((s.length for s in self.segments), Fraction(0) if self.is_exact() else 0.0)

    def is_exact(self) -> bool:
        vals = [self.t0, *self.start] + [v for s in self.segments for v in (s.speed, s.duration)]
        return all(isinstance(v, (int, Fraction)) for v in vals)

    def segment_index(self, t) -> int:
        """Index of the segment used to evaluate at ``t``.

        A shared boundary belongs to the earlier segment.
        """
        if t < self.t0 or t > self.t1:
            raise ValueError(f"t={t} outside [{self.t0}, {self.t1}]")
        if not self.segments:
            return -1
        k = bisect.bisect_left(self.times, t, lo=1) - 1
        return min(k, len(self.segments) - 1)

    def __call__(self, t) -> GroupPoint:
        k = self.segment_index(t)
        if k < 0:
            return self.start
        seg = self.segments[k]
        return flow(self.knots[k], seg.direction, seg.speed, t - self.times[k])

    eval = __call__

    def sample(self, ts) -> np.ndarray:
        """Float evaluation at many times; returns an array of shape (len(ts), 5)."""
        ts = np.asarray(ts, dtype=float)
        if ts.size and (ts.min() < float(self.t0) - 1e-12 or ts.max() > float(self.t1) + 1e-12):
            raise ValueError("sample times outside the curve's domain")
        if not self.segments:
            return np.tile(np.array([float(c) for c in self.start]), (ts.size, 1))
        times = np.array([float(t) for t in self.times])
        knots = np.array([[float(c) for c in k] for k in self.knots])
        idx = np.clip(np.searchsorted(times, ts, side="left") - 1, 0, len(self.segments) - 1)
        signed_speed = np.array([s.direction.sign * float(s.speed) for s in self.segments])
        axis = np.array([s.direction.axis for s in self.segments])
        step = signed_speed[idx] * (ts - times[idx])
        e1 = np.where(axis[idx] == 1, step, 0.0)
        e2 = np.where(axis[idx] == 2, step, 0.0)
        p = knots[idx]
        zero = np.zeros_like(ts)
        out = mul(tuple(p.T), (e1, e2, zero, zero, zero))
        return np.column_stack(out)

    def then(self, other: "SegmentCurve | Iterable[Segment]") -> "SegmentCurve":
        segs = other.segments if isinstance(other, SegmentCurve) else tuple(other)
        return SegmentCurve(self.start, self.t0, self.segments + tuple(segs))

    def reversed_segments(self) -> tuple[Segment, ...]:
        """Segments that retrace this curve backwards."""
        return tuple(s.reversed() for s in reversed(self.segments))

    def letters(self) -> list[Direction]:
        return [s.direction for s in self.segments]


def length(curve) -> Fraction | float:
    """Horizontal length (sum of speed times duration for segment curves)."""
    return curve.length()


@dataclass(frozen=True)
class PolygonalCurve:
    """Pieces ``(u1, u2, duration)`` of constant horizontal velocity ``u1 X1 + u2 X2``."""

    start: GroupPoint = IDENTITY
    pieces: tuple[tuple, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "start", GroupPoint(*self.start))
        object.__setattr__(self, "pieces", tuple(tuple(p) for p in self.pieces))

    def knots(self) -> list[GroupPoint]:
        pts = [self.start]
        for u1, u2, dt in self.pieces:
            pts.append(mul(pts[-1], exp_horizontal(u1 * dt, u2 * dt)))
        return pts

    @property
    def end(self) -> GroupPoint:
        return self.knots()[-1]

    def exact_end(self) -> GroupPoint:
        p = self.start.exact()
        for u1, u2, dt in self.pieces:
            a1 = to_fraction(u1) * to_fraction(dt)
            a2 = to_fraction(u2) * to_fraction(dt)
            p = mul(p, exp_horizontal(a1, a2))
        return p

    def length(self) -> float:
        return math.fsum(math.hypot(float(u1), float(u2)) * float(dt) for u1, u2, dt in self.pieces)

    def translated(self, left: Sequence) -> "PolygonalCurve":
        return PolygonalCurve(mul(left, self.start), self.pieces)

    @classmethod
    def from_segments(cls, curve: SegmentCurve) -> "PolygonalCurve":
        pieces = []
        for s in curve.segments:
            u1, u2 = s.direction.unit()
            pieces.append((u1 * s.speed, u2 * s.speed, s.duration))
        return cls(curve.start, tuple(pieces))


@dataclass
class ControlCurve:
    """Controls sampled on ``grid`` together with the lifted states.

    ``residual_bound`` records the horizontality bound the constructor checked.
    """

    grid: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    states: np.ndarray
    residual_bound: float = DEFAULTS.horizontality

    def __call__(self, t) -> np.ndarray:
        return np.array([np.interp(t, self.grid, self.states[:, i]) for i in range(5)])


def _check_grid(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("grid must be a 1-d array with at least 2 points")
    if np.any(np.diff(t) <= 0):
        raise ValueError("grid must be strictly increasing")
    return t


def _lift_rhs(y, u1, u2):
    x1, x2 = y[..., 0], y[..., 1]
    return np.stack([u1 + 0 * x1, u2 + 0 * x1, -u2 * x1, 0.5 * u2 * x1 * x1, u2 * x1 * x2], axis=-1)


def lift_controls(grid, controls: Callable, start=IDENTITY) -> np.ndarray:
    """Integrate ``y' = u1 X1(y) + u2 X2(y)`` with fixed-step RK4 on ``grid``.

    ``controls(t)`` returns ``(u1, u2)``; both may be arrays sharing a batch
    shape, in which case a batch of curves is integrated at once. The result
    has shape ``(len(grid), *batch, 5)``.
    """
    grid = _check_grid(grid)
    u1, u2 = controls(grid[0])
    batch = np.broadcast(np.asarray(u1), np.asarray(u2)).shape
    y = np.broadcast_to(np.asarray([float(c) for c in start]), batch + (5,)).copy()
    out = np.empty((grid.size,) + batch + (5,))
    out[0] = y
    for k in range(grid.size - 1):
        t, h = grid[k], grid[k + 1] - grid[k]
        ua = controls(t)
        um = controls(t + h / 2)
        ub = controls(t + h)
        k1 = _lift_rhs(y, *ua)
        k2 = _lift_rhs(y + h / 2 * k1, *um)
        k3 = _lift_rhs(y + h / 2 * k2, *um)
        k4 = _lift_rhs(y + h * k3, *ub)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = y
    return out


def _as_function(values, grid, derivative=None):
    if callable(values):
        return values
    from scipy.interpolate import CubicHermiteSpline, CubicSpline

    values = np.asarray(values, dtype=float)
    if derivative is not None and not callable(derivative):
        return CubicHermiteSpline(grid, values, np.asarray(derivative, dtype=float))
    return CubicSpline(grid, values)


def _derivative(f, given, grid):
    if callable(given):
        return given
    if hasattr(f, "derivative"):
        return f.derivative()
    h = 1e-6 * max(1.0, float(grid[-1] - grid[0]))
    return lambda t: (f(t + h) - f(t - h)) / (2 * h)


def lift(grid, gamma1, gamma2, dgamma1=None, dgamma2=None, start=None) -> ControlCurve:
    """Horizontal lift of a planar curve ``(gamma1, gamma2)``.

    ``gamma1``/``gamma2`` may be callables or samples on ``grid``; derivatives
    are optional (splines or central differences fill them in). The three
    lifting equations

        x3' = -x2' x1,   x4' = x2' x1^2 / 2,   x5' = x2' x1 x2

    are integrated with fixed-step RK4; ``states[0]`` takes its vertical
    coordinates from ``start``.
    """
    grid = _check_grid(grid)
    g1 = _as_function(gamma1, grid, dgamma1)
    g2 = _as_function(gamma2, grid, dgamma2)
    d1 = _derivative(g1, dgamma1, grid)
    d2 = _derivative(g2, dgamma2, grid)
    if start is None:
        start = (g1(grid[0]), g2(grid[0]), 0, 0, 0)
    if abs(float(start[0]) - float(g1(grid[0]))) > 1e-12 or abs(float(start[1]) - float(g2(grid[0]))) > 1e-12:
        raise ValueError("start point does not lie over the planar curve's initial point")

    def rhs(t):
        a, b, db = g1(t), g2(t), d2(t)
        ones = np.ones_like(t)
        return np.stack([-db * a * ones, 0.5 * db * a * a * ones, db * a * b * ones], axis=-1)

    # the right-hand side is a function of t alone, so each RK4 step collapses
    # to Simpson's rule and all steps can be taken at once
    h = np.diff(grid)[:, None]
    steps = h / 6 * (rhs(grid[:-1]) + 4 * rhs(grid[:-1] + h[:, 0] / 2) + rhs(grid[1:]))
    z = np.array([float(c) for c in start[2:]])
    vert = np.vstack([z, z + np.cumsum(steps, axis=0)])
    x1 = np.asarray(g1(grid), dtype=float) * np.ones_like(grid)
    x2 = np.asarray(g2(grid), dtype=float) * np.ones_like(grid)
    states = np.column_stack([x1, x2, vert])
    u1 = np.asarray(d1(grid), dtype=float) * np.ones_like(grid)
    u2 = np.asarray(d2(grid), dtype=float) * np.ones_like(grid)
    return ControlCurve(grid, u1, u2, states)


def control_curve(grid, controls: Callable, start=IDENTITY) -> ControlCurve:
    """Lift a single pair of controls and package it as a :class:`ControlCurve`."""
    grid = _check_grid(grid)
    states = lift_controls(grid, controls, start)
    u1, u2 = controls(grid)
    return ControlCurve(grid, np.broadcast_to(u1, grid.shape).astype(float),
                        np.broadcast_to(u2, grid.shape).astype(float), states)


def horizontality_residual(t, states) -> float:
    """Max over interior grid points of the lifting-equation defect.

    Uses central differences, so exact horizontal data give zero away from
    velocity jumps, O(h^2) for smooth curves and O(h) when a stencil straddles
    a corner.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(states, dtype=float)
    if x.shape[0] < 3:
        raise ValueError("need at least 3 samples")
    dt = (t[2:] - t[:-2])[:, None]
    d = (x[2:] - x[:-2]) / dt
    c = x[1:-1]
    r = (
        np.abs(d[:, 2] + d[:, 1] * c[:, 0])
        + np.abs(d[:, 3] - 0.5 * d[:, 1] * c[:, 0] ** 2)
        + np.abs(d[:, 4] - d[:, 1] * c[:, 0] * c[:, 1])
    )
    return float(r.max())


@dataclass(frozen=True)
class HeightChangeReport:
    """Which monotonicity hypotheses apply on [s, t] and whether the conclusions hold.

    Index k of each tuple refers to case k+1: (1) x1 non-decreasing bounds the
    x5 increase from above, (2) x1 non-increasing from below, (3) x2
    non-decreasing forces x4 up, (4) x2 non-increasing forces x4 down.
    """

    applies: tuple[bool, bool, bool, bool]
    holds: tuple[bool, bool, bool, bool]
    margins: tuple[float, float, float, float]

    @property
    def falsified(self) -> bool:
        return any(a and not h for a, h in zip(self.applies, self.holds))


def _conclusions(ps, pt):
    cubic = pt[0] * pt[1] ** 2 / 2 - ps[0] * ps[1] ** 2 / 2
    d5 = pt[4] - ps[4]
    d4 = pt[3] - ps[3]
    # each margin is >= 0 exactly when the corresponding conclusion holds
    return (cubic - d5, d5 - cubic, d4, -d4)


def height_change_check(curve, s, t, tol: float = DEFAULTS.height_check,
                        deadband: float = DEFAULTS.sign_deadband) -> HeightChangeReport:
    """Check the four height-change inequalities on ``[s, t]``.

    For a :class:`SegmentCurve` the monotonicity hypotheses are read off the
    segment directions and the conclusions are checked exactly (``tol`` is
    ignored for exact data). For a :class:`ControlCurve` they are read from the
    sampled control signs with a dead-band.
    """
    if not s < t:
        raise ValueError("need s < t")
    if isinstance(curve, SegmentCurve):
        ps, pt = curve(s), curve(t)
        active = [seg for seg, a, b in zip(curve.segments, curve.times, curve.times[1:])
                  if b > s and a < t and seg.speed > 0]
        moves = {seg.direction for seg in active}
        applies = (
            Direction.MINUS_X1 not in moves,
            Direction.PLUS_X1 not in moves,
            Direction.MINUS_X2 not in moves,
            Direction.PLUS_X2 not in moves,
        )
        margins = _conclusions(ps, pt)
        eps = 0 if curve.is_exact() else tol
        holds = tuple(m >= -eps for m in margins)
        return HeightChangeReport(applies, holds, tuple(float(m) for m in margins))

    grid = curve.grid
    inside = (grid >= s) & (grid <= t)
    u1, u2 = curve.u1[inside], curve.u2[inside]
    applies = (
        bool(np.all(u1 >= -deadband)),
        bool(np.all(u1 <= deadband)),
        bool(np.all(u2 >= -deadband)),
        bool(np.all(u2 <= deadband)),
    )
    margins = _conclusions(curve(s), curve(t))
    holds = tuple(bool(m >= -tol) for m in margins)
    return HeightChangeReport(applies, holds, tuple(float(m) for m in margins))


# --- serialization -----------------------------------------------------------

def to_descriptor(curve: SegmentCurve) -> dict:
    """JSON-ready descriptor with every number as a rational string."""
    return {
        "start": [format_rational(c) for c in curve.start],
        "t0": format_rational(curve.t0),
        "segments": [
            {"dir": s.direction.value, "speed": format_rational(s.speed),
             "duration": format_rational(s.duration)}
            for s in curve.segments
        ],
    }


def from_descriptor(data: dict) -> SegmentCurve:
    start = data.get("start", ["0"] * 5)
    if len(start) != 5:
        raise ValueError("start must have 5 coordinates")
    segs = []
    for item in data.get("segments", []):
        segs.append(Segment(Direction(item["dir"]), to_fraction(item["speed"]),
                            to_fraction(item["duration"])))
    return SegmentCurve(GroupPoint(*(to_fraction(c) for c in start)),
                        to_fraction(data.get("t0", "0")), tuple(segs))


def decimal_string(x, digits: int = 30) -> str:
    """Fixed-precision decimal rendering of an exact rational (or float)."""
    x = to_fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(x.numerator) / Decimal(x.denominator)
        text = format(d.normalize(), "f") if d != 0 else "0"
    return text


def samples_to_csv(ts: Sequence, points: Sequence[Sequence], digits: int = 30) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "x1", "x2", "x3", "x4", "x5"])
    for t, p in zip(ts, points):
        writer.writerow([decimal_string(t, digits)] + [decimal_string(c, digits) for c in p])
    return buf.getvalue()
