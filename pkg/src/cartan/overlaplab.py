"""Coincidence experiments between C^1 horizontal curves and the constructed curves.

Family members are described by continuous controls whose planar integrals are
known in closed form, so lifting only needs the vertical lifting equations.
Coincidence is measured in the Euclidean norm on a midpoint grid: a point
counts when ``|Gamma(t) - gamma(t)| <= tau``. Euclidean closeness is implied by
CC closeness, so this over-counts and keeps upper-bound assertions sound.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import GroupPoint, exp_horizontal, mul, to_fraction
from .config import COINCIDENCE_GRID, DEFAULTS
from .curves import ControlCurve, SegmentCurve, horizontality_residual, lift
from .modification import ModificationSpec, Variant, build

KINDS = ("lines", "trig", "smoothed", "bypass", "mixed")


# --- controls with closed-form planar integrals ------------------------------------------

def _smooth_step(x):
    """Quintic smoothstep from 0 at ``x <= -1`` to 1 at ``x >= 1``."""
    s = np.clip((np.asarray(x, dtype=float) + 1) / 2, 0, 1)
    return s ** 3 * (10 - 15 * s + 6 * s * s)


def _smooth_step_integral(x):
    """Antiderivative of :func:`_smooth_step` vanishing for ``x <= -1``."""
    x = np.asarray(x, dtype=float)
    s = np.clip((x + 1) / 2, 0, 1)
    inner = 2 * s ** 4 * (s * s - 3 * s + 2.5)
    return np.where(x >= 1, x, inner)


@dataclass
class MollifiedControls:
    """Piecewise-constant planar velocity with jumps smoothed over ``[t_k - w, t_k + w]``.

    ``u(t) = v0 + sum_k dv_k S((t - t_k)/w)``; continuous, and C^1 in t since the
    smoothstep has vanishing derivative at both ends.
    """

    v0: tuple[float, float]
    jumps: list[tuple[float, float, float]] = field(default_factory=list)  # (t_k, dv1, dv2)
    width: float = 1e-3

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        u1 = np.full_like(t, self.v0[0])
        u2 = np.full_like(t, self.v0[1])
        for tk, d1, d2 in self.jumps:
            s = _smooth_step((t - tk) / self.width)
            u1 = u1 + d1 * s
            u2 = u2 + d2 * s
        return u1, u2

    def displacement(self, t):
        """Integral of the velocity from 0 to ``t``."""
        t = np.asarray(t, dtype=float)
        x1 = self.v0[0] * t
        x2 = self.v0[1] * t
        w = self.width
        for tk, d1, d2 in self.jumps:
            a = w * (_smooth_step_integral((t - tk) / w) - _smooth_step_integral(-tk / w))
            x1 = x1 + d1 * a
            x2 = x2 + d2 * a
        return x1, x2


@dataclass
class TrigControls:
    """``u_i(t) = c_i + sum_k a_ik cos(2 pi k t) + b_ik sin(2 pi k t)``."""

    c: tuple[float, float]
    a: np.ndarray  # shape (2, K)
    b: np.ndarray

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        k = np.arange(1, self.a.shape[1] + 1)
        arg = 2 * np.pi * np.multiply.outer(t, k)
        cos, sin = np.cos(arg), np.sin(arg)
        return tuple(self.c[i] + cos @ self.a[i] + sin @ self.b[i] for i in range(2))

    def displacement(self, t):
        t = np.asarray(t, dtype=float)
        k = np.arange(1, self.a.shape[1] + 1)
        arg = 2 * np.pi * np.multiply.outer(t, k)
        w = 2 * np.pi * k
        out = []
        for i in range(2):
            out.append(self.c[i] * t + np.sin(arg) @ (self.a[i] / w) + (1 - np.cos(arg)) @ (self.b[i] / w))
        return tuple(out)


@dataclass
class Member:
    """One C^1 horizontal curve on [0, 1] given by controls and a start point."""

    ident: int
    kind: str
    controls: object
    start: tuple
    label: str = ""

    def planar(self):
        def g(i):
            return lambda t: self.start[i] + self.controls.displacement(t)[i]

        def dg(i):
            return lambda t: self.controls.velocity(t)[i]

        return g(0), g(1), dg(0), dg(1)

    def curve(self, grid) -> ControlCurve:
        g1, g2, d1, d2 = self.planar()
        return lift(grid, g1, g2, d1, d2, start=self.start)

    def floor_margin(self, grid, axis: int) -> float:
        """``min |u_axis| - 0`` over the grid (compare against the floor)."""
        u = self.controls.velocity(np.asarray(grid, dtype=float))[axis - 1]
        return float(np.min(np.abs(u)))


# --- family specification ----------------------------------------------------------------

@dataclass(frozen=True)
class C1HFamilySpec:
    """Recipe for a deterministic family of C^1 horizontal curves on [0, 1].

    ``floor`` (if set) asks for ``|u_axis| >= floor`` on ``floor_axis``;
    ``target`` is the modification whose phases smoothed and bypass members
    copy (defaults to the overpass of gamma_1, i.e. gamma_2).
    """

    kind: str = "mixed"
    count: int = 100
    bound: float = 1.5
    floor: float | None = 0.5
    floor_axis: int = 1
    seed: int = 0
    target: ModificationSpec | None = None
    include_gamma1: bool = False
    width: float = 1e-3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}; choose from {KINDS}")
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.floor_axis not in (1, 2):
            raise ValueError("floor_axis must be 1 or 2")
        if self.floor is not None and self.floor > self.bound:
            raise ValueError(f"infeasible floor {self.floor} above the coefficient bound {self.bound}")
        if not 0 < self.width < 0.01:
            raise ValueError("mollifier width must lie in (0, 0.01)")

    @property
    def modification(self) -> ModificationSpec:
        if self.target is not None:
            return self.target
        variant = Variant.ALPHA_PLUS if self.floor_axis == 1 else Variant.BETA_PLUS
        return ModificationSpec(0, 1, 1, 5, variant)

    def to_json(self) -> dict:
        return {"kind": self.kind, "count": self.count, "bound": self.bound, "floor": self.floor,
                "floor_axis": self.floor_axis, "seed": self.seed, "include_gamma1": self.include_gamma1,
                "width": self.width, "target": None if self.target is None else self.target.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "C1HFamilySpec":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown family fields: {sorted(unknown)}")
        data = dict(data)
        if data.get("target") is not None:
            data["target"] = ModificationSpec.from_json(data["target"])
        return cls(**data)


def _unit(axis: int, value: float) -> tuple[float, float]:
    return (value, 0.0) if axis == 1 else (0.0, value)


def _line(ident, rng, spec: C1HFamilySpec) -> Member:
    lo = spec.floor if spec.floor is not None else 0.0
    c = rng.uniform(lo, spec.bound) * rng.choice([-1.0, 1.0])
    p = rng.uniform(-0.5, 0.5, size=2)
    start = (float(p[0]), float(p[1]), 0.0, 0.0, 0.0)
    ctrl = MollifiedControls(_unit(spec.floor_axis, c), [], spec.width)
    return Member(ident, "lines", ctrl, start, f"line speed {c:.4f}")


def _trig(ident, rng, spec: C1HFamilySpec, K: int = 3) -> Member:
    axis = spec.floor_axis - 1
    lo = spec.floor if spec.floor is not None else 0.0
    a = rng.uniform(-1, 1, size=(2, K)) / np.arange(1, K + 1)
    b = rng.uniform(-1, 1, size=(2, K)) / np.arange(1, K + 1)
    # leave room so the constant term keeps |u_axis| above the floor everywhere
    room = spec.bound - lo
    osc = np.abs(a[axis]).sum() + np.abs(b[axis]).sum()
    scale = min(1.0, 0.5 * room / osc) if osc > 0 else 1.0
    a[axis] *= scale
    b[axis] *= scale
    osc *= scale
    c = np.zeros(2)
    c[axis] = rng.choice([-1.0, 1.0]) * rng.uniform(lo + osc, spec.bound)
    c[1 - axis] = rng.uniform(-0.5, 0.5)
    p = rng.uniform(-0.5, 0.5, size=2)
    return Member(ident, "trig", TrigControls(tuple(c), a, b), (float(p[0]), float(p[1]), 0.0, 0.0, 0.0),
                  "trigonometric controls")


def _target_curve(spec: C1HFamilySpec) -> SegmentCurve:
    m = spec.modification
    if not (0 <= m.a and m.b <= 1):
        raise ValueError("target modification must live inside [0, 1]")
    return build(m)


def smoothed_copy(curve: SegmentCurve, first: int, last: int, width: float, ident: int = 0) -> Member:
    """C^1 copy of segments ``first..last`` of ``curve``, extended to [0, 1].

    Junctions inside the window are mollified over ``+-width``; before the
    window the copy continues the first segment backwards and after it the
    last segment forwards, so it coincides exactly with ``curve`` on the first
    segment up to ``width`` before its end.
    """
    segs = curve.segments
    if not 0 <= first <= last < len(segs):
        raise ValueError("bad segment window")

    def vel(seg):
        u = seg.direction.unit()
        return (u[0] * float(seg.speed), u[1] * float(seg.speed))

    v0 = vel(segs[first])
    jumps = []
    prev = v0
    for k in range(first + 1, last + 1):
        v = vel(segs[k])
        jumps.append((float(curve.times[k]), v[0] - prev[0], v[1] - prev[1]))
        prev = v
    t_i = curve.times[first]
    d = segs[first].direction
    # start = curve(t_i) * exp(-t_i * v0), computed exactly
    back = -to_fraction(t_i) * segs[first].speed
    u1, u2 = d.unit()
    start = mul(curve(t_i), exp_horizontal(u1 * back, u2 * back))
    return Member(ident, "smoothed", MollifiedControls(v0, jumps, width),
                  tuple(float(c) for c in start), f"smoothed copy of segments {first}..{last}")


def bypass(m: ModificationSpec, width: float, ident: int = 0) -> Member:
    """Follow the first and last straight phases of ``m`` and skip both staircases smoothly.

    Along the variant's axis the copy slows to a constant ``c`` across the
    middle so that it rejoins the overpass exactly at the last phase; the
    other control stays zero, so all higher coordinates stay zero too.
    """
    if m.variant.sign < 0:
        raise ValueError("bypass is built for the plus variants")
    Q, d, lp, lam = m.Q, m.delta, m.lam_prime, m.lam
    j1, j2 = m.a + Q * d, m.a + (2 * Q + 2) * d
    c = lp - (lp - lam) * m.L / (j2 - j1)
    axis = m.variant.axis
    lpf, cf = float(lp), float(c)
    # positioned so that it passes the origin at t = a, like the overpass
    v0 = _unit(axis, lpf)
    ctrl = MollifiedControls(v0, [(float(j1), *_unit(axis, cf - lpf)), (float(j2), *_unit(axis, lpf - cf))], width)
    start = _unit(axis, -lpf * float(m.a))
    return Member(ident, "bypass", ctrl, (start[0], start[1], 0.0, 0.0, 0.0),
                  f"bypass of both staircases at speed {cf:.6f}")


def members(spec: C1HFamilySpec) -> list[Member]:
    """Deterministic family described by ``spec``."""
    rng = np.random.default_rng(spec.seed)
    out: list[Member] = []
    if spec.include_gamma1:
        out.append(Member(0, "lines", MollifiedControls((1.0, 0.0), [], spec.width), (0.0,) * 5, "gamma_1"))
    kinds = _kind_schedule(spec)
    target = None
    for kind in kinds[: spec.count - len(out)]:
        ident = len(out)
        if kind == "lines":
            out.append(_line(ident, rng, spec))
        elif kind == "trig":
            out.append(_trig(ident, rng, spec))
        elif kind == "smoothed":
            target = target or _target_curve(spec)
            out.append(_smoothed_member(ident, rng, spec, target))
        else:
            out.append(bypass(spec.modification, spec.width * (1 + rng.random()), ident))
    return out


def _kind_schedule(spec: C1HFamilySpec) -> list[str]:
    if spec.kind != "mixed":
        return [spec.kind] * spec.count
    pattern = ["lines", "trig", "trig", "smoothed", "lines", "trig", "smoothed", "trig", "bypass", "smoothed"]
    return [pattern[i % len(pattern)] for i in range(spec.count)]


def _smoothed_member(ident, rng, spec, target: SegmentCurve) -> Member:
    n = len(target.segments)
    # straight phases are segments 0, 9, 18; windows may run into the staircases
    first = int(rng.choice([0, 9, 18, int(rng.integers(0, n))]))
    last = min(n - 1, first + int(rng.integers(0, 3)))
    return smoothed_copy(target, first, last, spec.width * (1 + rng.random()), ident)


def midpoint_grid(M: int) -> np.ndarray:
    return (2 * np.arange(M) + 1) / (2 * M)


def lift_grid(M: int) -> np.ndarray:
    """Nodes ``j / (2M)``: the midpoints ``(k + 1/2)/M`` are the odd nodes."""
    return np.arange(2 * M + 1) / (2 * M)


def generate(spec: C1HFamilySpec, grid: int = 20_000) -> list[ControlCurve]:
    """Lift every member on a uniform grid of ``grid`` steps and check it.

    Raises ``ValueError`` if a member fails the horizontality check. Members
    below the requested floor (smoothed copies running into a staircase) are
    dropped; :func:`members` still returns them for flagged reporting.
    """
    t = np.linspace(0.0, 1.0, grid + 1)
    curves = []
    for m in members(spec):
        cc = m.curve(t)
        res = horizontality_residual(cc.grid, cc.states)
        if res > DEFAULTS.horizontality:
            raise ValueError(f"member {m.ident} is not horizontal (residual {res:.2e})")
        if spec.floor is not None and m.floor_margin(t, spec.floor_axis) < spec.floor:
            continue
        cc.residual_bound = res
        curves.append(cc)
    if not curves:
        raise ValueError("no member of the family satisfies the floor")
    return curves


# --- coincidence --------------------------------------------------------------------------

def _samples(curve, ts: np.ndarray) -> np.ndarray:
    if isinstance(curve, np.ndarray):
        if curve.shape != (ts.size, 5):
            raise ValueError("sample array does not match the grid")
        return curve
    if isinstance(curve, SegmentCurve):
        return curve.sample(ts)
    if isinstance(curve, ControlCurve):
        return np.column_stack([np.interp(ts, curve.grid, curve.states[:, i]) for i in range(5)])
    if isinstance(curve, Member):
        return _samples(curve.curve(lift_grid(ts.size)), ts)
    if callable(curve):
        out = np.asarray(curve(ts), dtype=float)
        return out if out.shape == (ts.size, 5) else out.T
    raise TypeError(f"cannot sample {type(curve).__name__}")


def coincidence_measure(Gamma, gamma, tau: float = DEFAULTS.coincidence_tau, grid: int = 100_000,
                        domain: tuple[float, float] = (0.0, 1.0)) -> float:
    """Fraction of midpoint-grid times where ``|Gamma(t) - gamma(t)| <= tau``.

    Curves may be segment curves, control curves (sampled by interpolation),
    members, callables returning (M, 5) arrays, or precomputed (M, 5) samples.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    a, b = domain
    ts = a + (b - a) * midpoint_grid(grid)
    diff = _samples(Gamma, ts) - _samples(gamma, ts)
    return float(np.count_nonzero(np.linalg.norm(diff, axis=1) <= tau)) / grid


def member_samples(m: Member, M: int, domain: tuple[float, float] = (0.0, 1.0)) -> np.ndarray:
    """States of a member at the midpoints of an M-cell grid on ``domain``."""
    a, b = domain
    nodes = a + (b - a) * lift_grid(M)
    cc = m.curve(nodes) if a == 0 else _shifted_lift(m, nodes)
    return cc.states[1::2]


def _shifted_lift(m: Member, nodes: np.ndarray) -> ControlCurve:
    # lift from 0 up to the first node, then over the nodes
    g1, g2, d1, d2 = m.planar()
    head = m.curve(np.linspace(0.0, nodes[0], 2001))
    return lift(nodes, g1, g2, d1, d2, start=tuple(head.states[-1]))


# --- harnesses ----------------------------------------------------------------------------

@dataclass
class MemberResult:
    ident: int
    kind: str
    label: str
    coincidence: float
    floor_ok: bool
    horizontal_ok: bool
    residual: float

    @property
    def flags(self) -> str:
        bad = []
        if not self.floor_ok:
            bad.append("floor-violated")
        if not self.horizontal_ok:
            bad.append("not-horizontal")
        return ";".join(bad) or "ok"

    @property
    def admissible(self) -> bool:
        return self.floor_ok and self.horizontal_ok


@dataclass
class BadIntersectReport:
    spec: ModificationSpec
    tau: float
    grid: int
    limit: float
    results: list[MemberResult]

    @property
    def admissible(self) -> list[MemberResult]:
        return [r for r in self.results if r.admissible]

    @property
    def max_coincidence(self) -> float:
        return max((r.coincidence for r in self.admissible), default=0.0)

    @property
    def worst(self) -> MemberResult | None:
        adm = self.admissible
        return max(adm, key=lambda r: (r.coincidence, -r.ident)) if adm else None

    @property
    def falsifications(self) -> list[MemberResult]:
        return [r for r in self.admissible if r.coincidence > self.limit]

    @property
    def passed(self) -> bool:
        return not self.falsifications

    def to_csv(self) -> str:
        return results_csv(self.results)


def results_csv(results: Sequence[MemberResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["curve_id", "kind", "coincidence", "floor_ok", "horizontal_ok", "flags"])
    for r in results:
        w.writerow([r.ident, r.kind, repr(r.coincidence), r.floor_ok, r.horizontal_ok, r.flags])
    return buf.getvalue()


def _evaluate_member(m: Member, target: np.ndarray, M: int, domain, tau: float,
                     floor: float | None, axis: int) -> MemberResult:
    a, b = domain
    nodes = a + (b - a) * lift_grid(M)
    cc = m.curve(nodes) if a == 0 else _shifted_lift(m, nodes)
    res = horizontality_residual(cc.grid, cc.states)
    floor_ok = floor is None or m.floor_margin(nodes, axis) >= floor
    diff = cc.states[1::2] - target
    frac = float(np.count_nonzero(np.linalg.norm(diff, axis=1) <= tau)) / M
    return MemberResult(m.ident, m.kind, m.label, frac, floor_ok, res <= DEFAULTS.horizontality, res)


def badintersect_harness(spec: ModificationSpec, family: C1HFamilySpec, tau: float = DEFAULTS.coincidence_tau,
                         grid: int = 100_000, slack: float = DEFAULTS.badintersect_slack,
                         extra: Sequence[Member] = ()) -> BadIntersectReport:
    """Coincidence of every family member with the built overpass on ``[a, b]``.

    The overpass itself plays the role of the nearby curve, so the closeness
    hypothesis holds with distance zero. Members violating the derivative
    floor are kept in the report with a flag but do not count as
    falsifications. ``extra`` adds hand-made members (e.g. adversarial copies).
    """
    if family.floor is None or family.floor < 0.5:
        raise ValueError("the harness needs a derivative floor of at least 1/2")
    axis = family.floor_axis
    domain = (float(spec.a), float(spec.b))
    curve = build(spec)
    ts = domain[0] + (domain[1] - domain[0]) * midpoint_grid(grid)
    target = curve.sample(ts)
    results = [_evaluate_member(m, target, grid, domain, tau, family.floor, axis)
               for m in [*members(family), *extra]]
    # coincidence is a fraction of [a, b]; the bound is 4/5 of its length
    return BadIntersectReport(spec, tau, grid, 0.8 + slack, results)


@dataclass
class LusinRow:
    level: int
    grid: int
    max: float
    mean: float
    argmax: int


@dataclass
class LusinTable:
    tau: float
    rows: list[LusinRow]
    per_member: dict[int, list[float]]

    @property
    def non_increasing(self) -> bool:
        return all(b.max <= a.max for a, b in zip(self.rows, self.rows[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "grid", "max", "mean", "argmax"])
        for r in self.rows:
            w.writerow([r.level, r.grid, repr(r.max), repr(r.mean), r.argmax])
        return buf.getvalue()


def gamma_samples(n: int, M: int, kappa: int = 1) -> np.ndarray:
    """``gamma_n`` at the midpoints of an M-cell grid (exact times, float values)."""
    from .limitcurve import MATERIALIZE_MAX_LEVEL, materialize, midpoint_times, sample_gamma

    if n <= MATERIALIZE_MAX_LEVEL:
        return materialize(n, kappa).sample(midpoint_grid(M))
    return sample_gamma(n, midpoint_times(M), kappa)


def lusin_experiment(levels: Sequence[int], family: C1HFamilySpec, tau: float = DEFAULTS.coincidence_tau,
                     grid: int | dict | None = None, kappa: int = 1,
                     extra: Sequence[Member] = ()) -> LusinTable:
    """Max and mean coincidence of a fixed family with ``gamma_n`` per level.

    ``grid`` may be one size for every level or a per-level mapping (default
    from config). Members are lifted once per grid size.
    """
    if grid is None:
        grid = COINCIDENCE_GRID
    fam = [*members(family), *extra]
    lifted: dict[int, list[np.ndarray]] = {}
    rows, per_member = [], {m.ident: [] for m in fam}
    for n in levels:
        M = grid[n] if isinstance(grid, dict) else int(grid)
        if M not in lifted:
            lifted[M] = [member_samples(m, M) for m in fam]
        target = gamma_samples(n, M, kappa)
        fracs = []
        for m, states in zip(fam, lifted[M]):
            f = float(np.count_nonzero(np.linalg.norm(states - target, axis=1) <= tau)) / M
            fracs.append(f)
            per_member[m.ident].append(f)
        k = int(np.argmax(fracs))
        rows.append(LusinRow(n, M, fracs[k], float(np.mean(fracs)), fam[k].ident))
    return LusinTable(tau, rows, per_member)
