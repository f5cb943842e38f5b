"""The iterated overpass construction gamma_1, gamma_2, ... and its probes.

``gamma_1(t) = exp(t X1)`` on [0, 1]. Level ``n`` cuts [0, 1] into ``N_n``
equal cells on each of which ``gamma_n`` is a single ``lam_n``-segment;
``gamma_{n+1}`` replaces that segment by the overpass with ``Q = 5^n`` and
``lam = lam_n``, translated to start at ``gamma_n`` of the cell's left end.

Levels 1 and 2 are small enough to materialize. Deeper levels are evaluated
lazily: a point only needs the chain of cells containing it.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import IDENTITY, GroupPoint, frame, mul, to_fraction
from .config import DEFAULT_KAPPA, DEFAULTS
from .curves import Direction, Segment, SegmentCurve, flow, samples_to_csv
from .modification import ModificationSpec, Variant, build, letter_direction

MATERIALIZE_MAX_LEVEL = 2


@dataclass(frozen=True)
class LevelParams:
    n: int
    lam: Fraction
    N: int
    kappa: int

    @property
    def Q(self) -> int:
        """Overpass parameter used to pass from this level to the next."""
        return 5 ** self.n

    @property
    def cell_width(self) -> Fraction:
        return Fraction(1, self.N)


@functools.lru_cache(maxsize=None)
def level_params(n: int, kappa: int = DEFAULT_KAPPA) -> LevelParams:
    if n < 1:
        raise ValueError(f"level must be >= 1, got {n}")
    if kappa < 1:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    if n == 1:
        return LevelParams(1, Fraction(1), 1, kappa)
    prev = level_params(n - 1, kappa)
    m = n - 1
    lam = (1 + Fraction(2, 3 * 5 ** m)) * prev.lam
    N = 80 * kappa * (3 * 5 ** m + 2) * (24 * 5 ** m * prev.N) ** 3
    # the next cell must be tiny compared with the previous overpass height
    assert Fraction(1, N) <= Fraction(1, 10 * kappa) * (prev.lam / (24 * 5 ** m * prev.N)) ** 3
    assert (N // prev.N) % (8 * (3 * 5 ** m + 2)) == 0
    return LevelParams(n, lam, N, kappa)


def ratio(n: int, kappa: int = DEFAULT_KAPPA) -> int:
    """Number of level-``n`` cells inside one level-``n-1`` cell."""
    return level_params(n, kappa).N // level_params(n - 1, kappa).N


@dataclass(frozen=True)
class CurveAddress:
    n: int
    j: int
    kappa: int = DEFAULT_KAPPA

    def __post_init__(self):
        N = level_params(self.n, self.kappa).N
        if not 1 <= self.j <= N:
            raise IndexError(f"cell index {self.j} outside [1, {N}] at level {self.n}")

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        N = level_params(self.n, self.kappa).N
        return Fraction(self.j - 1, N), Fraction(self.j, N)

    def parent(self) -> "CurveAddress":
        if self.n == 1:
            raise ValueError("level 1 has no parent")
        return CurveAddress(self.n - 1, (self.j - 1) // ratio(self.n, self.kappa) + 1, self.kappa)

    def ancestors(self) -> list["CurveAddress"]:
        """Addresses from level 1 down to this one."""
        chain = [self]
        while chain[-1].n > 1:
            chain.append(chain[-1].parent())
        return chain[::-1]

    @classmethod
    def containing(cls, n: int, t, kappa: int = DEFAULT_KAPPA) -> "CurveAddress":
        """The cell holding ``t``; a shared endpoint goes to the left cell."""
        t = to_fraction(t)
        if not 0 <= t <= 1:
            raise ValueError(f"t={t} outside [0, 1]")
        N = level_params(n, kappa).N
        j = max(1, math.ceil(t * N))
        return cls(n, j, kappa)


def direction(addr: CurveAddress) -> tuple[Direction, str]:
    """Direction of ``gamma_n`` on the cell and the phase that produced it."""
    d, phase = Direction.PLUS_X1, "base"
    chain = addr.ancestors()
    for up, down in zip(chain, chain[1:]):
        R = ratio(down.n, addr.kappa)
        Q = 5 ** up.n
        k = down.j - (up.j - 1) * R
        ell = -(-k * 8 * (3 * Q + 2) // R)
        d, phase, _ = letter_direction(Variant.for_direction(d), Q, ell)
    return d, phase


@functools.lru_cache(maxsize=64)
def _local_curve(n: int, kappa: int, variant: Variant) -> SegmentCurve:
    """Overpass turning a level-``n`` cell into level ``n+1``, placed on [0, 1/N_n]."""
    p = level_params(n, kappa)
    return build(ModificationSpec(0, p.cell_width, p.lam, p.Q, variant))


@functools.lru_cache(maxsize=None)
def materialize(n: int, kappa: int = DEFAULT_KAPPA) -> SegmentCurve:
    """``gamma_n`` as an explicit segment curve (levels 1 and 2 only)."""
    if n == 1:
        return SegmentCurve(IDENTITY, 0, (Segment(Direction.PLUS_X1, 1, 1),))
    if n == 2:
        return _local_curve(1, kappa, Variant.ALPHA_PLUS)
    raise ValueError(f"level {n} is too large to materialize; use eval_gamma")


class GammaEvaluator:
    """Exact lazy evaluator of ``gamma_n`` with a memo of cell left endpoints.

    The memo only ever stores values that the cache-free recursion would
    produce, so switching it off changes speed, not results.
    """

    def __init__(self, kappa: int = DEFAULT_KAPPA, cache: bool = True):
        level_params(1, kappa)
        self.kappa = kappa
        self.cache = cache
        self._memo: dict[tuple[int, Fraction], GroupPoint] = {}
        self._lock = threading.Lock()

    def __call__(self, n: int, t) -> GroupPoint:
        t = to_fraction(t)
        if not 0 <= t <= 1:
            raise ValueError(f"t={t} outside [0, 1]")
        if n < 1:
            raise ValueError(f"level must be >= 1, got {n}")
        if n <= MATERIALIZE_MAX_LEVEL:
            return materialize(n, self.kappa)(t)
        addr = CurveAddress.containing(n - 1, t, self.kappa)
        a, _ = addr.interval
        base = self._left(n - 1, a)
        d, _ = direction(addr)
        rho = _local_curve(n - 1, self.kappa, Variant.for_direction(d))
        return mul(base, rho(t - a))

    def _left(self, n: int, a: Fraction) -> GroupPoint:
        if not self.cache:
            return self(n, a)
        key = (n, a)
        hit = self._memo.get(key)
        if hit is None:
            hit = self(n, a)
            with self._lock:
                self._memo.setdefault(key, hit)
        return hit

    def clear(self) -> None:
        with self._lock:
            self._memo.clear()


_EVALUATORS: dict[int, GammaEvaluator] = {}


def eval_gamma(n: int, t, kappa: int = DEFAULT_KAPPA, cache: bool = True) -> GroupPoint:
    """``gamma_n(t)`` exactly, for rational ``t`` in [0, 1]."""
    if not cache:
        return GammaEvaluator(kappa, cache=False)(n, t)
    ev = _EVALUATORS.get(kappa)
    if ev is None:
        ev = _EVALUATORS.setdefault(kappa, GammaEvaluator(kappa))
    return ev(n, t)


def sample_gamma(n: int, ts, kappa: int = DEFAULT_KAPPA) -> np.ndarray:
    """Float samples of ``gamma_n`` with shape (len(ts), 5).

    Levels 1 and 2 are vectorized; deeper levels evaluate each time exactly
    (times are taken as exact rationals) and round at the end.
    """
    if n <= MATERIALIZE_MAX_LEVEL and not any(isinstance(t, Fraction) for t in ts[:1]):
        return materialize(n, kappa).sample(np.asarray(ts, dtype=float))
    return np.array([[float(c) for c in eval_gamma(n, t, kappa)] for t in ts], dtype=float).reshape(-1, 5)


def midpoint_times(M: int) -> list[Fraction]:
    """Exact midpoints ``(k + 1/2)/M`` of a uniform M-cell grid on [0, 1]."""
    return [Fraction(2 * k + 1, 2 * M) for k in range(M)]


def sample_csv(n: int, M: int, kappa: int = DEFAULT_KAPPA, digits: int = 30) -> str:
    """CSV ``t,x1..x5`` at ``M`` equally spaced exact times including both ends."""
    if M < 2:
        raise ValueError("need at least two sample times")
    ts = [Fraction(k, M - 1) for k in range(M)]
    return samples_to_csv(ts, [eval_gamma(n, t, kappa) for t in ts], digits)


# --- certified quantities -------------------------------------------------------------

def step_bound(n: int, kappa: int = DEFAULT_KAPPA) -> Fraction:
    """Upper bound ``2 / (N_n 5^n)`` on ``d_c(gamma_n(t), gamma_{n+1}(t))``."""
    return Fraction(2, level_params(n, kappa).N * 5 ** n)


def tail_bound(n: int, kappa: int = DEFAULT_KAPPA) -> Fraction:
    """Rational upper bound on ``2 sum_{k >= n} 1/(N_k 5^k)``.

    Consecutive terms shrink by at least ``N_k / (5 N_{k+1}) <= 1/400`` since
    ``N_{k+1} >= 80 N_k``, so everything past ``k = n+1`` is dominated by a
    geometric series.
    """
    t0 = Fraction(1, level_params(n, kappa).N * 5 ** n)
    t1 = Fraction(1, level_params(n + 1, kappa).N * 5 ** (n + 1))
    return 2 * (t0 + t1 * Fraction(400, 399))


def _planar_sq(p, q) -> Fraction:
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


@dataclass
class GapReport:
    n: int
    t: Fraction
    bound: Fraction
    planar_ok: bool
    planar_gap: float
    cc_upper: float | None = None
    witness_ok: bool | None = None

    @property
    def passed(self) -> bool:
        return self.planar_ok and self.witness_ok is not False


def gap_bound_check(n: int, t, kappa: int = DEFAULT_KAPPA, budget=None, slack: float | None = None) -> GapReport:
    """Compare ``gamma_n(t)`` and ``gamma_{n+1}(t)`` against ``2 / (N_n 5^n)``.

    The planar part is exact (squared distances in rationals). With a budget,
    a witnessed ``cc_upper`` must also stay under the bound times ``slack``.
    """
    t = to_fraction(t)
    p, q = eval_gamma(n, t, kappa), eval_gamma(n + 1, t, kappa)
    bound = step_bound(n, kappa)
    sq = _planar_sq(p, q)
    report = GapReport(n, t, bound, sq <= bound ** 2, math.sqrt(sq))
    if budget is not None:
        from .ccmetric import cc_upper

        slack = DEFAULTS.cc_slack if slack is None else slack
        res = cc_upper(p, q, budget)
        report.cc_upper = res.value
        report.witness_ok = res.ok and res.value <= float(bound) * slack
    return report


def lipschitz_check(n: int, s, t, kappa: int = DEFAULT_KAPPA, budget=None, slack: float | None = None) -> bool:
    """Planar distance of ``gamma_n(s), gamma_n(t)`` is at most ``lam_n |t - s|`` (exact).

    With a budget the witnessed ``cc_upper`` is held to the same bound with slack.
    """
    s, t = to_fraction(s), to_fraction(t)
    lam = level_params(n, kappa).lam
    p, q = eval_gamma(n, s, kappa), eval_gamma(n, t, kappa)
    ok = _planar_sq(p, q) <= (lam * (t - s)) ** 2
    if budget is not None and ok:
        from .ccmetric import cc_upper

        slack = DEFAULTS.cc_slack if slack is None else slack
        res = cc_upper(p, q, budget)
        ok = res.ok and res.value <= float(lam * abs(t - s)) * slack + DEFAULTS.endpoint
    return ok


def cell_check(addr: CurveAddress) -> bool:
    """``gamma_n`` on the cell is exactly one ``lam_n``-segment along ``direction(addr)``."""
    lam = level_params(addr.n, addr.kappa).lam
    a, b = addr.interval
    d, _ = direction(addr)
    p = eval_gamma(addr.n, a, addr.kappa)
    mid = (a + b) / 2
    return (eval_gamma(addr.n, mid, addr.kappa) == flow(p, d, lam, mid - a)
            and eval_gamma(addr.n, b, addr.kappa) == flow(p, d, lam, b - a))


def letter_grid_check(n: int, kappa: int = DEFAULT_KAPPA) -> bool:
    """Full check of level ``n <= 2`` on the letter grid of its overpasses.

    Every cell of ``gamma_n`` lies inside one letter of the level ``n-1``
    overpass, so checking letters covers all ``N_n`` cells at once.
    """
    if n == 1:
        return materialize(1, kappa)(1) == GroupPoint(1, 0, 0, 0, 0)
    if n > MATERIALIZE_MAX_LEVEL:
        raise ValueError("full enumeration is only available for levels 1 and 2")
    p = level_params(n - 1, kappa)
    curve = materialize(n, kappa)
    M = 8 * (3 * p.Q + 2)
    width = Fraction(1, M)
    for ell in range(1, M + 1):
        d, _, _ = letter_direction(Variant.ALPHA_PLUS, p.Q, ell)
        a = (ell - 1) * width
        if curve(a + width) != flow(curve(a), d, level_params(n, kappa).lam, width):
            return False
        # the cell-level direction oracle must agree with the letter
        j = (ell - 1) * (level_params(n, kappa).N // M) + 1
        if direction(CurveAddress(n, j, kappa))[0] != d:
            return False
    return True


@dataclass
class ProbeReport:
    n: int
    t: Fraction
    h: Fraction
    direction: Direction
    quotient: tuple
    expected: tuple
    error: float

    def matches(self, tol: float = 1e-5) -> bool:
        """Velocity is ``+-lam_n`` on exactly the moving coordinate and ~0 on the other."""
        return self.error <= tol


def junction_distance(n: int, t, kappa: int = DEFAULT_KAPPA) -> Fraction:
    """Distance from ``t`` to the nearest maximal-segment boundary of ``gamma_n``."""
    t = to_fraction(t)
    if n == 1:
        return min(t, 1 - t)
    addr = CurveAddress.containing(n - 1, t, kappa)
    a, _ = addr.interval
    d, _ = direction(addr)
    rho = _local_curve(n - 1, kappa, Variant.for_direction(d))
    return min(abs(t - a - s) for s in rho.times)


def derivative_probe(n: int, t, h=Fraction(1, 10 ** 6), kappa: int = DEFAULT_KAPPA) -> ProbeReport:
    """Central difference of ``gamma_n`` at ``t`` versus ``lam_n`` times the frame field.

    Raises ``ValueError`` if ``t`` lies within ``junction_factor * h`` of a
    segment boundary.
    """
    t, h = to_fraction(t), to_fraction(h)
    if n > 1 and junction_distance(n, t, kappa) <= DEFAULTS.junction_factor * h:
        raise ValueError(f"t={t} is within {DEFAULTS.junction_factor}h of a junction")
    if t - h < 0 or t + h > 1:
        raise ValueError("probe window leaves [0, 1]")
    lam = level_params(n, kappa).lam
    fwd, back = eval_gamma(n, t + h, kappa), eval_gamma(n, t - h, kappa)
    quotient = tuple((x - y) / (2 * h) for x, y in zip(fwd, back))
    addr = CurveAddress.containing(n, t, kappa)
    d, _ = direction(addr) if n > 1 else (Direction.PLUS_X1, "base")
    field = frame(eval_gamma(n, t, kappa))[d.axis - 1]
    expected = tuple(d.sign * lam * c for c in field)
    error = max(abs(float(x - y)) for x, y in zip(quotient, expected))
    return ProbeReport(n, t, h, d, tuple(float(x) for x in quotient), tuple(float(x) for x in expected), error)
