"""Two-sided bounds on the Carnot-Caratheodory distance.

Lower bounds come for free: a horizontal curve is at least as long as its
planar shadow. Upper bounds are lengths of explicit horizontal curves found by
optimization; whatever the optimizer does, the number returned is the length
of a witness whose endpoint has been checked with exact arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .algebra import GroupPoint, exp_horizontal, inv, mul, to_fraction
from .config import DEFAULTS
from .curves import PolygonalCurve, SegmentCurve
from .staircase import commutator_letters, staircase_letters


@dataclass(frozen=True)
class DistanceBudget:
    """Search effort for :func:`cc_upper`.

    ``pieces`` is the number of constant-control pieces of random starts,
    ``iterations`` caps each local solve, ``restarts`` counts random starts
    on top of the deterministic seeds, ``polish`` caps Gauss-Newton endpoint
    corrections.
    """

    pieces: int = 16
    iterations: int = 200
    restarts: int = 16
    polish: int = 30
    seed: int = 0
    tol: float = DEFAULTS.endpoint

    def __post_init__(self):
        if self.pieces < 8:
            raise ValueError("pieces must be at least 8")
        for name in ("iterations", "restarts", "polish"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0 or self.tol <= 0:
            raise ValueError("seed must be >= 0 and tol > 0")


def cc_lower(p, q) -> float:
    """Planar distance of the projections; never exceeds ``d_c(p, q)``."""
    return math.hypot(float(p[0]) - float(q[0]), float(p[1]) - float(q[1]))


# --- endpoint map of constant-control pieces ------------------------------------------

def _endpoint(u: np.ndarray, dt: np.ndarray) -> tuple:
    """End of the curve from the origin with controls ``u`` (shape (..., K, 2)).

    Folding the group law over the pieces only needs exclusive prefix sums of
    x1 and x2, so the whole product is a handful of vectorized sums.
    """
    a = u[..., 0] * dt
    b = u[..., 1] * dt
    h3 = -a * b / 2
    h4 = a * a * b / 6
    h5 = a * b * b / 3
    X1 = np.cumsum(a, axis=-1) - a
    X2 = np.cumsum(b, axis=-1) - b
    return (
        a.sum(axis=-1),
        b.sum(axis=-1),
        (h3 - X1 * b).sum(axis=-1),
        (h4 - X1 * h3 + X1 * X1 * b / 2).sum(axis=-1),
        (h5 - X2 * h3 + X1 * X2 * b + X1 * b * b / 2).sum(axis=-1),
    )


def _endpoint_jacobian(u: np.ndarray, dt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint and its Jacobian (5, 2K) by complex-step differentiation.

    The endpoint is a real polynomial in the controls, so the imaginary part of
    a complex perturbation gives derivatives to working precision.
    """
    K = dt.size
    h = 1e-30
    batch = np.repeat(u[None, :, :].astype(complex), 2 * K, axis=0)
    idx = np.arange(2 * K)
    batch[idx, idx // 2, idx % 2] += 1j * h
    end = _endpoint(batch, dt)
    value = np.array([np.real(c[0]) if np.ndim(c) else float(np.real(c)) for c in end])
    jac = np.array([np.imag(c) / h if np.ndim(c) else np.zeros(2 * K) for c in end])
    return value, jac


def _polish(u: np.ndarray, dt: np.ndarray, g: np.ndarray, steps: int) -> np.ndarray:
    """Minimum-norm Gauss-Newton steps onto ``endpoint(u) = g``."""
    for _ in range(steps):
        value, jac = _endpoint_jacobian(u, dt)
        r = g - value
        if np.max(np.abs(r)) < 1e-15 * max(1.0, np.max(np.abs(g))):
            break
        step, *_ = np.linalg.lstsq(jac, r, rcond=None)
        u = u + step.reshape(u.shape)
    return u


def _optimize(u0: np.ndarray, dt: np.ndarray, g: np.ndarray, iterations: int) -> np.ndarray:
    """Minimize energy ``sum |u_k|^2 dt_k`` subject to reaching ``g``.

    With total time fixed, minimizing energy also minimizes length and gives
    constant speed, while staying smooth where controls vanish.
    """
    K = dt.size
    w = np.repeat(dt, 2)

    def energy(x):
        return float(np.dot(w, x * x)), 2 * w * x

    memo = {}

    def both(x):
        key = x.tobytes()
        if key not in memo:
            memo.clear()
            memo[key] = _endpoint_jacobian(x.reshape(K, 2), dt)
        return memo[key]

    def cons(x):
        return both(x)[0] - g

    def cons_jac(x):
        return both(x)[1]

    res = minimize(energy, u0.ravel(), jac=True, method="SLSQP",
                   constraints=[{"type": "eq", "fun": cons, "jac": cons_jac}],
                   options={"maxiter": iterations, "ftol": 1e-10})
    return res.x.reshape(K, 2)


# --- deterministic seeds --------------------------------------------------------------

def _signed_cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1 / 3), x)


def canonical_word(g) -> list[tuple[float, float, float]]:
    """Horizontal pieces ``(u1, u2, dt)`` reaching ``g`` from the origin.

    Follows the second-kind factorization: staircases for the central part,
    a commutator for x3, then straight moves along X2 and X1. Float cube and
    square roots make the endpoint approximate.
    """
    x1, x2, x3, x4, x5 = (float(c) for c in g)
    comm, f4, f5 = [], 0.0, 0.0
    if x3 != 0:
        lam = math.copysign(math.sqrt(abs(x3)), x3)
        comm = commutator_letters(Fraction(lam), Fraction(math.sqrt(abs(x3))))
        end = SegmentCurve(segments=tuple(comm)).end
        f4, f5 = float(end[3]), float(end[4])
    pieces = []
    for axis, c in (("x4", x4 - f4), ("x5", x5 - f5)):
        if c != 0:
            pieces.extend(_seg_piece(s) for s in staircase_letters(Fraction(_signed_cbrt(c)), axis))
    pieces.extend(_seg_piece(s) for s in comm)
    if x2 != 0:
        pieces.append((0.0, math.copysign(1.0, x2), abs(x2)))
    if x1 != 0:
        pieces.append((math.copysign(1.0, x1), 0.0, abs(x1)))
    return pieces


def _seg_piece(s) -> tuple[float, float, float]:
    u1, u2 = s.direction.unit()
    return (u1 * float(s.speed), u2 * float(s.speed), float(s.duration))


def _normalize(pieces) -> tuple[np.ndarray, np.ndarray]:
    """Reparameterize pieces to unit total time, keeping the path."""
    pieces = [p for p in pieces if p[2] > 0]
    T = sum(p[2] for p in pieces)
    dt = np.array([p[2] / T for p in pieces])
    u = np.array([[p[0] * T, p[1] * T] for p in pieces])
    return u, dt


# --- witness assembly -----------------------------------------------------------------

@dataclass
class CCResult:
    """Outcome of :func:`cc_upper`. ``value`` is ``inf`` when no witness was found."""

    value: float
    witness: PolygonalCurve | None
    residual: float
    lower: float
    candidates: int = 0
    log: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        from .algebra import format_rational

        wit = None
        if self.witness is not None:
            wit = {"start": [format_rational(c) for c in self.witness.start],
                   "pieces": [[repr(float(a)) for a in piece] for piece in self.witness.pieces]}
        return {"lower": self.lower, "upper": self.value if self.ok else None,
                "residual": self.residual, "witness": wit}


def _residual(witness: PolygonalCurve, q_exact: GroupPoint) -> tuple[float, GroupPoint]:
    r = mul(inv(witness.exact_end()), q_exact)
    return math.sqrt(sum(float(c) ** 2 for c in r)), r


def _pieces_from(u: np.ndarray, dt: np.ndarray) -> list[tuple[float, float, float]]:
    return [(float(a), float(b), float(t)) for (a, b), t in zip(u, dt) if t > 0 and (a or b)]


def _certify(p_exact, q_exact, pieces, tol) -> tuple[PolygonalCurve | None, float]:
    """Turn float pieces into a witness from ``p``; append correction words if needed."""
    pieces = list(pieces)
    for _ in range(3):
        wit = PolygonalCurve(p_exact, tuple(pieces))
        res, r = _residual(wit, q_exact)
        if res <= tol:
            return wit, res
        pieces.extend(canonical_word(r))
    wit = PolygonalCurve(p_exact, tuple(pieces))
    res, _ = _residual(wit, q_exact)
    return (wit, res) if res <= tol else (None, res)


def cc_upper(p, q, budget: DistanceBudget | None = None) -> CCResult:
    """Witnessed upper bound on ``d_c(p, q)``.

    Deterministic for a fixed budget. The returned value is the recomputed
    length of ``result.witness``, a horizontal polygonal curve from ``p`` whose
    exact endpoint is within ``budget.tol`` of ``q``.
    """
    budget = budget or DistanceBudget()
    p_exact, q_exact = GroupPoint(*p).exact(), GroupPoint(*q).exact()
    g_exact = mul(inv(p_exact), q_exact)
    g = np.array([float(c) for c in g_exact])
    lower = cc_lower(p, q)
    result = CCResult(math.inf, None, math.inf, lower)
    if not np.any(g):
        result.value, result.witness, result.residual = 0.0, PolygonalCurve(p_exact, ()), 0.0
        return result

    rng = np.random.default_rng(budget.seed)
    seeds = []
    straight = [(g[0], g[1], 1.0)] if (g[0] or g[1]) else []
    word = canonical_word(g)
    seeds.append(("word", *_normalize(word)))
    if straight and not np.any(g[2:]):
        seeds.append(("straight", *_normalize(straight)))
    scale = max(lower, float(np.max(np.abs(g[2:]))) ** (1 / 3), 1e-12)
    K = budget.pieces
    for i in range(budget.restarts):
        t = np.linspace(0, 2 * np.pi, K, endpoint=False)
        # low-frequency random loops around the straight path
        c = rng.normal(size=(4, 2)) * scale
        u = (g[:2][None, :] + c[0] * np.cos(t)[:, None] + c[1] * np.sin(t)[:, None]
             + c[2] * np.cos(2 * t)[:, None] + c[3] * np.sin(2 * t)[:, None])
        seeds.append((f"random{i}", u, np.full(K, 1.0 / K)))

    def optimized():
        for name, u0, dt in seeds:
            try:
                u = _optimize(u0, dt, g, budget.iterations)
                u = _polish(u, dt, g, budget.polish)
            except (np.linalg.LinAlgError, ValueError, FloatingPointError):
                continue
            if np.all(np.isfinite(u)):
                yield name, _pieces_from(u, dt)

    raw = [("word-raw", word)]
    if straight and not np.any(g[2:]):
        raw.append(("straight-raw", straight))
    best = None
    reach = 1e-6 * max(1.0, float(np.max(np.abs(g))))
    for name, pieces in itertools.chain(raw, optimized()):
        result.candidates += 1
        length = math.fsum(math.hypot(a, b) * t for a, b, t in pieces)
        # cheap float screening before the exact check
        u, dt = _normalize(pieces)
        if np.max(np.abs(np.array(_endpoint(u, dt)) - g)) > reach:
            result.log.append((name, length, "off-target"))
            continue
        if best is not None and length >= best[0]:
            result.log.append((name, length, "longer"))
            continue
        wit, res = _certify(p_exact, q_exact, pieces, budget.tol)
        result.log.append((name, length, "ok" if wit else "uncertified"))
        if wit is not None and (best is None or wit.length() < best[0]):
            best = (wit.length(), wit, res)
            # nothing can beat the planar lower bound
            if best[0] <= lower * (1 + 1e-12) + 1e-15:
                break
    if best is not None:
        result.value, result.witness, result.residual = best
    return result


def rescore(witness: PolygonalCurve, q) -> tuple[float, float]:
    """Length of a witness and the exact endpoint residual against ``q``."""
    res, _ = _residual(witness, GroupPoint(*q).exact())
    return witness.length(), res


# --- Euclidean control from a d_c bound ------------------------------------------------

def euclidean_from_cc(p, d) -> float:
    """Euclidean displacement reachable from ``p`` by a horizontal path of length ``d``.

    The speed of ``u1 X1 + u2 X2`` is at most ``|u| sqrt(|X1|^2 + |X2|^2)`` and the
    path's planar shadow stays within ``d`` of ``p``, which bounds ``x1, x2``
    in the frame.
    """
    d = float(d)
    a = abs(float(p[0])) + d
    b = abs(float(p[1])) + d
    x2_sq = 1 + a * a + a ** 4 / 4 + a * a * b * b
    return d * math.sqrt(1 + x2_sq)


# --- ball-box evidence ------------------------------------------------------------------

@dataclass
class BallBoxReport:
    samples: int
    kappa_ratio: float
    holder_ratio: float
    skipped: int
    worst_pair: tuple | None = None


def ball_box_scan(samples: int, radius: float = 1.0, budget: DistanceBudget | None = None,
                  seed: int = 0, pairs=None) -> BallBoxReport:
    """Empirical ``max |x-y| / cc_upper`` and ``max cc_lower / |x-y|^(1/3)``.

    Pairs are drawn sequentially from a seeded generator, so a longer scan
    extends a shorter one and both maxima can only grow with ``samples``.
    Pass ``pairs`` to scan given points instead.
    """
    budget = budget or DistanceBudget(restarts=4)
    if pairs is None:
        rng = np.random.default_rng(seed)
        pairs = []
        for _ in range(samples):
            pts = []
            for _ in range(2):
                v = rng.normal(size=5)
                v *= radius * rng.random() ** (1 / 5) / np.linalg.norm(v)
                pts.append(GroupPoint(*(float(c) for c in v)))
            pairs.append(tuple(pts))
    kappa_ratio = holder = 0.0
    skipped = 0
    worst = None
    for x, y in pairs[:samples] if samples else pairs:
        e = math.sqrt(sum((float(a) - float(b)) ** 2 for a, b in zip(x, y)))
        if e == 0:
            skipped += 1
            continue
        up = cc_upper(x, y, budget)
        if up.ok and up.value > 0 and e / up.value > kappa_ratio:
            kappa_ratio, worst = e / up.value, (x, y)
        holder = max(holder, cc_lower(x, y) / e ** (1 / 3))
    return BallBoxReport(samples, kappa_ratio, holder, skipped, worst)


def as_point(x) -> GroupPoint:
    return GroupPoint(*(to_fraction(c) for c in x))
