"""Invariant suites run by ``cartan verify``.

Each suite is a small, seeded, exact-where-possible replay of the library's
invariants. Sizes are kept modest so the whole run takes seconds; the test
suite exercises the same properties at full scale.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import algebra, curves, limitcurve, modification, staircase


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "seconds": round(self.seconds, 3)}


def _rat(rng: random.Random, scale: int = 50) -> Fraction:
    return Fraction(rng.randint(-scale * 7, scale * 7), rng.randint(1, scale))


def _point(rng: random.Random) -> algebra.GroupPoint:
    return algebra.GroupPoint(*(_rat(rng) for _ in range(5)))


def suite_algebra(rng, level, kappa):
    X1, X2 = algebra.X1, algebra.X2
    F = Fraction
    ok = algebra.bch3(X2, X1) == algebra.AlgebraElement(F(1), F(1), F(1, 2), F(1, 12), F(-1, 12))
    bad = 0
    for _ in range(200):
        p, q = _point(rng), _point(rng)
        bad += algebra.mul(p, q) != algebra.mul_via_bch(p, q)
    for _ in range(100):
        p, q, r = _point(rng), _point(rng), _point(rng)
        bad += algebra.mul(algebra.mul(p, q), r) != algebra.mul(p, algebra.mul(q, r))
        bad += algebra.mul(p, algebra.inv(p)) != algebra.IDENTITY
    return ok and not bad, f"bch identity {'ok' if ok else 'WRONG'}; {bad} law mismatches"


def suite_staircase(rng, level, kappa):
    bad = 0
    for _ in range(100):
        lam = _rat(rng, 20)
        for axis in staircase.AXES:
            c = staircase.staircase(lam, axis)
            bad += c.end != staircase.staircase_target(lam, axis) or c.length() != 8 * abs(lam)
    return not bad, f"{bad} endpoint/length mismatches over 200 staircases"


def _random_spec(rng) -> modification.ModificationSpec:
    a = Fraction(rng.randint(0, 50), 100)
    L = Fraction(rng.randint(1, 100), 100) * (1 - a) or Fraction(1, 100)
    lam = 1 + Fraction(rng.randint(0, 49), 100)
    Q = rng.choice([5, 6, 7, 10, 25])
    variant = rng.choice(list(modification.Variant))
    return modification.ModificationSpec(a, a + L, lam, Q, variant)


def suite_modification(rng, level, kappa):
    bad = 0
    for _ in range(20):
        spec = _random_spec(rng)
        rep = modification.verify_structure(spec, 8 * spec.pieces)
        bad += not rep.passed
        for _ in range(5):
            t = spec.a + spec.L * Fraction(rng.randint(0, 1000), 1000)
            bad += not modification.deviation_check(spec, t).exact_ok
    return not bad, f"{bad} failures over 20 specs (structure + exact deviation chains)"


def suite_sequences(rng, level, kappa):
    top = max(level, 6)
    p = [limitcurve.level_params(n, kappa) for n in range(1, top + 1)]
    ok = all(1 <= q.lam < Fraction(3, 2) for q in p)
    if kappa == 1:
        ok &= p[1].lam == Fraction(17, 15) and p[1].N == 2_350_080_000
    tails = [limitcurve.tail_bound(n, kappa) for n in range(1, top)]
    ok &= all(b < a for a, b in zip(tails, tails[1:]))
    return ok, f"levels 1..{top}: lambda bounds, N recurrence, tail bounds decreasing"


def suite_limitcurve(rng, level, kappa):
    F = Fraction
    checks = []
    if kappa == 1:
        checks.append(limitcurve.eval_gamma(2, F(6, 17)) == algebra.GroupPoint(F(1, 3), 0, 0, 0, F(1, 120) ** 3))
    checks.append(all(limitcurve.eval_gamma(n, 0, kappa) == algebra.IDENTITY for n in range(1, level + 1)))
    for n in range(1, min(level, 2) + 1):
        checks.append(limitcurve.letter_grid_check(n, kappa))
    if level >= 3:
        N = limitcurve.level_params(3, kappa).N
        cells = [limitcurve.CurveAddress(3, rng.randint(1, N), kappa) for _ in range(100)]
        checks.append(all(limitcurve.cell_check(c) for c in cells))
    n = min(level, 3)
    ts = [F(rng.randint(0, 10 ** 9), 10 ** 9) for _ in range(20)]
    checks.append(all(limitcurve.eval_gamma(n, t, kappa) == limitcurve.eval_gamma(n, t, kappa, cache=False)
                      for t in ts))
    return all(checks), f"{sum(checks)}/{len(checks)} checks (values, cells, memo transparency)"


def suite_heights(rng, level, kappa):
    nrng = np.random.default_rng(rng.randint(0, 2 ** 31))
    grid = np.linspace(0, 1, 401)
    bad = 0
    for _ in range(100):
        c = nrng.normal(size=(2, 3))
        s1, s2 = nrng.choice([-1, 1], size=2)

        def controls(t, c=c, s1=s1, s2=s2):
            t = np.asarray(t, dtype=float)
            return (s1 * (c[0, 0] ** 2 + c[0, 1] ** 2 * np.sin(3 * t) ** 2),
                    s2 * (c[1, 0] ** 2 + c[1, 1] ** 2 * np.cos(2 * t + c[1, 2]) ** 2))

        cc = curves.control_curve(grid, controls)
        bad += curves.height_change_check(cc, 0.0, 1.0).falsified
    return not bad, f"{bad} falsifications over 100 sign-constrained lifts"


SUITES = {
    "algebra": suite_algebra,
    "staircase": suite_staircase,
    "modification": suite_modification,
    "sequences": suite_sequences,
    "limitcurve": suite_limitcurve,
    "heights": suite_heights,
}


def run_all(level: int = 2, kappa: int = 1, seed: int = 0, only=None) -> list[SuiteResult]:
    out = []
    for name, fn in SUITES.items():
        if only and name not in only:
            continue
        rng = random.Random(f"{seed}:{name}")
        t0 = time.perf_counter()
        try:
            ok, detail = fn(rng, level, kappa)
        except Exception as exc:  # a crash is a failed suite, reported not raised
            ok, detail = False, f"error: {exc!r}"
        out.append(SuiteResult(name, bool(ok), detail, time.perf_counter() - t0))
    return out
