# The overpass that replaces one straight segment: layout, height and deviation.
from fractions import Fraction as F

from cartan.ccmetric import DistanceBudget
from cartan.modification import ModificationSpec, build, deviation_check, verify_structure

spec = ModificationSpec(a=0, b=1, lam=1, Q=5, variant="alpha+")
print("lam' =", spec.lam_prime, " mu =", spec.mu, " delta =", spec.delta)

curve = build(spec)
# 19 segments, all at speed lam'
for k, (seg, t) in enumerate(zip(curve.segments, curve.times)):
    print(f"{k:2d}  t={str(t):>6}  {seg.direction.value}  dt={seg.duration}")

# After the up staircase the curve sits exactly mu^3 above the x1 axis
print("rho(6/17) =", curve(F(6, 17)))
print("end       =", curve.end, " length", curve.length())

rep = verify_structure(spec, 8 * spec.pieces)
print("structure ok:", rep.passed, "over", rep.cells_checked, "cells")

# Distance to the unmodified segment: exact chain plus a numerical witness
budget = DistanceBudget(restarts=4)
for t in (F(1, 5), F(6, 17), F(1, 2), F(9, 10)):
    d = deviation_check(spec, t, budget=budget)
    print(f"t={t}: phase {d.phase}, exact bound {float(d.proof_bound):.4f}, "
          f"witness {d.cc_upper:.4f} <= {float(d.bound)}")
