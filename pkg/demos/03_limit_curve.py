# gamma_1, gamma_2, gamma_3: sequence arithmetic and lazy evaluation.
import random
import time
from fractions import Fraction as F

from cartan.limitcurve import (CurveAddress, derivative_probe, direction, eval_gamma, level_params,
                               step_bound, tail_bound)

for n in range(1, 5):
    p = level_params(n)
    print(f"n={n}  lam={p.lam}  N has {p.N.bit_length()} bits")
print("N_2 =", level_params(2).N)

print("gamma_2(6/17) =", eval_gamma(2, F(6, 17)))

# Level 3 has ~1e33 cells; a point only needs the chain of cells above it
rng = random.Random(0)
ts = [F(rng.randint(0, 10 ** 12), 10 ** 12) for _ in range(200)]
t0 = time.perf_counter()
pts = [eval_gamma(3, t) for t in ts]
print(f"200 level-3 points in {time.perf_counter() - t0:.3f}s")
gap = max(max(abs(float(a - b)) for a, b in zip(eval_gamma(2, t), p)) for t, p in zip(ts, pts))
print(f"max |gamma_3 - gamma_2| = {gap:.3e}, step bound {float(step_bound(2)):.3e}, "
      f"tail bound {float(tail_bound(2)):.3e}")

addr = CurveAddress.containing(3, ts[0])
print("cell", addr.j, "of level 3 moves along", direction(addr))

probe = derivative_probe(2, F(1, 34))
print("velocity at 1/34:", probe.quotient, "expected", probe.expected)
