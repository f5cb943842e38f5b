# Witnessed upper bounds on the CC distance and the ball-box picture.
from cartan.ccmetric import DistanceBudget, ball_box_scan, cc_upper

budget = DistanceBudget(restarts=8)
origin = (0, 0, 0, 0, 0)
for target in [(1, 0, 0, 0, 0), (0, 0, 1, 0, 0), (0, 0, 0, 1, 0), (0, 0, 0, 0, 1)]:
    r = cc_upper(origin, target, budget)
    print(f"{target}: lower {r.lower:.4f}  upper {r.value:.4f}  "
          f"pieces {len(r.witness.pieces)}  residual {r.residual:.1e}")

# Scaling: d(0, exp(s^3 X4)) should shrink like s
for s in (1.0, 0.5, 0.25):
    r = cc_upper(origin, (0, 0, 0, s ** 3, 0), budget)
    print(f"s={s}: upper {r.value:.4f}  ratio {r.value / s:.4f}")

rep = ball_box_scan(10, radius=1.0, seed=3)
print(f"ball-box over 10 pairs: max |x-y|/d_c {rep.kappa_ratio:.3f}, "
      f"max d_lower/|x-y|^(1/3) {rep.holder_ratio:.3f}")
