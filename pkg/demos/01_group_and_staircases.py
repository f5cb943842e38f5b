# Group law and staircases, worked by hand in exact arithmetic.
from fractions import Fraction as F

from cartan.algebra import X1, X2, bch3, exp_horizontal, inv, mul, mul_via_bch
from cartan.staircase import commutator_word, staircase

# Points are (x1, ..., x5) in second-kind coordinates. Ints become Fractions.
p = (1, 2, 3, 4, 5)
q = (6, 7, 8, 9, 10)
print("p * q       =", mul(p, q))
print("via BCH     =", mul_via_bch(p, q))
print("p * p^-1    =", mul(p, inv(p)))

# The step-3 BCH series of the two generators
print("bch3(X2,X1) =", bch3(X2, X1))

# A horizontal straight line exp(aX1 + bX2) already climbs in x3..x5
print("exp(2X1+3X2)=", exp_horizontal(2, 3))

# One commutator loop reaches x3, the staircases reach pure x4 or x5
print("F(1,1) ends :", commutator_word(1, 1).end)
lam = F(1, 2)
for axis in ("x4", "x5"):
    c = staircase(lam, axis)
    print(f"staircase {axis}: {[d.value for d in c.letters()]}")
    print(f"   end {tuple(str(v) for v in c.end)}  length {c.length()}")
