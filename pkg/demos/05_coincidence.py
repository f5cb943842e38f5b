# How much of a C^1 horizontal curve can coincide with the overpass?
from cartan.modification import ModificationSpec
from cartan.overlaplab import C1HFamilySpec, badintersect_harness, bypass, lusin_experiment

spec = ModificationSpec(0, 1, 1, 5, "alpha+")

# The bypass follows both outer straight phases and skips the staircases
w = 1e-3
print("bypass prediction 10/17 - 2w =", 10 / 17 - 2 * w, "  label:", bypass(spec, w).label)

family = C1HFamilySpec(count=30, seed=0)
rep = badintersect_harness(spec, family, grid=20_000)
print(f"max coincidence {rep.max_coincidence:.4f} (limit {rep.limit}), worst {rep.worst.kind}")
for r in sorted(rep.results, key=lambda r: -r.coincidence)[:5]:
    print(f"  #{r.ident:<3} {r.kind:<9} {r.coincidence:.4f}  {r.flags}")

# The same family against gamma_1, gamma_2, gamma_3 on one grid
table = lusin_experiment([1, 2, 3], C1HFamilySpec(count=20, seed=7, include_gamma1=True), grid=2000)
print(table.to_csv())
