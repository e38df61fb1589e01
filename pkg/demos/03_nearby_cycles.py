"""Nearby cycles on the Laurent model, and the comparison with the Jacquet module.

The sign conventions of the twisted action are not fixed a priori; the
library pins them by testing all four choices on finite_dim(2).

Run: python demos/03_nearby_cycles.py
"""

from jacquetlab import nearby_cycles, theorem1_compare, vfilt
from jacquetlab.exactlinalg import format_rational
from jacquetlab.hcmod import catalog_modules
from jacquetlab.scalar import Rational

print("convention experiment on finite_dim(2):")
for key in vfilt.CONVENTIONS:
    r = vfilt.convention_report(key)
    print(f"  {key}: (V2) {r['v2']!s:5}  decreasing {r['decreasing']!s:5}  "
          f"stable {r['stable']!s:5}  -> {'pinned' if r['ok'] else 'rejected'}")

for lam in ("1/2", "3/5"):
    for M in catalog_modules(Rational(lam)):
        N = nearby_cycles(M, 6)
        R = theorem1_compare(M, 6)
        reps = ", ".join(format_rational(a) for a in N.representatives)
        print(f"\n{M.label}: cosets {{{reps}}}, tables agree: {R.ok}")
        for g, (dim, nil) in list(N.table.items())[:4]:
            print(f"  graded piece at {format_rational(g):>6}: dim {dim}, nilpotency {nil}")
