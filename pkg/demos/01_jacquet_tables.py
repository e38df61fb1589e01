"""Jacquet modules of a few catalog modules, printed as eigenvalue tables.

Run: python demos/01_jacquet_tables.py
"""

from jacquetlab import jacquet_module, structure_report
from jacquetlab.hcmod import discrete_series, finite_dim, principal_series
from jacquetlab.scalar import Rational


def show(M, depth=6):
    r = structure_report(jacquet_module(M, depth))
    print(f"\n{M.label}: seed {[s for s, _ in r['seed']]}, {r['chain_count']} chain(s), "
          f"Verma pattern {r['verma_pattern']}")
    for e in r["eigenvalues"]:
        print(f"  h = {e['value']:>6}  dim {e['dim']}  nilpotency {e['nilpotency']}  "
              f"stable from depth {e['stab_depth']}")


# A finite-dimensional module is already complete, so J returns it unchanged.
show(finite_dim(2))

# An irreducible principal series: two multiplicity-one chains rooted at
# lambda - 1 and -lambda - 1, and h acts semisimply.
show(principal_series(Rational(1, 2), 0))

# A discrete series gives a single chain with f injective: the Verma pattern.
show(discrete_series(2))
