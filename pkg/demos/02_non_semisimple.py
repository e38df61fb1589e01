"""At a positive integer lambda one principal series carries Jordan blocks for h.

Run: python demos/02_non_semisimple.py
"""

from jacquetlab import jacquet_module
from jacquetlab.hcmod import principal_series
from jacquetlab.exactlinalg import format_rational, jordan_profile
from jacquetlab.scalar import Rational

for lam in (1, 2):
    for parity in (0, 1):
        M = principal_series(Rational(lam), parity)
        J = jacquet_module(M, 6)
        jordan = [format_rational(s.eigenvalue) for s in J.spaces if s.nilpotency_order > 1]
        verdict = f"Jordan blocks at {', '.join(jordan)}" if jordan else "h semisimple"
        print(f"{M.label:>9}: dims {[s.dimension for s in J.spaces]}  {verdict}")

# Ranks of (h - a)^j on the top Jordan eigenspace: (1, 0) means one 2x2 block.
J = jacquet_module(principal_series(Rational(1), 1), 6)
top = next(s.eigenvalue for s in J.spaces if s.nilpotency_order > 1)
print(f"\nranks of (h - a)^j at a = {format_rational(top)} in J(ps(1,1)):",
      jordan_profile(J.h_blocks[top], top))
