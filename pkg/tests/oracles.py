"""Independent dense oracles built on sympy.

Modules are rebuilt here from their defining band formulas, without
touching the library, and quotients by powers of f are computed with
dense exact linear algebra on a large window.
"""

from __future__ import annotations

from sympy import QQ, Matrix, Rational, eye, roots, symbols, zeros
from sympy.polys.matrices import DomainMatrix

x = symbols("x")


def ktype_operators(lam, points):
    """Dense e, f, h on span{v_n : n in points} for the band formulas
    Hc v_n = n v_n, X+- v_n = ((lam + 1 +- n)/2) v_{n+-2}."""
    lam = Rational(lam)
    pos = {n: i for i, n in enumerate(points)}
    N = len(points)
    Hc, Xp, Xm = zeros(N, N), zeros(N, N), zeros(N, N)
    for n, j in pos.items():
        Hc[j, j] = n
        if n + 2 in pos:
            Xp[pos[n + 2], j] = (lam + 1 + n) / 2
        if n - 2 in pos:
            Xm[pos[n - 2], j] = (lam + 1 - n) / 2
    e = (Hc - Xp + Xm) / 2
    f = (Hc + Xp - Xm) / 2
    h = Xp + Xm
    return e, f, h


def weight_operators(m):
    """finite_dim(m): h u_j = (m-2j) u_j, f u_j = u_{j+1}, e u_j = j(m-j+1) u_{j-1}."""
    N = m + 1
    e, f, h = zeros(N, N), zeros(N, N), zeros(N, N)
    for j in range(N):
        h[j, j] = m - 2 * j
        if j + 1 < N:
            f[j + 1, j] = 1
        if j >= 1:
            e[j - 1, j] = j * (m - j + 1)
    return e, f, h


def lattice(kind, arg, radius):
    """Window points of a catalog model: ('ps', (lam, parity)), ('ds', l)."""
    if kind == "ps":
        lam, parity = arg
        return Rational(lam), [n for n in range(-radius, radius + 1) if (n - parity) % 2 == 0]
    if kind == "ds":
        l = arg
        pts = list(range(abs(l), abs(l) + radius + 1, 2))
        return Rational(abs(l) - 1), (pts if l > 0 else [-n for n in reversed(pts)])
    raise ValueError(kind)


def quotient_oracle(kind, arg, k, radius=40):
    """(dim, h charpoly as sympy Poly) of M / f^k M.

    Columns of f^k are kept only for basis vectors whose image stays
    inside the window; the quotient is read on the central half of the
    window, which spans it once the window is large enough.
    """
    if kind == "fd":
        e, f, h = weight_operators(arg)
        pts = list(range(arg + 1))
        central = list(range(len(pts)))
        Fk = f ** k
        cols = [Fk[:, j] for j in range(len(pts))]
    else:
        lam, pts = lattice(kind, arg, radius)
        e, f, h = ktype_operators(lam, pts)
        Fk = f ** k
        N = len(pts)
        lo_open = kind == "ps" or arg < 0
        hi_open = kind == "ps" or arg > 0
        # the truncated f^k is exact on columns at least k steps from an open edge
        keep = [j for j in range(N) if (not lo_open or j >= k) and (not hi_open or j < N - k)]
        cols = [Fk[:, j] for j in keep]
        half = radius // 2
        central = [i for i, n in enumerate(pts) if abs(n) <= half]
    N = len(pts)
    I = eye(N)
    R = Matrix.hstack(*cols) if cols else zeros(N, 0)
    nrel = R.cols
    # representatives: central unit vectors independent modulo the relations
    _, pivots = _qq(Matrix.hstack(R, *[I[:, i] for i in central])).rref()
    basis = [central[p - nrel] for p in pivots if p >= nrel]
    dim = len(basis)
    # h on the representatives, reduced modulo the relations
    B = [I[:, i] for i in basis]
    targets = [h[:, i] for i in basis]
    reduced, _ = _qq(Matrix.hstack(*B, R, *targets)).rref()
    reduced = reduced.to_Matrix()
    H = Matrix(dim, dim, lambda r, c: reduced[r, dim + nrel + c])
    return dim, H.charpoly(x)


def _qq(M):
    return DomainMatrix.from_Matrix(M).convert_to(QQ)


def rational_root_multiset(poly):
    """{root: multiplicity} of a sympy Poly, rational roots only."""
    return {Rational(r): m for r, m in roots(poly, filter="Q").items()}
