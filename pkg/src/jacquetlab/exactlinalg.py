"""Exact linear algebra over the rationals.

Vectors are sparse ``dict[int, Rational]`` maps with no stored zeros.
Subspaces are kept in reduced echelon form, which doubles as the
normal-form machinery for quotients: reducing a vector against the
echelon rows of a subspace ``U`` gives a canonical representative of its
class in ``V / U``.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Mapping, Sequence

from .scalar import Rational

SparseVector = dict


class IncompleteSpectrum(ArithmeticError):
    """Primary components do not exhaust the space."""


class NotNilpotentOnSubspace(ArithmeticError):
    """``A - alpha`` is not nilpotent on the given subspace."""


def as_rational(value) -> Rational:
    """Parse ints, exact rationals and ``"p/q"`` strings."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, numbers.Rational):
        return Rational(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE "):
            raise ValueError(f"not a rational literal: {value!r}")
        return Rational(text)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(q) -> str:
    q = Rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# sparse vectors

def vec_clean(v: Mapping) -> dict:
    return {k: c for k, c in v.items() if c}


def vec_axpy(y: dict, a, x: Mapping) -> None:
    """In place ``y += a * x`` dropping zeros."""
    if not a:
        return
    for k, c in x.items():
        s = y.get(k, 0) + a * c
        if s:
            y[k] = s
        else:
            y.pop(k, None)


def vec_scale(a, x: Mapping) -> dict:
    if not a:
        return {}
    return {k: a * c for k, c in x.items()}


def vec_add(x: Mapping, y: Mapping) -> dict:
    out = dict(x)
    vec_axpy(out, 1, y)
    return out


# ---------------------------------------------------------------------------
# matrices

class ExactMatrix:
    """Sparse rational matrix with fixed shape.

    ``entries`` maps ``(row, col)`` to a nonzero Rational.
    """

    __slots__ = ("rows", "cols", "_entries", "_colmap")

    def __init__(self, rows: int, cols: int, entries: Mapping | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        self.rows = rows
        self.cols = cols
        clean = {}
        for (r, c), x in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry {(r, c)} outside {rows}x{cols}")
            x = Rational(x)
            if x:
                clean[(r, c)] = x
        self._entries = clean
        self._colmap = None

    # -- constructors
    @classmethod
    def zero(cls, rows: int, cols: int | None = None) -> "ExactMatrix":
        return cls(rows, rows if cols is None else cols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "ExactMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, x in enumerate(row):
                if x:
                    ent[(i, j)] = as_rational(x) if isinstance(x, str) else Rational(x)
        return cls(rows, cols, ent)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping]) -> "ExactMatrix":
        ent = {}
        for j, col in enumerate(columns):
            for i, x in col.items():
                ent[(i, j)] = x
        return cls(rows, len(columns), ent)

    @classmethod
    def diagonal(cls, values: Sequence) -> "ExactMatrix":
        return cls(len(values), len(values), {(i, i): v for i, v in enumerate(values)})

    # -- access
    @property
    def entries(self) -> dict:
        return dict(self._entries)

    def __getitem__(self, rc) -> Rational:
        return self._entries.get(rc, Rational(0))

    def nnz(self) -> int:
        return len(self._entries)

    def to_dense(self) -> list[list[Rational]]:
        out = [[Rational(0)] * self.cols for _ in range(self.rows)]
        for (r, c), x in self._entries.items():
            out[r][c] = x
        return out

    def _columns(self) -> list[dict]:
        if self._colmap is None:
            cols = [dict() for _ in range(self.cols)]
            for (r, c), x in self._entries.items():
                cols[c][r] = x
            self._colmap = cols
        return self._colmap

    def column(self, j: int) -> dict:
        return dict(self._columns()[j])

    def row_vectors(self) -> list[dict]:
        rows = [dict() for _ in range(self.rows)]
        for (r, c), x in self._entries.items():
            rows[r][c] = x
        return rows

    def is_square(self) -> bool:
        return self.rows == self.cols

    # -- arithmetic
    def apply(self, v: Mapping) -> dict:
        cols = self._columns()
        out: dict = {}
        for j, x in v.items():
            if x:
                vec_axpy(out, x, cols[j])
        return out

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = [self.apply(c) for c in other._columns()]
        return ExactMatrix.from_columns(self.rows, cols)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_shape(other)
        ent = dict(self._entries)
        for k, x in other._entries.items():
            ent[k] = ent.get(k, 0) + x
        return ExactMatrix(self.rows, self.cols, ent)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + other.scale(-1)

    def __neg__(self) -> "ExactMatrix":
        return self.scale(-1)

    def scale(self, a) -> "ExactMatrix":
        a = Rational(a)
        return ExactMatrix(self.rows, self.cols, {k: a * x for k, x in self._entries.items()})

    def shift(self, a) -> "ExactMatrix":
        """``self - a * I``."""
        if not self.is_square():
            raise ValueError("shift needs a square matrix")
        return self - ExactMatrix.identity(self.rows).scale(a)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, {(c, r): x for (r, c), x in self._entries.items()})

    def __pow__(self, k: int) -> "ExactMatrix":
        if not self.is_square() or k < 0:
            raise ValueError("power needs a square matrix and k >= 0")
        result = ExactMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return not self._entries

    def _check_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols, self._entries) == (other.rows, other.cols, other._entries)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={len(self._entries)})"

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[r, c, format_rational(x)] for (r, c), x in sorted(self._entries.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ExactMatrix":
        return cls(data["rows"], data["cols"],
                   {(r, c): as_rational(x) for r, c, x in data["entries"]})


# ---------------------------------------------------------------------------
# echelon subspaces

class SubspaceBasis:
    """A subspace of ``Q^ambient`` held in reduced echelon form.

    ``order`` fixes the pivot preference: among the coordinates present in
    a new row, the one appearing earliest in ``order`` becomes its pivot.
    The default is ascending index.  Every stored row has a 1 at its pivot
    and zeros at all other pivot coordinates.
    """

    def __init__(self, ambient: int, order: Sequence[int] | None = None):
        self.ambient = ambient
        if order is None:
            self._rank_of = None
        else:
            if sorted(order) != list(range(ambient)):
                raise ValueError("order must be a permutation of the coordinates")
            self._rank_of = {c: i for i, c in enumerate(order)}
        self._rows: dict[int, dict] = {}
        # coordinate -> pivots whose rows mention it (off-pivot)
        self._users: dict[int, set] = {}

    @classmethod
    def span(cls, vectors: Iterable[Mapping], ambient: int,
             order: Sequence[int] | None = None) -> "SubspaceBasis":
        sb = cls(ambient, order)
        for v in vectors:
            sb.insert(v)
        return sb

    def _key(self, c: int):
        return c if self._rank_of is None else self._rank_of[c]

    def copy(self) -> "SubspaceBasis":
        other = SubspaceBasis.__new__(SubspaceBasis)
        other.ambient = self.ambient
        other._rank_of = self._rank_of
        other._rows = {p: dict(r) for p, r in self._rows.items()}
        other._users = {c: set(s) for c, s in self._users.items()}
        return other

    def reduce(self, v: Mapping) -> dict:
        """Normal form of ``v`` modulo this subspace."""
        out = dict(v)
        rows = self._rows
        for p in [c for c in out if c in rows]:
            a = out.get(p)
            if a:
                vec_axpy(out, -a, rows[p])
        return out

    def insert(self, v: Mapping) -> bool:
        """Add ``v`` to the span; return True if the dimension grew."""
        r = self.reduce(v)
        if not r:
            return False
        p = min(r, key=self._key)
        inv = 1 / r[p]
        r = {c: x * inv for c, x in r.items()}
        # clear the new pivot from existing rows
        for q in list(self._users.get(p, ())):
            row = self._rows[q]
            a = row.get(p)
            if a:
                vec_axpy(row, -a, r)
                for c in r:
                    if c == p:
                        continue
                    if c in row:
                        self._users.setdefault(c, set()).add(q)
                    else:
                        users = self._users.get(c)
                        if users is not None:
                            users.discard(q)
        self._users.pop(p, None)
        self._rows[p] = r
        for c in r:
            if c != p:
                self._users.setdefault(c, set()).add(p)
        return True

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)

    @property
    def dim(self) -> int:
        return len(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self._rows, key=self._key)

    def vectors(self) -> list[dict]:
        return [dict(self._rows[p]) for p in self.pivots]

    def row(self, pivot: int) -> dict:
        return self._rows[pivot]

    def complement_coordinates(self) -> list[int]:
        """Coordinates that are not pivots, ascending in the pivot order."""
        rows = self._rows
        return sorted((c for c in range(self.ambient) if c not in rows), key=self._key)

    def issubspace(self, other: "SubspaceBasis") -> bool:
        return all(other.contains(v) for v in self.vectors())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubspaceBasis):
            return NotImplemented
        return (self.ambient == other.ambient and self.dim == other.dim
                and self.issubspace(other))

    def __repr__(self) -> str:
        return f"SubspaceBasis(dim={self.dim}, ambient={self.ambient})"


def rank(A: ExactMatrix) -> int:
    return SubspaceBasis.span(A.row_vectors(), A.cols).dim


def kernel_cokernel(A: ExactMatrix, order: Sequence[int] | None = None):
    """Return ``(kernel, cokernel)`` of ``A`` as SubspaceBasis objects.

    The kernel lives in the domain.  The cokernel is represented by the
    unit vectors of the target that are not pivots of the column space,
    so its basis is itself in echelon form.
    """
    rowspace = SubspaceBasis.span(A.row_vectors(), A.cols, order)
    kernel = SubspaceBasis(A.cols)
    for j in rowspace.complement_coordinates():
        v = {j: Rational(1)}
        for p in rowspace.pivots:
            x = rowspace.row(p).get(j)
            if x:
                v[p] = -x
        kernel.insert(v)
    colspace = SubspaceBasis.span([A.column(j) for j in range(A.cols)], A.rows)
    cokernel = SubspaceBasis(A.rows)
    for i in colspace.complement_coordinates():
        cokernel.insert({i: Rational(1)})
    return kernel, cokernel


def solve(A: ExactMatrix, b: Mapping) -> dict | None:
    """A particular solution of ``A x = b`` or None."""
    n = A.cols
    rows = A.row_vectors()
    extended = []
    for i, row in enumerate(rows):
        r = dict(row)
        if b.get(i):
            r[n] = Rational(b[i])
        extended.append(r)
    for i in b:
        if i >= A.rows:
            raise IndexError("rhs outside target")
    sb = SubspaceBasis.span(extended, n + 1)
    if n in sb._rows:
        return None
    x = {}
    for p, row in sb._rows.items():
        val = row.get(n, 0)
        if val:
            x[p] = val
    return x


# ---------------------------------------------------------------------------
# polynomials (coefficient lists, constant term first)

def poly_trim(p: Sequence) -> list[Rational]:
    out = [Rational(c) for c in p]
    while out and not out[-1]:
        out.pop()
    return out


def poly_mul(p: Sequence, q: Sequence) -> list[Rational]:
    if not p or not q:
        return []
    out = [Rational(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_eval(p: Sequence, x) -> Rational:
    acc = Rational(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_divide_linear(p: Sequence, r) -> list[Rational]:
    """Quotient of ``p`` by ``x - r``; assumes ``r`` is a root."""
    n = len(p) - 1
    q = [Rational(0)] * n
    carry = Rational(0)
    for i in range(n, 0, -1):
        carry = carry * r + p[i]
        q[i - 1] = carry
    return q


def charpoly(A: ExactMatrix) -> list[Rational]:
    """Characteristic polynomial ``det(x I - A)`` by Faddeev-LeVerrier."""
    n = A.rows
    if not A.is_square():
        raise ValueError("charpoly needs a square matrix")
    coeffs = [Rational(0)] * (n + 1)
    coeffs[n] = Rational(1)
    M = ExactMatrix.zero(n)
    ident = ExactMatrix.identity(n)
    for k in range(1, n + 1):
        M = A @ M + ident.scale(coeffs[n - k + 1])
        AM = A @ M
        trace = sum((AM[(i, i)] for i in range(n)), Rational(0))
        coeffs[n - k] = -trace / k
    return coeffs


def _factor(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in _factor(n).items():
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def _int_poly_vanishes(ints: Sequence[int], a: int, b: int) -> bool:
    """Does the integer polynomial vanish at a/b (homogenized, no fractions)?"""
    n = len(ints) - 1
    acc = 0
    apow, bpow = 1, b ** n
    for c in ints:
        acc += c * apow * bpow
        apow *= a
        bpow //= b
    return acc == 0


def rational_roots(p: Sequence) -> list[tuple[Rational, int]]:
    """All rational roots of ``p`` with multiplicities, ascending.

    ``p`` is a coefficient list with the constant term first.
    """
    p = poly_trim(p)
    if not p:
        raise ValueError("zero polynomial")
    roots: list[tuple[Rational, int]] = []
    zero_mult = 0
    while len(p) > 1 and not p[0]:
        p = p[1:]
        zero_mult += 1
    if zero_mult:
        roots.append((Rational(0), zero_mult))

    def integral(poly):
        den = 1
        for c in poly:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in poly]
        g = 0
        for c in ints:
            g = gcd(g, c)
        return [c // g for c in ints]

    if len(p) > 1:
        ints = integral(p)
        bound = 2 + max(abs(c) for c in ints[:-1]) // abs(ints[-1])
        lead_divs = _divisors(ints[-1])
        candidates = set()
        for a in _divisors(ints[0]):
            for b in lead_divs:
                if a <= bound * b and gcd(a, b) == 1:
                    candidates.add((a, b))
                    candidates.add((-a, b))
        for a, b in candidates:
            if len(ints) == 1:
                break
            if not _int_poly_vanishes(ints, a, b):
                continue
            r = Rational(a, b)
            mult = 0
            while len(p) > 1 and not poly_eval(p, r):
                p = poly_divide_linear(p, r)
                mult += 1
            roots.append((r, mult))
            ints = integral(p)
    return sorted(roots)


# ---------------------------------------------------------------------------
# primary decomposition

@dataclass(frozen=True)
class PrimaryComponent:
    eigenvalue: Rational
    dimension: int
    nilpotency_order: int
    basis: SubspaceBasis = field(compare=False)

    def vectors(self) -> list[dict]:
        return self.basis.vectors()


def _power_kernel(B: ExactMatrix, n: int) -> SubspaceBasis:
    kernel, _ = kernel_cokernel(B ** n)
    return kernel


def nilpotency_order(A: ExactMatrix, alpha, V: SubspaceBasis | None = None) -> int:
    """Smallest ``d >= 1`` with ``(A - alpha)^d V = 0``."""
    alpha = Rational(alpha)
    B = A.shift(alpha)
    vecs = V.vectors() if V is not None else [{i: Rational(1)} for i in range(A.rows)]
    if not vecs:
        return 1
    bound = len(vecs)
    for d in range(1, bound + 1):
        vecs = [B.apply(v) for v in vecs]
        if all(not v for v in vecs):
            return d
    raise NotNilpotentOnSubspace(
        f"A - {format_rational(alpha)} is not nilpotent on a {bound}-dimensional subspace")


def primary_decomposition(A: ExactMatrix, candidates: Iterable) -> list[PrimaryComponent]:
    """Generalized eigenspaces of ``A`` for the candidate eigenvalues.

    Raises IncompleteSpectrum when the candidates do not account for the
    whole space (an eigenvalue outside the set, or an irrational one).
    """
    if not A.is_square():
        raise ValueError("primary decomposition needs a square matrix")
    n = A.rows
    comps = []
    total = 0
    for alpha in sorted({Rational(c) for c in candidates}, reverse=True):
        if total == n:
            break
        K = _power_kernel(A.shift(alpha), n) if n else SubspaceBasis(0)
        if K.dim:
            d = nilpotency_order(A, alpha, K)
            comps.append(PrimaryComponent(alpha, K.dim, d, K))
            total += K.dim
    if total != n:
        raise IncompleteSpectrum(
            f"components cover {total} of {n} dimensions for candidates "
            f"{sorted(format_rational(c) for c in set(map(Rational, candidates)))}")
    return comps


def jordan_profile(A: ExactMatrix, alpha) -> tuple[int, ...]:
    """Ranks of ``(A - alpha)^j`` for ``j = 1..n``; a similarity invariant."""
    B = A.shift(alpha)
    out = []
    P = ExactMatrix.identity(A.rows)
    for _ in range(A.rows):
        P = P @ B
        out.append(rank(P))
        if out[-1] == 0 or (len(out) > 1 and out[-1] == out[-2]):
            break
    return tuple(out)


def basis_change(vectors: Sequence[Mapping], ambient: int) -> ExactMatrix:
    """Inverse of the matrix whose columns are ``vectors`` (a full basis)."""
    P = ExactMatrix.from_columns(ambient, list(vectors))
    if P.cols != ambient:
        raise ValueError("need a full basis")
    inv_cols = []
    for i in range(ambient):
        x = solve(P, {i: Rational(1)})
        if x is None:
            raise ValueError("vectors are not a basis")
        inv_cols.append(x)
    return ExactMatrix.from_columns(ambient, inv_cols)
