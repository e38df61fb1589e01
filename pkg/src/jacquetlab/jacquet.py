"""The Jacquet module through truncated nbar-adic quotients.

For a module M with f spanning nbar, the quotients ``M / f^k M`` are
finite-dimensional and carry an h-action.  Their generalized h-eigenspaces
stabilize as k grows, and J(M) is the direct sum of the stable pieces, with
e raising and f lowering the eigenvalue by 2.

Infinite modules are handled on windows: ``f^k M`` is approximated by the
images ``f^k v_n`` that land inside the window, and a result is only
accepted when it survives one doubling of the window.  A second,
independent reduction (rewriting outer basis vectors through the leading
band coefficient of ``f^k``) cross-checks every accepted quotient.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping

from .exactlinalg import (
    ExactMatrix,
    IncompleteSpectrum,
    SubspaceBasis,
    basis_change,
    charpoly,
    format_rational,
    jordan_profile,
    kernel_cokernel,
    nilpotency_order,
    primary_decomposition,
    rank,
    rational_roots,
    vec_axpy,
)
from .liealg import E, F, H
from .scalar import Rational

DEFAULT_WINDOW = 64


class NoStabilization(RuntimeError):
    """Window doubling reached the cap without the quotient settling."""


class RangeExceeded(ValueError):
    """A vector left the materialized window."""


class NotInCandidateSet(ValueError):
    pass


class OracleMismatch(AssertionError):
    """The rewriting cross-check disagrees with the echelon quotient."""


_START = [DEFAULT_WINDOW]


def set_start_window(size: int | None) -> None:
    """First window of the doubling schedule (None restores the default)."""
    if size is None:
        size = DEFAULT_WINDOW
    if not isinstance(size, int) or size < 8:
        raise ValueError("start window must be an integer >= 8")
    _START[0] = size


def start_window() -> int:
    return _START[0]


def max_window() -> int:
    raw = os.environ.get("JACQUETLAB_MAX_WINDOW", "1024")
    value = int(raw)
    if value < DEFAULT_WINDOW or value & (value - 1):
        raise ValueError("JACQUETLAB_MAX_WINDOW must be a power of two >= 64")
    return value


def f_power(M, k: int, vec: Mapping) -> dict:
    for _ in range(k):
        vec = M.apply(F, vec)
    return vec


# ---------------------------------------------------------------------------
# truncated quotients

@dataclass(eq=False)
class FiniteQuotient:
    """``M / f^k M`` materialized on a window.

    Quotient coordinates are indexed by ``reps``: the window basis vectors
    that are not pivots of the echelonized image.  Pivots are chosen from
    the window edges inward, so the representatives sit in the interior.
    """

    module: object
    depth: int
    window: object
    points: list
    reps: list
    image: SubspaceBasis
    h_action: ExactMatrix = None
    projection_from_deeper: ExactMatrix | None = None

    def __post_init__(self):
        self._pos = {k: i for i, k in enumerate(self.points)}
        self._rep_index = {self._pos[r]: i for i, r in enumerate(self.reps)}

    @property
    def dim(self) -> int:
        return len(self.reps)

    def in_window(self, vec: Mapping) -> bool:
        return all(k in self._pos for k in vec)

    def project(self, vec: Mapping) -> dict:
        """Quotient coordinates of a window vector."""
        try:
            v = {self._pos[k]: c for k, c in vec.items()}
        except KeyError as exc:
            raise RangeExceeded(f"basis vector {exc.args[0]!r} outside window") from None
        r = self.image.reduce(v)
        return {self._rep_index[p]: c for p, c in r.items()}

    def lift(self, qvec: Mapping) -> dict:
        return {self.reps[i]: c for i, c in qvec.items() if c}

    def operator(self, x) -> ExactMatrix:
        """Matrix of an operator preserving ``f^k M`` on the quotient."""
        cols = [self.project(self.module.apply(x, {r: Rational(1)})) for r in self.reps]
        return ExactMatrix.from_columns(self.dim, cols)

    def signature(self) -> tuple:
        """Similarity invariants of the h-action: dimension, charpoly, Jordan ranks."""
        cp = charpoly(self.h_action)
        roots = rational_roots(cp) if self.dim else []
        return (self.dim, tuple(cp),
                tuple((r, jordan_profile(self.h_action, r)) for r, _ in roots))


def _window_quotient(M, k: int, window) -> FiniteQuotient:
    pts = M.points(window)
    pos = {p: i for i, p in enumerate(pts)}
    dist = M.edge_distance(window)
    order = sorted(range(len(pts)), key=lambda i: (dist[pts[i]], i))
    image = SubspaceBasis(len(pts), order)
    for p in pts:
        img = f_power(M, k, {p: Rational(1)})
        if img and all(q in pos for q in img):
            image.insert({pos[q]: c for q, c in img.items()})
    rep_pos = sorted(image.complement_coordinates())
    reps = [pts[i] for i in rep_pos]
    Q = FiniteQuotient(M, k, window, pts, reps, image)
    Q.h_action = Q.operator(H)
    return Q


def truncated_quotient(M, k: int, window=None, *, start: int | None = None,
                       cross_check: bool = True) -> FiniteQuotient:
    """``M / f^k M`` on the smallest stable window of the doubling schedule.

    With ``window`` given the stabilization loop starts there.
    """
    if k < 1:
        raise ValueError("depth must be >= 1")
    start = start or start_window()
    key = ("quotient", k, window, start)
    if key in M.cache:
        return M.cache[key]
    w = window if window is not None else M.default_window(start)
    cap = max_window()
    while True:
        bigger = M.enlarge(w)
        try:
            Q = _cached_window_quotient(M, k, w)
            if M.is_finite:
                break
            Q2 = _cached_window_quotient(M, k, bigger)
            if Q.signature() == Q2.signature():
                break
        except RangeExceeded:
            if M.is_finite:
                raise
            # window too narrow to hold the representatives: treat as unstable
        if M.window_size(bigger) > cap:
            raise NoStabilization(
                f"{M.label}: M/f^{k}M still changing at window {M.window_size(bigger)}")
        w = bigger
    if cross_check:
        oracle = rewriting_oracle(M, k, w)
        if oracle is not None:
            dim, hmat = oracle
            if dim != Q.dim or charpoly(hmat) != charpoly(Q.h_action):
                raise OracleMismatch(f"{M.label}: rewriting oracle disagrees at depth {k}")
    M.cache[key] = Q
    return Q


def _cached_window_quotient(M, k, w) -> FiniteQuotient:
    key = ("wq", k, w)
    if key not in M.cache:
        M.cache[key] = _window_quotient(M, k, w)
    return M.cache[key]


# ---------------------------------------------------------------------------
# rewriting oracle

def _f_shifts(M) -> list[int]:
    coords = dict(zip(("Hc", "Xp", "Xm"), F.compact())) if M.basis == "ktype" \
        else {"f": Rational(1)}
    return sorted({s for name, a in coords.items() if a for s, _ in M.bands[name]})


def rewriting_oracle(M, k: int, window):
    """Independent computation of ``(dim M/f^k M, h matrix)`` by rewriting.

    Basis vectors outside a block B of ``k * width`` consecutive points are
    eliminated one at a time, outermost first, using the ``f^k``-image
    whose extreme support point is the vector being removed.  Returns None
    when a needed leading coefficient vanishes on the window (or for
    direct sums), in which case the rewriting argument does not apply.
    """
    if not hasattr(M, "bands"):
        return None
    shifts = _f_shifts(M)
    up, down = k * max(shifts), k * min(shifts)
    s = M.step
    pts = M.points(window)
    if M.lo is not None:
        width = up // s
        block = [p for p in pts[:width]]
    elif M.hi is not None:
        width = -down // s
        block = pts[-width:]
    else:
        width = (up - down) // s
        mid = len(pts) // 2 - width // 2
        block = pts[mid:mid + width]
    if not block:
        return None
    bmin, bmax = block[0], block[-1]
    bset = set(block)

    def distance(p):
        return (p - bmax) // s if p > bmax else (bmin - p) // s

    rules: dict = {}
    used = set()

    def rule(p):
        if p in rules:
            return rules[p]
        q = p - up if p > bmax else p - down
        g = f_power(M, k, {q: Rational(1)}) if M.contains(q) else {}
        lead = g.get(p)
        if not lead or any(t not in bset and t != p and distance(t) >= distance(p) for t in g):
            rules[p] = None
        else:
            rules[p] = (q, g)
            used.add(q)
        return rules[p]

    def reduce(vec):
        vec = dict(vec)
        for _ in range(100000):
            outside = [t for t in vec if t not in bset]
            if not outside:
                return vec
            p = max(outside, key=lambda t: (distance(t), t))
            r = rule(p)
            if r is None:
                raise _NotApplicable
            _, g = r
            vec_axpy(vec, -vec[p] / g[p], g)
        raise _NotApplicable

    try:
        for p in pts:
            if p not in bset:
                rule(p)
        if any(r is None for r in rules.values()):
            return None
        bpos = {p: i for i, p in enumerate(block)}
        relations = SubspaceBasis(len(block))
        if M.is_finite:
            for q in M.points(window):
                if q in used:
                    continue
                g = f_power(M, k, {q: Rational(1)})
                if g:
                    relations.insert({bpos[t]: c for t, c in reduce(g).items()})
        free = relations.complement_coordinates()
        fpos = {c: i for i, c in enumerate(free)}
        cols = []
        for c in free:
            v = reduce(M.apply(H, {block[c]: Rational(1)}))
            r = relations.reduce({bpos[t]: x for t, x in v.items()})
            cols.append({fpos[t]: x for t, x in r.items()})
        return len(free), ExactMatrix.from_columns(len(free), cols)
    except _NotApplicable:
        return None


class _NotApplicable(Exception):
    pass


# ---------------------------------------------------------------------------
# eigenvalue tower

def stabilization_depth(seed, alpha) -> int:
    """First depth from which the alpha-eigenspace of ``M/f^k M`` no longer grows.

    ``1 + max (s - alpha)/2`` over seed eigenvalues s with ``s - alpha`` an
    even non-negative integer.
    """
    alpha = Rational(alpha)
    best = None
    for s in seed:
        d = Rational(s) - alpha
        if d >= 0 and d.denominator == 1 and d.numerator % 2 == 0:
            j = d.numerator // 2
            best = j if best is None else max(best, j)
    if best is None:
        raise NotInCandidateSet(f"{format_rational(alpha)} is not in S - 2Z>=0")
    return best + 1


def candidate_set(seed, depth: int) -> list[Rational]:
    return sorted({Rational(s) - 2 * j for s in seed for j in range(depth)}, reverse=True)


@dataclass(eq=False)
class EigTower:
    module: object
    depth: int
    window: object
    quotients: list
    decompositions: list
    seed: list  # [(eigenvalue, multiplicity)] at depth 1
    surjections: list = field(default_factory=list)  # depth k+1 -> depth k, k = 1..D-1

    @property
    def seed_values(self) -> list[Rational]:
        return [s for s, _ in self.seed]

    def dims(self) -> list[int]:
        return [Q.dim for Q in self.quotients]

    def eigen_dims(self, k: int) -> dict:
        return {c.eigenvalue: c.dimension for c in self.decompositions[k - 1]}

    def stab_depth(self, alpha) -> int:
        return stabilization_depth(self.seed_values, alpha)

    def is_stable(self, alpha) -> bool:
        try:
            return self.stab_depth(alpha) <= self.depth
        except NotInCandidateSet:
            return True

    @property
    def floor(self) -> Rational | None:
        """Eigenvalues at or above this bound are stabilized at this depth."""
        if not self.seed:
            return None
        return min(self.seed_values) - 2 * (self.depth - 1)

    def component_coords(self, k: int):
        """Map quotient coordinates to ``{eigenvalue: coordinates in component basis}``."""
        key = k
        if key not in self._coords_cache:
            comps = self.decompositions[k - 1]
            vecs, slices = [], []
            for c in comps:
                vs = c.vectors()
                slices.append((c.eigenvalue, len(vecs), len(vecs) + len(vs)))
                vecs.extend(vs)
            inv = basis_change(vecs, self.quotients[k - 1].dim) if vecs else ExactMatrix.zero(0)
            self._coords_cache[key] = (inv, slices, vecs)
        return self._coords_cache[key]

    def split(self, k: int, qvec: Mapping) -> dict:
        inv, slices, _ = self.component_coords(k)
        full = inv.apply(qvec)
        out = {}
        for alpha, a, b in slices:
            out[alpha] = {i - a: c for i, c in full.items() if a <= i < b}
        return out

    def component_vectors(self, k: int, alpha) -> list[dict]:
        _, slices, vecs = self.component_coords(k)
        for a_, a, b in slices:
            if a_ == alpha:
                return vecs[a:b]
        return []

    def __post_init__(self):
        self._coords_cache = {}


def eigen_tower(M, depth: int, *, start: int | None = None) -> EigTower:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    start = start or start_window()
    key = ("tower", depth, start)
    if key in M.cache:
        return M.cache[key]
    deepest = truncated_quotient(M, depth, start=start)
    window = deepest.window
    quotients = [truncated_quotient(M, k, window) for k in range(1, depth)] + [deepest]
    if any(Q.window != window for Q in quotients):
        # a shallower depth needed a larger window; redo everything there
        window = max((Q.window for Q in quotients), key=M.window_size)
        quotients = [truncated_quotient(M, k, window) for k in range(1, depth + 1)]
    Q1 = quotients[0]
    seed = rational_roots(charpoly(Q1.h_action)) if Q1.dim else []
    if sum(m for _, m in seed) != Q1.dim:
        raise IncompleteSpectrum(f"{M.label}: depth-1 spectrum is not rational")
    seed_values = [s for s, _ in seed]
    decomps = []
    for k, Q in enumerate(quotients, start=1):
        decomps.append(primary_decomposition(Q.h_action, candidate_set(seed_values, k)))
    surj = []
    for k in range(1, depth):
        hi, lo = quotients[k], quotients[k - 1]
        P = ExactMatrix.from_columns(lo.dim, [lo.project({r: Rational(1)}) for r in hi.reps])
        hi.projection_from_deeper = None
        surj.append(P)
    for k in range(1, depth):
        quotients[k - 1].projection_from_deeper = surj[k - 1]
    T = EigTower(M, depth, window, quotients, decomps, seed, surj)
    M.cache[key] = T
    return T


def tower_defects(T: EigTower) -> list[str]:
    """Check the eigenvalue bound, completeness, stabilization and the surjections."""
    bad = []
    seeds = T.seed_values
    top = max(seeds) if seeds else None
    for k in range(1, T.depth + 1):
        comps = T.decompositions[k - 1]
        if sum(c.dimension for c in comps) != T.quotients[k - 1].dim:
            bad.append(f"depth {k}: components do not fill the quotient")
        for c in comps:
            try:
                stabilization_depth(seeds, c.eigenvalue)
            except NotInCandidateSet:
                bad.append(f"depth {k}: eigenvalue {format_rational(c.eigenvalue)} outside S - 2Z>=0")
            if top is not None and c.eigenvalue > top:
                bad.append(f"depth {k}: eigenvalue above max S")
    values = sorted({c.eigenvalue for d in T.decompositions for c in d}, reverse=True)
    for a in values:
        dims = [T.eigen_dims(k).get(a, 0) for k in range(1, T.depth + 1)]
        if any(x > y for x, y in zip(dims, dims[1:])):
            bad.append(f"eigenvalue {format_rational(a)}: dimensions decrease {dims}")
        ks = T.stab_depth(a)
        if any(d != dims[ks - 1] for d in dims[ks - 1:]):
            bad.append(f"eigenvalue {format_rational(a)}: not constant from depth {ks}: {dims}")
    for k, P in enumerate(T.surjections, start=1):
        if rank(P) != T.quotients[k - 1].dim:
            bad.append(f"connecting map {k + 1}->{k} not surjective")
        for c in T.decompositions[k]:
            images = [P.apply(v) for v in c.vectors()]
            target = T.eigen_dims(k).get(c.eigenvalue, 0)
            sub = SubspaceBasis.span(images, T.quotients[k - 1].dim)
            if sub.dim != target:
                bad.append(f"connecting map {k + 1}->{k} not onto eigenvalue "
                           f"{format_rational(c.eigenvalue)}")
    return bad


def doubling_defects(M, depth: int) -> list[str]:
    """Every accepted quotient of the tower must look the same on the doubled window."""
    T = eigen_tower(M, depth)
    if M.is_finite:
        return []
    bad = []
    for k, Q in enumerate(T.quotients, start=1):
        Q2 = _cached_window_quotient(M, k, M.enlarge(Q.window))
        if Q.signature() != Q2.signature():
            bad.append(f"depth {k}: quotient changes under window doubling")
    return bad


# ---------------------------------------------------------------------------
# the Jacquet module

@dataclass(frozen=True)
class CompletionEigenspace:
    eigenvalue: Rational
    dimension: int
    nilpotency_order: int
    stabilization_depth: int


@dataclass(eq=False)
class JacquetModule:
    label: str
    depth: int
    seed: list
    spaces: list  # CompletionEigenspace, descending eigenvalue
    h_blocks: dict  # alpha -> matrix
    e_blocks: dict  # (alpha, alpha+2) -> matrix
    f_blocks: dict  # (alpha, alpha-2) -> matrix
    floor: Rational | None
    truncated: list  # eigenvalues present at depth D but not yet stable
    n_finite: bool = True

    def eigenvalues(self) -> list[Rational]:
        return [s.eigenvalue for s in self.spaces]

    def table(self) -> dict:
        return {s.eigenvalue: (s.dimension, s.nilpotency_order) for s in self.spaces}

    def dims(self) -> dict:
        return {s.eigenvalue: s.dimension for s in self.spaces}

    def block_ranks(self) -> dict:
        return {
            "e": {k: rank(m) for k, m in sorted(self.e_blocks.items())},
            "f": {k: rank(m) for k, m in sorted(self.f_blocks.items())},
        }


def _component_matrix(T: EigTower, x, alpha, target) -> ExactMatrix:
    """Matrix of x from the alpha-component to the target component of ``M/f^D M``."""
    D = T.depth
    Q = T.quotients[D - 1]
    src = T.component_vectors(D, alpha)
    tdim = len(T.component_vectors(D, target))
    cols = []
    for v in src:
        img = Q.project(T.module.apply(x, Q.lift(v)))
        cols.append(T.split(D, img).get(target, {}))
    return ExactMatrix.from_columns(tdim, cols)


def jacquet_module(M, depth: int = 6, *, start: int | None = None) -> JacquetModule:
    start = start or start_window()
    key = ("jacquet", depth, start)
    if key in M.cache:
        return M.cache[key]
    T = eigen_tower(M, depth, start=start)
    comps = T.decompositions[depth - 1]
    stable = [c for c in comps if T.is_stable(c.eigenvalue)]
    truncated = [c.eigenvalue for c in comps if not T.is_stable(c.eigenvalue)]
    values = {c.eigenvalue for c in stable}
    spaces, h_blocks, e_blocks, f_blocks = [], {}, {}, {}
    for c in stable:
        a = c.eigenvalue
        hb = _component_matrix(T, H, a, a)
        h_blocks[a] = hb
        spaces.append(CompletionEigenspace(a, c.dimension, nilpotency_order(hb, a),
                                           T.stab_depth(a)))
        if a + 2 in values:
            e_blocks[(a, a + 2)] = _component_matrix(T, E, a, a + 2)
        if a - 2 in values:
            f_blocks[(a, a - 2)] = _component_matrix(T, F, a, a - 2)
    spaces.sort(key=lambda s: s.eigenvalue, reverse=True)
    J = JacquetModule(M.label, depth, T.seed, spaces, h_blocks, e_blocks, f_blocks,
                      T.floor, sorted(truncated, reverse=True))
    J.n_finite = _check_n_finite(J)
    M.cache[key] = J
    return J


def _check_n_finite(J: JacquetModule) -> bool:
    """Every eigenvector is killed by a power of e (chains of e-blocks end)."""
    dims = J.dims()
    for a in dims:
        P = ExactMatrix.identity(dims[a])
        cur = a
        while True:
            nxt = cur + 2
            if nxt not in dims:
                break
            P = J.e_blocks[(cur, nxt)] @ P
            cur = nxt
        # one more e leaves the reported spectrum, which is bounded above
        if cur + 2 in dims:
            return False
    return True


def filtration_leq(gamma, beta) -> bool:
    """``gamma <= beta`` in the chain order: ``beta - gamma`` a non-negative integer."""
    d = Rational(beta) - Rational(gamma)
    return d >= 0 and d.denominator == 1


def completion_components(M, vec: Mapping, depth: int = 6) -> dict:
    """Components of a window vector in the generalized eigenspaces of ``M/f^D M``."""
    T = eigen_tower(M, depth)
    return T.split(depth, T.quotients[depth - 1].project(vec))


def f_filtration_membership(M, m: Mapping, beta, depth: int = 6) -> bool:
    """Is ``m`` in ``F_beta(M)``: no component at eigenvalues gamma with
    ``gamma <= beta`` false, in ``M / f^D M`` (hence at every k <= D)."""
    return all(not v or filtration_leq(g, beta)
               for g, v in completion_components(M, m, depth).items())


@dataclass(eq=False)
class FFiltrationSlice:
    """``F_beta(M)`` intersected with the span of the interior window points."""

    beta: Rational
    points: list
    basis: list  # window vectors
    gr_reps: list  # basis vectors whose beta-components are independent
    gr_dim: int
    expected_gr_dim: int | None  # stabilized dim of the beta-eigenspace, None if unstable

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def gr_isomorphic(self) -> bool:
        return self.expected_gr_dim is None or self.gr_dim == self.expected_gr_dim


def _point_components(M, depth: int, margin: int):
    key = ("point-components", depth, margin)
    if key not in M.cache:
        T = eigen_tower(M, depth)
        Q = T.quotients[depth - 1]
        if M.is_finite:
            pts = list(Q.points)
        else:
            dist = M.edge_distance(Q.window)
            pts = [p for p in Q.points if dist[p] >= margin]
        M.cache[key] = (pts, [T.split(depth, Q.project({p: Rational(1)})) for p in pts])
    return M.cache[key]


def f_filtration_slice(M, beta, depth: int = 6, margin: int = 2) -> FFiltrationSlice:
    beta = Rational(beta)
    key = ("f-slice", beta, depth, margin)
    if key in M.cache:
        return M.cache[key]
    T = eigen_tower(M, depth)
    pts, parts = _point_components(M, depth, margin)
    values = [c.eigenvalue for c in T.decompositions[depth - 1]]
    bad = [g for g in values if not filtration_leq(g, beta)]
    r, entries, offsets = 0, {}, {}
    for g in bad:
        offsets[g] = r
        r += len(T.component_vectors(depth, g))
    for j, part in enumerate(parts):
        for g in bad:
            for i, c in part.get(g, {}).items():
                entries[(offsets[g] + i, j)] = c
    A = ExactMatrix(r, len(pts), entries)
    kernel, _ = kernel_cokernel(A)
    basis = [{pts[j]: c for j, c in v.items()} for v in kernel.vectors()]
    where = {p: j for j, p in enumerate(pts)}
    reps, images = [], SubspaceBasis(len(T.component_vectors(depth, beta)))
    for v in basis:
        img: dict = {}
        for p, c in v.items():
            vec_axpy(img, c, parts[where[p]].get(beta, {}))
        if img and images.insert(img):
            reps.append(v)
    expected = T.eigen_dims(depth).get(beta, 0) if T.is_stable(beta) else None
    S = FFiltrationSlice(beta, pts, basis, reps, len(reps), expected)
    M.cache[key] = S
    return S


def dual_jacquet_dims(M, k: int) -> int:
    """Dimension of the nbar^k-torsion of the dual Jacquet module, i.e. of ``M/f^k M``."""
    return truncated_quotient(M, k).dim


def artin_rees_check(M, alpha, k: int, depth: int = 6) -> tuple[int, bool]:
    """Dimension of ``F_{alpha-k}(M) / (F_{-k}U(nbar) . F_alpha(M))``.

    ``F_{-k}U(nbar)`` is spanned by ``f^j`` with ``2j >= k``; since
    ``f F_alpha`` lies in ``F_alpha`` only ``j0 = ceil(k/2)`` matters.  The
    quotient is graded by eigenvalue: at gamma it is ``J_gamma`` modulo
    ``f^j0 J_{gamma + 2 j0}`` when ``gamma + 2 j0 <= alpha``, and all of
    ``J_gamma`` otherwise.  For infinite modules the sum runs over the
    stabilized eigenvalues, so ``alpha - k`` must not lie below the floor.
    """
    alpha = Rational(alpha)
    if k < 0:
        raise ValueError("k must be >= 0")
    J = jacquet_module(M, depth)
    if not M.is_finite and J.floor is not None and alpha - k < J.floor:
        raise RangeExceeded(
            f"alpha - k = {format_rational(alpha - k)} below the depth-{depth} floor "
            f"{format_rational(J.floor)}")
    dims = J.dims()
    j0 = -(-k // 2)
    total = 0
    for gamma, d in dims.items():
        diff = alpha - k - gamma
        if not (diff >= 0 and diff.denominator == 1):
            continue
        src = gamma + 2 * j0
        rest = alpha - src
        if src in dims and rest >= 0 and rest.denominator == 1:
            P = ExactMatrix.identity(dims[src])
            cur = src
            for _ in range(j0):
                P = J.f_blocks[(cur, cur - 2)] @ P if (cur, cur - 2) in J.f_blocks \
                    else ExactMatrix.zero(dims.get(cur - 2, 0), P.cols)
                cur -= 2
            total += d - rank(P)
        else:
            total += d
    return total, total == 0


def artin_rees_alphas(M, depth: int = 6, kmax: int = 4) -> list:
    """Test points for the vanishing scan: reported eigenvalues, restricted
    to where every ``k <= kmax`` is in range.

    Off-spectrum points are skipped: if ``alpha - 1`` is an eigenvalue and
    alpha is not, ``F_{alpha-1}`` has a top piece that ``f`` cannot reach.
    """
    J = jacquet_module(M, depth)
    pts = set(J.eigenvalues())
    if not M.is_finite and J.floor is not None:
        pts = {a for a in pts if a - kmax >= J.floor}
    return sorted(pts)


def artin_rees_threshold(M, depth: int = 6, kmax: int = 4):
    """Largest tested alpha such that the quotient vanishes for every tested
    alpha' <= alpha and every ``k <= kmax``; None when the lowest tested
    alpha already fails (or nothing is testable)."""
    threshold = None
    for a in artin_rees_alphas(M, depth, kmax):
        if all(artin_rees_check(M, a, k, depth)[1] for k in range(kmax + 1)):
            threshold = a
        else:
            break
    return threshold


@dataclass
class ExactnessReport:
    label: str
    rows: list  # (alpha, dim sub, dim total, dim quotient)
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches


def exactness_check(ses, depth: int = 6) -> ExactnessReport:
    mods = (ses.sub, ses.total, ses.quotient)
    Js = [jacquet_module(m, depth) for m in mods]
    towers = [eigen_tower(m, depth) for m in mods]
    values = set()
    for J in Js:
        values |= set(J.dims())
    rows, bad = [], []
    for a in sorted(values, reverse=True):
        if not all(T.is_stable(a) for T in towers):
            continue
        s, t, q = (J.dims().get(a, 0) for J in Js)
        rows.append((a, s, t, q))
        if s + q != t:
            bad.append(f"{format_rational(a)}: {s} + {q} != {t}")
    return ExactnessReport(ses.label, rows, bad)


# ---------------------------------------------------------------------------
# structure report

def _connected(nodes, edges) -> list[list]:
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict = {}
    for n in nodes:
        groups.setdefault(find(n), []).append(n)
    return sorted((sorted(g, reverse=True) for g in groups.values()), key=lambda g: g[0], reverse=True)


def verma_pattern(J: JacquetModule, T: EigTower | None = None) -> bool:
    """Single multiplicity-one chain, semisimple h, f injective down to the
    reporting floor, e-blocks of the rank a Verma module with the top weight has."""
    dims = J.dims()
    if not dims:
        return False
    if any(d != 1 for d in dims.values()):
        return False
    if any(s.nilpotency_order != 1 for s in J.spaces):
        return False
    top = max(dims)
    ranks = J.block_ranks()
    for a in dims:
        if a - 2 >= (J.floor if J.floor is not None else a - 2) and (a, a - 2) not in J.f_blocks:
            return False
        if (a, a - 2) in J.f_blocks and ranks["f"][(a, a - 2)] != 1:
            return False
        d = top - a
        if d.denominator != 1 or d.numerator % 2:
            return False
        if a != top:
            j = d.numerator // 2
            expect = 1 if j * (top - j + 1) else 0
            if ranks["e"].get((a, a + 2), 0) != expect:
                return False
    return True


def structure_report(J: JacquetModule) -> dict:
    ranks = J.block_ranks()
    edges = [k for k, r in ranks["e"].items() if r] + [k for k, r in ranks["f"].items() if r]
    comps = _connected(J.eigenvalues(), edges)
    return {
        "eigenvalues": [
            {"value": format_rational(s.eigenvalue), "dim": s.dimension,
             "nilpotency": s.nilpotency_order, "stab_depth": s.stabilization_depth}
            for s in J.spaces
        ],
        "blocks": {
            g: [{"from": format_rational(a), "to": format_rational(b), "rank": r}
                for (a, b), r in sorted(ranks[g].items(), reverse=True)]
            for g in ("e", "f")
        },
        "chains": [[format_rational(a) for a in c] for c in comps],
        "chain_count": len(comps),
        "max_nilpotency": max((s.nilpotency_order for s in J.spaces), default=1),
        "verma_pattern": verma_pattern(J),
        "n_finite": J.n_finite,
        "floor": format_rational(J.floor) if J.floor is not None else None,
        "truncated": [format_rational(a) for a in J.truncated],
        "seed": [[format_rational(s), m] for s, m in J.seed],
    }
