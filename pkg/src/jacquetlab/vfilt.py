"""The Laurent model, its V-filtration, nearby cycles and the comparison with J.

``M~ = C[t, 1/t] (x) M`` carries the flowed action

    t . (t^k (x) m)    = t^(k+1) (x) m
    t d/dt (t^k (x) m) = k t^k (x) m + sigma t^k (x) h m
    v . (t^k (x) m)    = t^(k - sigma*TWIST*deg v) (x) v m     (v homogeneous)

and the V-filtration is assembled degree by degree from the F-filtration
of M: the degree-k piece of ``V^alpha`` is ``F_{o(k - alpha)}(M)``.  The
pair (sigma, o) is not fixed a priori; :func:`pin_convention` selects the
unique pair for which the pieces behave like a V-filtration on fd(2)
(decreasing in alpha, stable under e and f, and t d/dt - alpha nilpotent
on graded pieces).  The exponent sign is tied to sigma so that ``t d/dt``
commutes with the Lie algebra action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .exactlinalg import (
    ExactMatrix,
    SubspaceBasis,
    basis_change,
    format_rational,
    nilpotency_order,
    rank,
    vec_axpy,
)
from .hcmod import finite_dim
from .jacquet import (
    RangeExceeded,
    completion_components,
    eigen_tower,
    f_filtration_membership,
    f_filtration_slice,
    jacquet_module,
)
from .liealg import DEGREES, H, LieElement
from .scalar import Rational

#: Sign in the exponent of the root-space action.  Tests flip it to -1 to
#: confirm the verification suites notice.
TWIST = 1

CONVENTIONS = {"pp": (1, 1), "pm": (1, -1), "mp": (-1, 1), "mm": (-1, -1)}
T_SHIFT = "t"
T_EULER = "t_dt"


class ConventionError(RuntimeError):
    """No (or more than one) convention pair satisfies the V-filtration checks."""


# ---------------------------------------------------------------------------
# the Laurent model

class LaurentElement:
    """Finite sum ``sum_k t^k (x) m_k`` with ``m_k`` sparse window vectors."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Mapping] | None = None):
        clean = {}
        for k, v in (terms or {}).items():
            v = {b: c for b, c in v.items() if c}
            if v:
                clean[int(k)] = v
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def monomial(cls, k: int, vec: Mapping) -> "LaurentElement":
        return cls({k: vec})

    def degrees(self) -> list[int]:
        return list(self.terms)

    def __add__(self, other: "LaurentElement") -> "LaurentElement":
        out = {k: dict(v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            vec_axpy(out.setdefault(k, {}), 1, v)
        return LaurentElement(out)

    def scale(self, a) -> "LaurentElement":
        return LaurentElement({k: {b: a * c for b, c in v.items()} for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentElement) and self.terms == other.terms

    def __repr__(self) -> str:
        parts = [f"t^{k} (x) {dict(sorted(v.items()))}" for k, v in self.terms.items()]
        return " + ".join(parts) if parts else "0"


@dataclass(eq=False)
class LaurentModuleWindow:
    """Materialized part of the Laurent model: degrees ``kmin..kmax`` and the
    module window of the depth-D tower."""

    module: object
    kmin: int
    kmax: int
    sigma: int = -1
    orientation: int = 1
    depth: int = 6
    twist: int | None = None
    window: object = field(init=False)
    floor: Rational | None = field(init=False)
    _points: set = field(init=False, repr=False)

    def __post_init__(self):
        if self.sigma not in (1, -1) or self.orientation not in (1, -1):
            raise ValueError("sigma and orientation must be +1 or -1")
        if self.kmin > self.kmax:
            raise ValueError("empty degree range")
        T = eigen_tower(self.module, self.depth)
        self.window = T.window
        self.floor = T.floor
        self._points = set(T.quotients[self.depth - 1].points)

    @property
    def convention(self) -> str:
        return {v: k for k, v in CONVENTIONS.items()}[(self.sigma, self.orientation)]

    def decidable(self, alpha, k: int, slack: int = 0) -> bool:
        """Whether F-membership at degree k of V^alpha is decided ``slack``
        levels below this depth."""
        return self.floor is None or self.filtration_index(alpha, k) >= self.floor + 2 * slack

    @property
    def twist_sign(self) -> int:
        return TWIST if self.twist is None else self.twist

    def degree_shift(self, degree: int) -> int:
        return -self.sigma * self.twist_sign * degree

    def filtration_index(self, alpha, k: int) -> Rational:
        """F-index of the degree-k piece of ``V^alpha``."""
        return self.orientation * (k - Rational(alpha))

    def check(self, el: LaurentElement) -> LaurentElement:
        for k, v in el.terms.items():
            if not self.kmin <= k <= self.kmax:
                raise RangeExceeded(f"t-degree {k} outside [{self.kmin}, {self.kmax}]")
            for b in v:
                if b not in self._points:
                    raise RangeExceeded(f"basis vector {b!r} outside the window")
        return el


def laurent_apply(x, el: LaurentElement, L: LaurentModuleWindow) -> LaurentElement:
    """Act by ``t``, ``t d/dt`` (given as ``"t"`` / ``"t_dt"``) or a Lie element."""
    L.check(el)
    M = L.module
    out: dict = {}
    if x == T_SHIFT:
        out = {k + 1: v for k, v in el.terms.items()}
    elif x == T_EULER:
        for k, v in el.terms.items():
            w = {b: k * c for b, c in v.items()}
            vec_axpy(w, L.sigma, M.apply(H, v))
            out[k] = w
    elif isinstance(x, LieElement):
        for name, a in x.homogeneous_parts():
            s = L.degree_shift(DEGREES[name])
            part = LieElement.named(name)
            for k, v in el.terms.items():
                vec_axpy(out.setdefault(k + s, {}), a, M.apply(part, v))
    else:
        raise ValueError(f"unknown operator {x!r}")
    return L.check(LaurentElement(out))


# ---------------------------------------------------------------------------
# V-slices and graded pieces

@dataclass(eq=False)
class VSlice:
    alpha: Rational
    bases: dict  # degree -> list of window vectors spanning F_{o(k-alpha)}
    points: list  # the window points the bases live on

    def dims(self) -> dict:
        return {k: len(b) for k, b in self.bases.items()}


def v_slice(L: LaurentModuleWindow, alpha, depth: int | None = None) -> VSlice:
    depth = depth or L.depth
    alpha = Rational(alpha)
    slices = {k: f_filtration_slice(L.module, L.filtration_index(alpha, k), depth)
              for k in range(L.kmin, L.kmax + 1)}
    points = next(iter(slices.values())).points
    return VSlice(alpha, {k: s.basis for k, s in slices.items()}, points)


@dataclass(eq=False)
class GrDegree:
    """One t-degree of a graded piece: ``F_beta / F_{beta-1}`` read through
    the beta-component of the completion."""

    degree: int
    index: Rational  # F-index beta
    reps: list  # window vectors
    reader: ExactMatrix  # beta-components -> coordinates in reps
    t_euler: ExactMatrix
    in_filtration: bool  # t d/dt kept the reps inside F_beta


@dataclass(eq=False)
class GrVPiece:
    alpha: Rational
    convention: str
    degrees: dict  # degree -> GrDegree

    @property
    def dim(self) -> int:
        return sum(len(d.reps) for d in self.degrees.values())

    def t_euler_matrix(self) -> ExactMatrix:
        """Block-diagonal matrix of t d/dt over all degrees."""
        blocks = [d.t_euler for d in self.degrees.values()]
        n = sum(b.rows for b in blocks)
        entries, off = {}, 0
        for b in blocks:
            for (i, j), c in b.entries.items():
                entries[(off + i, off + j)] = c
            off += b.rows
        return ExactMatrix(n, n, entries)

    @property
    def nilpotency_order(self) -> int:
        """Order of ``t d/dt - alpha`` (0 on a zero piece); -1 if not nilpotent."""
        if not self.dim:
            return 0
        orders = []
        for d in self.degrees.values():
            if d.t_euler.rows:
                try:
                    orders.append(nilpotency_order(d.t_euler, self.alpha))
                except ArithmeticError:
                    return -1
        return max(orders, default=0)


def _reader(M, beta, reps, depth) -> ExactMatrix:
    T = eigen_tower(M, depth)
    n = len(T.component_vectors(depth, beta))
    images = [completion_components(M, r, depth).get(beta, {}) for r in reps]
    return basis_change(images, n) if images else ExactMatrix.zero(0, n)


def read_component(M, beta, reader: ExactMatrix, vec: Mapping, depth: int) -> dict:
    """Coordinates of the beta-component of ``vec`` in the representative basis."""
    comp = completion_components(M, vec, depth).get(beta, {})
    return reader.apply(comp)


def gr_v(L: LaurentModuleWindow, alpha, depth: int | None = None) -> GrVPiece:
    """``Gr_V^alpha`` over the materialized degrees whose F-index is stabilized."""
    depth = depth or L.depth
    alpha = Rational(alpha)
    M = L.module
    T = eigen_tower(M, depth)
    out = {}
    for k in range(L.kmin, L.kmax + 1):
        beta = L.filtration_index(alpha, k)
        if not T.is_stable(beta):
            continue
        S = f_filtration_slice(M, beta, depth)
        if not S.gr_reps:
            continue
        reader = _reader(M, beta, S.gr_reps, depth)
        cols, inside = [], True
        for r in S.gr_reps:
            img = laurent_apply(T_EULER, LaurentElement.monomial(k, r), L).terms.get(k, {})
            inside &= f_filtration_membership(M, img, beta, depth)
            cols.append(read_component(M, beta, reader, img, depth))
        out[k] = GrDegree(k, beta, S.gr_reps, reader,
                          ExactMatrix.from_columns(len(S.gr_reps), cols), inside)
    return GrVPiece(alpha, L.convention, out)


def check_v2(piece: GrVPiece) -> bool:
    """``t d/dt - alpha`` nilpotent on every degree of the piece."""
    for d in piece.degrees.values():
        n = d.t_euler.rows
        if n and not (d.t_euler.shift(piece.alpha) ** n).is_zero():
            return False
    return True


def t_shift_defects(L: LaurentModuleWindow, alpha, depth: int | None = None) -> list[str]:
    """``t V^alpha = V^(alpha+1)`` degree by degree on the materialized range."""
    a, b = v_slice(L, alpha, depth), v_slice(L, Rational(alpha) + 1, depth)
    pos = {p: i for i, p in enumerate(a.points)}
    bad = []
    for k in range(L.kmin, L.kmax):
        shifted = [laurent_apply(T_SHIFT, LaurentElement.monomial(k, v), L).terms[k + 1]
                   for v in a.bases[k]]
        A = SubspaceBasis.span([{pos[p]: c for p, c in v.items()} for v in shifted], len(pos))
        B = SubspaceBasis.span([{pos[p]: c for p, c in v.items()} for v in b.bases[k + 1]],
                               len(pos))
        if A != B:
            bad.append(f"degree {k}: t V^{format_rational(alpha)} != V^{format_rational(alpha + 1)}")
    return bad


def stability_defects(L: LaurentModuleWindow, alpha, depth: int | None = None,
                      ops=("e", "f", "h", T_EULER)) -> list[str]:
    """Degree-0 operators must map ``V^alpha`` into itself.

    The operators send ``f^D M`` only into ``f^(D-1) M``, so images are
    tested one level below the depth the slice was cut at.
    """
    depth = depth or L.depth
    alpha = Rational(alpha)
    sl = v_slice(L, alpha, depth)
    image_depth = max(depth - 1, 1)
    bad = []
    for k, basis in sl.bases.items():
        if not L.decidable(alpha, k):
            continue
        for name in ops:
            x = name if name == T_EULER else LieElement.named(name)
            for v in basis:
                try:
                    img = laurent_apply(x, LaurentElement.monomial(k, v), L)
                except RangeExceeded:
                    continue
                for k2, w in img.terms.items():
                    beta = L.filtration_index(alpha, k2)
                    if L.decidable(alpha, k2, 1) and not f_filtration_membership(L.module, w, beta, image_depth):
                        bad.append(f"{name} moves degree {k} of V^{format_rational(alpha)} out")
                        break
                else:
                    continue
                break
    return bad


def decreasing_defects(L: LaurentModuleWindow, alpha, depth: int | None = None) -> list[str]:
    """``V^(alpha+1)`` must sit inside ``V^alpha``."""
    depth = depth or L.depth
    alpha = Rational(alpha)
    upper = v_slice(L, alpha + 1, depth)
    bad = []
    for k, basis in upper.bases.items():
        if not L.decidable(alpha, k):
            continue
        beta = L.filtration_index(alpha, k)
        if not all(f_filtration_membership(L.module, v, beta, depth) for v in basis):
            bad.append(f"degree {k}: V^{format_rational(alpha + 1)} not inside V^{format_rational(alpha)}")
    return bad


@dataclass
class V1Result:
    ok: bool
    failures: list

    def __bool__(self) -> bool:
        return self.ok


def graded_generators(M, depth: int = 6) -> dict:
    """Dimension of ``J_gamma / f J_(gamma+2)`` per reported gamma."""
    J = jacquet_module(M, depth)
    dims = J.dims()
    out = {}
    for g, d in dims.items():
        blk = J.f_blocks.get((g + 2, g))
        out[g] = d - (rank(blk) if blk is not None else 0)
    return out


def check_v1_generation(L: LaurentModuleWindow, alpha, m: int, depth: int | None = None) -> V1Result:
    """``V^(alpha+m) = V^m(U~) V^alpha`` on the window, plus finite generation.

    For ``m >= 0`` the filtered operators are ``t^j`` (j >= m) composed with
    degree-0 operators, so the check is the ``t^m`` shift identity and
    stability of ``V^alpha``.  For ``m < 0`` each ``d/dt = t^-1 t d/dt`` must
    map the graded pieces onto those one step lower, which needs the
    eigenvalue of ``t d/dt`` to be nonzero there.  Finite generation over
    ``C[t] (x) U(nbar)`` is checked on the graded level: ``f`` must be onto
    every graded piece below the seed spectrum, leaving finitely many
    generators.
    """
    depth = depth or L.depth
    alpha = Rational(alpha)
    M = L.module
    fails: list[str] = []
    if m >= 0:
        cur = alpha
        for _ in range(m):
            fails += t_shift_defects(L, cur, depth)
            cur += 1
        fails += stability_defects(L, alpha, depth)
    else:
        for j in range(0, m, -1):
            a = alpha + j
            src, dst = gr_v(L, a, depth), gr_v(L, a - 1, depth)
            for k, d in src.degrees.items():
                if k - 1 not in dst.degrees:
                    continue
                target = dst.degrees[k - 1]
                cols = []
                for r in d.reps:
                    img = laurent_apply(T_EULER, LaurentElement.monomial(k, r), L).terms.get(k, {})
                    cols.append(read_component(M, target.index, target.reader, img, depth))
                if rank(ExactMatrix.from_columns(len(target.reps), cols)) != len(target.reps):
                    fails.append(f"d/dt not onto Gr^{format_rational(a - 1)} in degree {k - 1}")
    T = eigen_tower(M, depth)
    low = min(T.seed_values) if T.seed else None
    for g, c in graded_generators(M, depth).items():
        if c and low is not None and g < low:
            fails.append(f"generator needed at eigenvalue {format_rational(g)}")
    return V1Result(not fails, fails)


# ---------------------------------------------------------------------------
# convention pinning

_PINNED: dict = {}


def convention_report(key: str, m: int = 2, depth: int = 6) -> dict:
    """Run the V-filtration checks for one convention pair on ``finite_dim(m)``."""
    sigma, o = CONVENTIONS[key]
    M = finite_dim(m)
    L = LaurentModuleWindow(M, -m - 4, m + 4, sigma, o, depth)
    alphas = [Rational(a) for a in range(-2, 3)]
    v2 = all(check_v2(gr_v(L, a)) for a in alphas)
    dec = not any(decreasing_defects(L, a) for a in alphas)
    stab = not any(stability_defects(L, a) for a in alphas)
    return {"convention": key, "v2": v2, "decreasing": dec, "stable": stab,
            "ok": v2 and dec and stab}


def pin_convention(requested: str = "auto") -> tuple[int, int]:
    """Resolve ``"auto"`` (or validate an explicit pair) to ``(sigma, orientation)``."""
    if requested != "auto":
        if requested not in CONVENTIONS:
            raise ValueError(f"unknown convention {requested!r}")
        return CONVENTIONS[requested]
    key = TWIST
    if key not in _PINNED:
        passing = [c for c in CONVENTIONS if convention_report(c)["ok"]]
        if len(passing) != 1:
            raise ConventionError(f"convention pairs passing the checks: {passing}")
        _PINNED[key] = CONVENTIONS[passing[0]]
    return _PINNED[key]


# ---------------------------------------------------------------------------
# nearby cycles and the comparison

def coset_representative(x) -> Rational:
    """The representative of ``x + Z`` in ``[0, 1)``."""
    x = Rational(x)
    return x - (x.numerator // x.denominator)


@dataclass(eq=False)
class NearbyCycles:
    label: str
    convention: str
    depth: int
    representatives: list  # alpha in [0, 1)
    pieces: dict  # alpha -> GrVPiece
    table: dict  # F-index gamma -> (dim, nilpotency)
    e_blocks: dict  # (gamma, gamma+2) -> matrix
    f_blocks: dict
    h_blocks: dict  # gamma -> matrix of h on the graded piece
    v2: dict = field(default_factory=dict)  # alpha -> bool

    def block_ranks(self) -> dict:
        return {"e": {k: rank(m) for k, m in sorted(self.e_blocks.items())},
                "f": {k: rank(m) for k, m in sorted(self.f_blocks.items())}}


def laurent_model(M, depth: int = 6, convention: str = "auto"):
    """Laurent window covering every reported eigenvalue, with the coset
    representatives in [0, 1) of the t d/dt spectrum."""
    sigma, o = pin_convention(convention)
    gammas = jacquet_module(M, depth).eigenvalues()
    reps = sorted({coset_representative(-o * g) for g in gammas})
    ks = [int(o * g + a) for g in gammas for a in reps if (o * g + a).denominator == 1] or [0]
    return LaurentModuleWindow(M, min(ks) - 2, max(ks) + 2, sigma, o, depth), reps


def nearby_cycles(M, depth: int = 6, convention: str = "auto") -> NearbyCycles:
    L, reps = laurent_model(M, depth, convention)
    pieces, table, v2 = {}, {}, {}
    e_blocks, f_blocks, h_blocks = {}, {}, {}
    by_index = {}
    for a in reps:
        P = gr_v(L, a, depth)
        pieces[a] = P
        v2[a] = check_v2(P)
        for k, d in P.degrees.items():
            by_index[d.index] = (a, k, d)
    for g, (a, k, d) in by_index.items():
        order = nilpotency_order(d.t_euler, a) if check_v2(GrVPiece(a, L.convention, {k: d})) else -1
        table[g] = (len(d.reps), order)
        h_cols = [read_component(M, g, d.reader, M.apply(H, r), depth) for r in d.reps]
        h_blocks[g] = ExactMatrix.from_columns(len(d.reps), h_cols)
        for name, step, store in (("e", 2, e_blocks), ("f", -2, f_blocks)):
            tgt = g + step
            if tgt not in by_index:
                continue
            _, k2, d2 = by_index[tgt]
            x = LieElement.named(name)
            cols = []
            for r in d.reps:
                img = laurent_apply(x, LaurentElement.monomial(k, r), L)
                cols.append(read_component(M, tgt, d2.reader, img.terms.get(k2, {}), depth))
            store[(g, tgt)] = ExactMatrix.from_columns(len(d2.reps), cols)
    return NearbyCycles(M.label, L.convention, depth, reps, pieces,
                        dict(sorted(table.items(), reverse=True)),
                        e_blocks, f_blocks, h_blocks, v2)


@dataclass
class ComparisonReport:
    label: str
    convention: str
    rows: list  # (gamma, jacquet (dim, nilp), nearby (dim, nilp), ok)
    block_rows: list  # (kind, (from, to), jacquet rank, nearby rank, ok)

    @property
    def ok(self) -> bool:
        return all(r[-1] for r in self.rows) and all(r[-1] for r in self.block_rows)

    def to_json(self) -> dict:
        return {
            "module": self.label,
            "convention": self.convention,
            "ok": self.ok,
            "eigenvalues": [
                {"value": format_rational(g), "jacquet": list(j), "nearby": list(n), "ok": ok}
                for g, j, n, ok in self.rows],
            "blocks": [
                {"op": kind, "from": format_rational(a), "to": format_rational(b),
                 "jacquet": rj, "nearby": rn, "ok": ok}
                for kind, (a, b), rj, rn, ok in self.block_rows],
        }


def theorem1_compare(M, depth: int = 6, convention: str = "auto") -> ComparisonReport:
    J = jacquet_module(M, depth)
    N = nearby_cycles(M, depth, convention)
    jt = J.table()
    keys = sorted(set(jt) | set(N.table), reverse=True)
    rows = []
    for g in keys:
        a, b = jt.get(g, (0, 0)), N.table.get(g, (0, 0))
        rows.append((g, a, b, a == b))
    jr, nr = J.block_ranks(), N.block_ranks()
    block_rows = []
    for kind in ("e", "f"):
        for k in sorted(set(jr[kind]) | set(nr[kind]), reverse=True):
            x, y = jr[kind].get(k, 0), nr[kind].get(k, 0)
            block_rows.append((kind, k, x, y, x == y))
    return ComparisonReport(M.label, N.convention, rows, block_rows)
