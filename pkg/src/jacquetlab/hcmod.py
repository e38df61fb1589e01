"""Catalog of sl2 Harish-Chandra modules as banded operators on index lattices.

Two kinds of basis occur:

* ``ktype``: vectors v_n indexed by the Hc-eigenvalue n (step 2), with
  Hc v_n = n v_n and X+- v_n = ((lam + 1 +- n)/2) v_{n+-2}.
* ``weight``: vectors u_j (step 1) on which e, h, f act directly.

Operators are exact on the whole lattice; targets that fall outside the
lattice are dropped (this is how one-sided and finite lattices encode
sub- and quotient modules).  Windows only enter when a finite matrix is
materialized.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .exactlinalg import ExactMatrix, as_rational, format_rational, vec_axpy
from .liealg import COMPACT_NAMES, SPLIT_NAMES, E, F, H, LieElement
from .scalar import Rational


class DescriptorError(ValueError):
    """Malformed module descriptor."""


class NonScalar(ArithmeticError):
    """The Casimir does not act by a scalar."""


class NoReducibility(ValueError):
    """No reducible principal series at this parameter."""


KINDS = ("ps", "ds", "fd", "verma")


@dataclass(frozen=True)
class ModuleDescriptor:
    kind: str
    lam: Rational | None = None
    parity: int | None = None
    lowest_type: int | None = None
    dim: int | None = None
    highest_weight: Rational | None = None

    def __post_init__(self):
        required = {
            "ps": ("lam", "parity"),
            "ds": ("lowest_type",),
            "fd": ("dim",),
            "verma": ("highest_weight",),
        }
        if self.kind not in required:
            raise DescriptorError(f"unknown module kind {self.kind!r}")
        for name in ("lam", "parity", "lowest_type", "dim", "highest_weight"):
            present = getattr(self, name) is not None
            if present != (name in required[self.kind]):
                raise DescriptorError(
                    f"field {name!r} {'not allowed' if present else 'required'} for kind {self.kind!r}")
        if self.kind == "ps" and self.parity not in (0, 1):
            raise DescriptorError("parity must be 0 or 1")
        if self.kind == "ds" and (not isinstance(self.lowest_type, int) or self.lowest_type == 0):
            raise DescriptorError("lowest_type must be a nonzero integer")
        if self.kind == "fd" and (not isinstance(self.dim, int) or self.dim < 0):
            raise DescriptorError("dim must be a non-negative integer")

    @property
    def infinitesimal_lambda(self) -> Rational:
        """The parameter whose Casimir value is (lam^2 - 1)/2."""
        if self.kind == "ps":
            return self.lam
        if self.kind == "ds":
            return Rational(abs(self.lowest_type) - 1)
        if self.kind == "fd":
            return Rational(self.dim + 1)
        return self.highest_weight + 1

    @property
    def dominant(self) -> bool:
        lam = self.infinitesimal_lambda
        return not (lam.denominator == 1 and lam < 0)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.lam is not None:
            out["lambda"] = format_rational(self.lam)
        if self.parity is not None:
            out["parity"] = self.parity
        if self.lowest_type is not None:
            out["lowest_type"] = self.lowest_type
        if self.dim is not None:
            out["dim"] = self.dim
        if self.highest_weight is not None:
            out["highest_weight"] = format_rational(self.highest_weight)
        return out

    @classmethod
    def from_json(cls, data) -> "ModuleDescriptor":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise DescriptorError(f"descriptor is not JSON: {exc}") from None
        if not isinstance(data, Mapping):
            raise DescriptorError("descriptor must be a JSON object")
        allowed = {"kind", "lambda", "parity", "lowest_type", "dim", "highest_weight"}
        extra = set(data) - allowed
        if extra:
            raise DescriptorError(f"unknown descriptor fields {sorted(extra)}")

        def rat(key):
            if key not in data:
                return None
            try:
                return as_rational(data[key])
            except (TypeError, ValueError, ZeroDivisionError):
                raise DescriptorError(f"field {key!r} is not a rational: {data[key]!r}") from None

        def integer(key):
            if key not in data:
                return None
            v = data[key]
            if isinstance(v, bool) or not isinstance(v, int):
                raise DescriptorError(f"field {key!r} must be an integer")
            return v

        return cls(kind=data.get("kind"), lam=rat("lambda"), parity=integer("parity"),
                   lowest_type=integer("lowest_type"), dim=integer("dim"),
                   highest_weight=rat("highest_weight"))

    def build(self) -> "BandedModule":
        if self.kind == "ps":
            return principal_series(self.lam, self.parity)
        if self.kind == "ds":
            return discrete_series(self.lowest_type)
        if self.kind == "fd":
            return finite_dim(self.dim)
        return verma_reference(self.highest_weight)

    def slug(self) -> str:
        if self.kind == "ps":
            return f"ps({format_rational(self.lam)},{self.parity})"
        if self.kind == "ds":
            return f"ds({self.lowest_type})"
        if self.kind == "fd":
            return f"fd({self.dim})"
        return f"verma({format_rational(self.highest_weight)})"


@dataclass(frozen=True)
class Window:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty window")


Coefficient = Callable[[int], Rational]


@dataclass(frozen=True, eq=False)
class BandedModule:
    """An sl2 weight module on the lattice ``{n = offset mod step, lo <= n <= hi}``.

    ``bands`` maps a generator name (``Hc``/``Xp``/``Xm`` for ``ktype``
    bases, ``e``/``h``/``f`` for ``weight`` bases) to ``(shift, coeff)``
    pairs: the generator sends the n-th basis vector to
    ``sum coeff(n) * vec[n + shift]``.
    """

    descriptor: ModuleDescriptor
    basis: str
    step: int
    offset: int
    lo: int | None
    hi: int | None
    bands: Mapping[str, tuple[tuple[int, Coefficient], ...]]
    label: str = ""
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        names = COMPACT_NAMES if self.basis == "ktype" else SPLIT_NAMES
        if self.basis not in ("ktype", "weight"):
            raise ValueError("basis must be 'ktype' or 'weight'")
        if set(self.bands) != set(names):
            raise ValueError(f"bands must cover {names}")
        if not self.label:
            object.__setattr__(self, "label", self.descriptor.slug())

    # -- lattice
    def contains(self, n) -> bool:
        if not isinstance(n, int) or (n - self.offset) % self.step:
            return False
        return (self.lo is None or n >= self.lo) and (self.hi is None or n <= self.hi)

    @property
    def is_finite(self) -> bool:
        return self.lo is not None and self.hi is not None

    def default_window(self, size: int) -> Window:
        """A window of roughly ``size`` steps anchored where the lattice lives."""
        s = self.step
        if self.is_finite:
            return Window(self.lo, self.hi)
        if self.lo is not None:
            return Window(self.lo, self.lo + s * size)
        if self.hi is not None:
            return Window(self.hi - s * size, self.hi)
        half = s * (size // 2)
        lo = -half + ((self.offset + half) % s)
        hi = half - ((half - self.offset) % s)
        return Window(lo, hi)

    def points(self, window: Window) -> list[int]:
        lo, hi = window.lo, window.hi
        if self.lo is not None:
            lo = max(lo, self.lo)
        if self.hi is not None:
            hi = min(hi, self.hi)
        start = lo + ((self.offset - lo) % self.step)
        return list(range(start, hi + 1, self.step))

    def edge_distance(self, window: Window) -> dict:
        """Steps from each window point to the nearest truncation edge."""
        pts = self.points(window)
        cut_lo = self.lo is None or window.lo > self.lo
        cut_hi = self.hi is None or window.hi < self.hi
        out = {}
        for n in pts:
            d = math.inf
            if cut_lo:
                d = min(d, (n - pts[0]) // self.step)
            if cut_hi:
                d = min(d, (pts[-1] - n) // self.step)
            out[n] = d
        return out

    def enlarge(self, window: Window) -> Window:
        """Window of twice the extent (same anchor)."""
        if self.is_finite:
            return window
        width = (window.hi - window.lo) // self.step
        if self.lo is not None:
            return Window(window.lo, window.lo + 2 * width * self.step)
        if self.hi is not None:
            return Window(window.hi - 2 * width * self.step, window.hi)
        return self.default_window(2 * width)

    def window_size(self, window: Window) -> int:
        return (window.hi - window.lo) // self.step

    # -- action
    def apply_generator(self, name: str, vec: Mapping) -> dict:
        out: dict = {}
        for n, c in vec.items():
            for shift, coeff in self.bands[name]:
                m = n + shift
                if not self.contains(m):
                    continue
                a = coeff(n)
                if a:
                    s = out.get(m, 0) + a * c
                    if s:
                        out[m] = s
                    else:
                        out.pop(m, None)
        return out

    def _coords(self, x: LieElement):
        if self.basis == "ktype":
            return zip(COMPACT_NAMES, x.compact())
        return zip(SPLIT_NAMES, x.split())

    def apply(self, x: LieElement, vec: Mapping) -> dict:
        out: dict = {}
        for name, a in self._coords(x):
            if a:
                vec_axpy(out, a, self.apply_generator(name, vec))
        return out

    def apply_word(self, word: Iterable[LieElement], vec: Mapping) -> dict:
        """Apply ``word[0] * word[1] * ...`` (rightmost first)."""
        for x in reversed(list(word)):
            vec = self.apply(x, vec)
        return vec

    def __repr__(self) -> str:
        return f"BandedModule({self.label})"


@dataclass(frozen=True, eq=False)
class DirectSum:
    """Direct sum of modules; basis keys are ``(summand index, key)``."""

    summands: tuple
    label: str = ""
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.label:
            object.__setattr__(self, "label", " + ".join(m.label for m in self.summands))

    @property
    def is_finite(self) -> bool:
        return all(m.is_finite for m in self.summands)

    @property
    def descriptor(self):
        return None

    def default_window(self, size: int):
        return tuple(m.default_window(size) for m in self.summands)

    def enlarge(self, window):
        return tuple(m.enlarge(w) for m, w in zip(self.summands, window))

    def window_size(self, window) -> int:
        return max(m.window_size(w) for m, w in zip(self.summands, window))

    def points(self, window) -> list:
        return [(i, n) for i, (m, w) in enumerate(zip(self.summands, window)) for n in m.points(w)]

    def edge_distance(self, window) -> dict:
        out = {}
        for i, (m, w) in enumerate(zip(self.summands, window)):
            for n, d in m.edge_distance(w).items():
                out[(i, n)] = d
        return out

    def contains(self, key) -> bool:
        i, n = key
        return 0 <= i < len(self.summands) and self.summands[i].contains(n)

    def apply(self, x: LieElement, vec: Mapping) -> dict:
        parts: dict = {}
        for (i, n), c in vec.items():
            parts.setdefault(i, {})[n] = c
        out = {}
        for i, v in parts.items():
            for n, c in self.summands[i].apply(x, v).items():
                out[(i, n)] = c
        return out

    def apply_word(self, word, vec):
        for x in reversed(list(word)):
            vec = self.apply(x, vec)
        return vec

    def __repr__(self) -> str:
        return f"DirectSum({self.label})"


# ---------------------------------------------------------------------------
# constructors

def _ktype_bands(lam: Rational):
    one = lam + 1
    return {
        "Hc": ((0, lambda n: Rational(n)),),
        "Xp": ((2, lambda n: (one + n) / 2),),
        "Xm": ((-2, lambda n: (one - n) / 2),),
    }


def principal_series(lam, parity: int) -> BandedModule:
    lam = as_rational(lam)
    desc = ModuleDescriptor("ps", lam=lam, parity=parity)
    return BandedModule(desc, "ktype", 2, parity % 2, None, None, _ktype_bands(lam))


def discrete_series(lowest_type: int) -> BandedModule:
    """Holomorphic discrete series for ``lowest_type >= 1``.

    A negative argument gives the antiholomorphic partner supported on
    ``n <= lowest_type``; both carry ``lam = |lowest_type| - 1``.
    """
    if not isinstance(lowest_type, int) or lowest_type == 0:
        raise DescriptorError("lowest type must be a nonzero integer")
    l = abs(lowest_type)
    lam = Rational(l - 1)
    desc = ModuleDescriptor("ds", lowest_type=lowest_type)
    lo, hi = (l, None) if lowest_type > 0 else (None, -l)
    return BandedModule(desc, "ktype", 2, l % 2, lo, hi, _ktype_bands(lam))


def finite_dim(m: int) -> BandedModule:
    if not isinstance(m, int) or m < 0:
        raise DescriptorError("finite_dim needs m >= 0")
    desc = ModuleDescriptor("fd", dim=m)
    bands = {
        "h": ((0, lambda j: Rational(m - 2 * j)),),
        "f": ((1, lambda j: Rational(1)),),
        "e": ((-1, lambda j: Rational(j * (m - j + 1))),),
    }
    return BandedModule(desc, "weight", 1, 0, 0, m, bands)


def verma_reference(mu) -> BandedModule:
    mu = as_rational(mu)
    desc = ModuleDescriptor("verma", highest_weight=mu)
    bands = {
        "h": ((0, lambda j: mu - 2 * j),),
        "f": ((1, lambda j: Rational(1)),),
        "e": ((-1, lambda j: j * (mu - j + 1)),),
    }
    return BandedModule(desc, "weight", 1, 0, 0, None, bands)


def finite_dim_ktype(lam: int) -> BandedModule:
    """The finite-dimensional quotient of ``principal_series(lam, lam+1 mod 2)``.

    Same band formulas on the lattice ``|n| <= lam - 1``; dimension ``lam``.
    """
    if not isinstance(lam, int) or lam < 1:
        raise NoReducibility("needs a positive integer parameter")
    desc = ModuleDescriptor("fd", dim=lam - 1)
    return BandedModule(desc, "ktype", 2, (lam + 1) % 2, -(lam - 1), lam - 1,
                        _ktype_bands(Rational(lam)), label=f"fd({lam - 1})[ktype]")


# ---------------------------------------------------------------------------
# window matrices and invariants

def operator_window_matrix(M, x: LieElement, window) -> ExactMatrix:
    """Matrix of ``x`` on the window basis, ascending keys, out-of-window targets dropped."""
    pts = M.points(window)
    pos = {k: i for i, k in enumerate(pts)}
    ent = {}
    for j, k in enumerate(pts):
        for t, c in M.apply(x, {k: Rational(1)}).items():
            i = pos.get(t)
            if i is not None:
                ent[(i, j)] = c
    return ExactMatrix(len(pts), len(pts), ent)


def interior_indices(M, window, margin: int) -> list[int]:
    dist = M.edge_distance(window)
    return [i for i, k in enumerate(M.points(window)) if dist[k] >= margin]


def relation_defects(M, window) -> list[str]:
    """Check ``[h,e]=2e``, ``[h,f]=-2f``, ``[e,f]=h`` on interior columns of window matrices."""
    Em = operator_window_matrix(M, E, window)
    Fm = operator_window_matrix(M, F, window)
    Hm = operator_window_matrix(M, H, window)
    checks = {
        "[h,e]=2e": Hm @ Em - Em @ Hm - Em.scale(2),
        "[h,f]=-2f": Hm @ Fm - Fm @ Hm + Fm.scale(2),
        "[e,f]=h": Em @ Fm - Fm @ Em - Hm,
    }
    inner = set(interior_indices(M, window, 2))
    bad = []
    for name, D in checks.items():
        cols = {c for (_, c) in D.entries}
        if cols & inner:
            bad.append(name)
    return bad


def casimir_apply(M, vec: Mapping) -> dict:
    """``(ef + fe + h^2/2) vec`` computed on the full lattice."""
    out = M.apply_word((E, F), vec)
    vec_axpy(out, 1, M.apply_word((F, E), vec))
    vec_axpy(out, Rational(1, 2), M.apply_word((H, H), vec))
    return out


def casimir_scalar(M, window) -> Rational:
    value = None
    for k in M.points(window):
        w = casimir_apply(M, {k: Rational(1)})
        c = w.get(k, Rational(0))
        if set(w) - {k}:
            raise NonScalar(f"Casimir moves basis vector {k!r}")
        if value is None:
            value = c
        elif c != value:
            raise NonScalar(f"Casimir eigenvalue {c} at {k!r} differs from {value}")
    if value is None:
        raise NonScalar("empty window")
    return value


def expected_casimir(lam) -> Rational:
    lam = Rational(lam)
    return (lam * lam - 1) / 2


# ---------------------------------------------------------------------------
# exact sequences

@dataclass(frozen=True, eq=False)
class ShortExactSequence:
    """``0 -> sub -> total -> quotient -> 0`` with basis-key correspondences.

    ``include`` and ``project`` send basis keys to basis keys (the maps in
    this catalog are coordinate inclusions and projections); a key missing
    from ``project`` maps to zero.
    """

    sub: object
    total: object
    quotient: object
    include: Callable
    project: Callable
    label: str = ""

    def window_maps(self, size: int):
        """Inclusion and projection as ExactMatrix on matched windows."""
        wt = self.total.default_window(size)
        tp = self.total.points(wt)
        tpos = {k: i for i, k in enumerate(tp)}
        sp = [k for k in self.sub.points(self.sub.default_window(size)) if self.include(k) in tpos]
        qp_all = [q for q in (self.project(k) for k in tp) if q is not None]
        qpos = {k: i for i, k in enumerate(qp_all)}
        inc = ExactMatrix(len(tp), len(sp), {(tpos[self.include(k)], j): 1 for j, k in enumerate(sp)})
        ent = {}
        for j, k in enumerate(tp):
            q = self.project(k)
            if q is not None and q in qpos:
                ent[(qpos[q], j)] = 1
        proj = ExactMatrix(len(qp_all), len(tp), ent)
        return inc, proj, (sp, tp, qp_all)

    def verify(self, size: int = 32) -> list[str]:
        """Exactness and equivariance defects on a window (empty list = ok)."""
        inc, proj, (sp, tp, qp) = self.window_maps(size)
        bad = []
        if not (proj @ inc).is_zero():
            bad.append("projection after inclusion is nonzero")
        if len(sp) + len(qp) != len(tp):
            bad.append(f"rank additivity {len(sp)} + {len(qp)} != {len(tp)}")
        wt = self.total.default_window(size)
        dist = self.total.edge_distance(wt)
        for x in (E, F, H):
            for k in sp:
                t = self.include(k)
                if dist[t] < 1:
                    continue
                lhs = {self.include(a): c for a, c in self.sub.apply(x, {k: Rational(1)}).items()}
                if lhs != self.total.apply(x, {t: Rational(1)}):
                    bad.append(f"inclusion not equivariant at {k!r}")
            for t in tp:
                if dist[t] < 1:
                    continue
                img: dict = {}
                for a, c in self.total.apply(x, {t: Rational(1)}).items():
                    q = self.project(a)
                    if q is not None:
                        img[q] = img.get(q, 0) + c
                img = {q: c for q, c in img.items() if c}
                q0 = self.project(t)
                rhs = self.quotient.apply(x, {q0: Rational(1)}) if q0 is not None else {}
                if img != rhs:
                    bad.append(f"projection not equivariant at {t!r}")
        return bad


def exact_sequence_catalog(lam) -> list[ShortExactSequence]:
    """Socle sequences of the reducible principal series at a positive integer parameter.

    With ``eps = lam + 1 mod 2`` the band coefficients of
    ``principal_series(lam, eps)`` vanish at ``n = +-(lam + 1)``, so the
    span of ``|n| >= lam + 1`` is invariant; it is the sum of the two
    discrete series and the quotient is finite-dimensional.
    """
    lam = as_rational(lam)
    if lam.denominator != 1 or lam < 1:
        raise NoReducibility(f"no reducible principal series at lambda = {format_rational(lam)}")
    l = int(lam)
    eps = (l + 1) % 2
    total = principal_series(lam, eps)
    plus, minus = discrete_series(l + 1), discrete_series(-(l + 1))
    sub = DirectSum((plus, minus))
    quotient = finite_dim_ktype(l)

    def project(n):
        return n if abs(n) <= l - 1 else None

    seqs = [ShortExactSequence(sub, total, quotient, include=lambda k: k[1], project=project,
                               label=f"0 -> ds(+-{l + 1}) -> {total.label} -> fd({l - 1}) -> 0")]

    # 0 -> ds(+) -> total -> total/ds(+) -> 0, with the quotient itself an extension
    upper = BandedModule(ModuleDescriptor("ps", lam=lam, parity=eps), "ktype", 2, eps, None, l - 1,
                         _ktype_bands(lam), label=f"{total.label}/ds({l + 1})")
    seqs.append(ShortExactSequence(plus, total, upper, include=lambda k: k,
                                   project=lambda n: n if n <= l - 1 else None,
                                   label=f"0 -> ds({l + 1}) -> {total.label} -> quotient -> 0"))
    return seqs


def split_sequence(M, N) -> ShortExactSequence:
    """``0 -> M -> M + N -> N -> 0``."""
    total = DirectSum((M, N))
    return ShortExactSequence(M, total, N, include=lambda k: (0, k),
                              project=lambda key: key[1] if key[0] == 1 else None,
                              label=f"0 -> {M.label} -> {total.label} -> {N.label} -> 0")


def catalog_modules(lam) -> list:
    """Principal series of both parities, plus the discrete series and the
    finite-dimensional module when ``lam`` is a positive integer."""
    lam = as_rational(lam)
    mods = [principal_series(lam, 0), principal_series(lam, 1)]
    if lam.denominator == 1 and lam >= 1:
        l = int(lam)
        mods += [discrete_series(l + 1), discrete_series(-(l + 1)), finite_dim(l - 1)]
    return mods


def catalog_flags(lam) -> dict:
    lam = as_rational(lam)
    integral = lam.denominator == 1
    return {
        "integral": integral,
        "dominant": not (integral and lam < 0),
        "regular": lam != 0,
        "reducible_ps": integral and lam >= 1,
    }


def perturbed(M: BandedModule, generator: str, delta=1) -> BandedModule:
    """Copy of M with every coefficient of one generator's bands shifted by delta.

    Used to confirm that the verification suites are sensitive to the band data.
    """
    delta = Rational(delta)
    bands = dict(M.bands)
    bands[generator] = tuple((s, (lambda c: lambda n: c(n) + delta)(c)) for s, c in M.bands[generator])
    return BandedModule(M.descriptor, M.basis, M.step, M.offset, M.lo, M.hi, bands,
                        label=f"{M.label}[{generator}{'+' if delta >= 0 else ''}{format_rational(delta)}]")
