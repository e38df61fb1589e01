"""Verification suites shared by the command line and the test-suite.

Every suite returns a list of :class:`Check` records and never raises:
an exception inside one check turns that check red with the exception
text as details.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from . import vfilt
from .exactlinalg import as_rational, format_rational
from .hcmod import (
    casimir_scalar,
    catalog_modules,
    discrete_series,
    exact_sequence_catalog,
    expected_casimir,
    finite_dim,
    relation_defects,
    split_sequence,
)
from .jacquet import (
    artin_rees_alphas,
    artin_rees_check,
    artin_rees_threshold,
    doubling_defects,
    dual_jacquet_dims,
    eigen_tower,
    exactness_check,
    jacquet_module,
    structure_report,
    tower_defects,
)
from .scalar import Rational

SUITES = ("relations", "casimir", "jacquet", "artinrees", "exactness", "vfilt", "theorem1")
DEFAULT_LAMBDAS = ("1/2", "3/5", "1", "2")
RELATION_WINDOW = 64


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    details: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "details": self.details}


def guarded(name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    try:
        ok, details = fn()
    except Exception as exc:  # a crashing check is a failing check
        return Check(name, False, f"{type(exc).__name__}: {exc}")
    return Check(name, bool(ok), details)


def parse_lambdas(values: Iterable) -> list[Rational]:
    return [as_rational(v) for v in values]


def _defects(items: list[str]) -> tuple[bool, str]:
    return not items, "; ".join(items[:4])


def _catalog(lams):
    for lam in lams:
        yield from catalog_modules(lam)


# ---------------------------------------------------------------------------

def relations_suite(lams, depth: int = 6) -> list[Check]:
    return [guarded(f"relations {M.label}",
                    lambda M=M: _defects(relation_defects(M, M.default_window(RELATION_WINDOW))))
            for M in _catalog(lams)]


def casimir_suite(lams, depth: int = 6) -> list[Check]:
    def one(M):
        got = casimir_scalar(M, M.default_window(RELATION_WINDOW))
        want = expected_casimir(M.descriptor.infinitesimal_lambda)
        return got == want, f"{format_rational(got)} vs {format_rational(want)}"
    return [guarded(f"casimir {M.label}", lambda M=M: one(M)) for M in _catalog(lams)]


def fd_isomorphism(m: int, depth: int = 6) -> tuple[bool, str]:
    """J(fd(m)) against fd(m): weights, semisimple h and the scalars e f on each weight."""
    J = jacquet_module(finite_dim(m), max(depth, m + 1))
    want = [Rational(m - 2 * j) for j in range(m + 1)]
    if J.eigenvalues() != want or any(s.dimension != 1 or s.nilpotency_order != 1 for s in J.spaces):
        return False, f"spectrum {[format_rational(a) for a in J.eigenvalues()]}"
    for a, hb in J.h_blocks.items():
        if hb.to_dense() != [[a]]:
            return False, f"h block at {format_rational(a)}"
    for j in range(m):
        a = want[j]
        ef = (J.e_blocks[(a - 2, a)] @ J.f_blocks[(a, a - 2)]).to_dense()
        if ef != [[Rational((j + 1) * (m - j))]]:
            return False, f"ef at {format_rational(a)} is {ef}"
    return True, f"{m + 1} weights"


def qualitative_checks(depth: int = 6) -> list[Check]:
    def single_chain(l):
        r = structure_report(jacquet_module(discrete_series(l), depth))
        dims = [e["dim"] for e in r["eigenvalues"]]
        return r["chain_count"] == 1 and max(dims) <= 1, f"chains {r['chains']}"

    def fd0():
        J = jacquet_module(finite_dim(0), depth)
        return sum(J.dims().values()) == 1, f"dims {J.dims()}"

    def diagnostic():
        from .cli import diagnostic_payload, golden_path, read_golden
        got = diagnostic_payload(depth)
        want = read_golden(golden_path("diagnostic_lambda_1.json"))
        return got == want and got["fires"], f"max nilpotency {got['max_nilpotency']}"

    return [guarded("single chain ds(2)", lambda: single_chain(2)),
            guarded("single chain ds(3)", lambda: single_chain(3)),
            guarded("J(fd(0)) one-dimensional", fd0),
            guarded("non-semisimple diagnostic ps(1,1)", diagnostic)]


def jacquet_suite(lams, depth: int = 6) -> list[Check]:
    out = []
    for M in _catalog(lams):
        out.append(guarded(f"tower {M.label}", lambda M=M: _defects(tower_defects(eigen_tower(M, depth)))))
        out.append(guarded(f"window doubling {M.label}", lambda M=M: _defects(doubling_defects(M, depth))))

        def dual(M=M):
            T = eigen_tower(M, depth)
            bad = [k for k in range(1, depth + 1)
                   if dual_jacquet_dims(M, k) != sum(T.eigen_dims(k).values())]
            return not bad, f"mismatched depths {bad}" if bad else ""
        out.append(guarded(f"dual dims {M.label}", dual))
        out.append(guarded(f"n-finite {M.label}", lambda M=M: (jacquet_module(M, depth).n_finite, "")))
    out += [guarded(f"J(fd({m})) = fd({m})", lambda m=m: fd_isomorphism(m, depth)) for m in range(7)]
    out += qualitative_checks(depth)
    return out


def artinrees_suite(lams, depth: int = 6, kmax: int = 4) -> list[Check]:
    def one(M):
        th = artin_rees_threshold(M, depth, kmax)
        if th is not None:
            return True, f"vanishes for alpha <= {format_rational(th)}, k <= {kmax}"
        fails = []
        for a in artin_rees_alphas(M, depth, kmax):
            fails += [f"({format_rational(a)}, {k}): {d}"
                      for k in range(kmax + 1) for d, ok in [artin_rees_check(M, a, k, depth)] if not ok]
        return False, "no vanishing threshold; nonzero at " + ", ".join(fails[:6])
    return [guarded(f"artin-rees {M.label}", lambda M=M: one(M)) for M in _catalog(lams)]


def exactness_suite(lams, depth: int = 6) -> list[Check]:
    out = []
    for lam in lams:
        if lam.denominator != 1 or lam < 1:
            continue
        seqs = exact_sequence_catalog(lam)
        l = int(lam)
        seqs.append(split_sequence(discrete_series(l + 1), finite_dim(l - 1)))
        for ses in seqs:
            out.append(guarded(f"sequence {ses.label}", lambda s=ses: _defects(s.verify())))
            out.append(guarded(f"exactness {ses.label}",
                               lambda s=ses: _defects(exactness_check(s, depth).mismatches)))
    return out


def vfilt_suite(lams, depth: int = 6) -> list[Check]:
    def pinned():
        sigma, o = vfilt.pin_convention()
        key = {v: k for k, v in vfilt.CONVENTIONS.items()}[(sigma, o)]
        return True, key

    def opposite():
        sigma, o = vfilt.pin_convention()
        key = {v: k for k, v in vfilt.CONVENTIONS.items()}[(-sigma, o)]
        r = vfilt.convention_report(key)
        return not r["v2"], f"{key}: v2 {r['v2']}"

    out = [guarded("convention pinned on fd(2)", pinned),
           guarded("opposite convention fails (V2) on fd(2)", opposite)]

    def module(M):
        L, reps = vfilt.laurent_model(M, depth)
        bad = []
        for a in reps:
            if not vfilt.check_v2(vfilt.gr_v(L, a, depth)):
                bad.append(f"(V2) fails at {format_rational(a)}")
            bad += vfilt.t_shift_defects(L, a, depth)
            bad += vfilt.stability_defects(L, a, depth)
            bad += vfilt.check_v1_generation(L, a, 1, depth).failures
        return _defects(bad)
    out += [guarded(f"v-filtration {M.label}", lambda M=M: module(M)) for M in _catalog(lams)]
    return out


def theorem1_suite(lams, depth: int = 6) -> list[Check]:
    def one(M):
        R = vfilt.theorem1_compare(M, depth)
        bad = [f"{format_rational(g)}: {j} vs {n}" for g, j, n, ok in R.rows if not ok]
        bad += [f"{kind} {format_rational(a)}->{format_rational(b)}: {x} vs {y}"
                for kind, (a, b), x, y, ok in R.block_rows if not ok]
        return _defects(bad)
    return [guarded(f"comparison {M.label}", lambda M=M: one(M)) for M in _catalog(lams)]


RUNNERS = {
    "relations": relations_suite,
    "casimir": casimir_suite,
    "jacquet": jacquet_suite,
    "artinrees": artinrees_suite,
    "exactness": exactness_suite,
    "vfilt": vfilt_suite,
    "theorem1": theorem1_suite,
}


def golden_checks(depth: int = 6) -> list[Check]:
    from .cli import GOLDEN_LAMBDAS, catalog_golden_name, catalog_payload, golden_path, read_golden

    def one(lam):
        got = catalog_payload(lam, depth)
        want = read_golden(golden_path(catalog_golden_name(lam)))
        return got == want, "" if got == want else "regenerated catalog differs from golden"
    return [guarded(f"golden catalog {format_rational(as_rational(lam))}", lambda lam=lam: one(lam))
            for lam in GOLDEN_LAMBDAS]


def run_suite(name: str, lams, depth: int = 6) -> list[Check]:
    lams = parse_lambdas(lams)
    if name == "all":
        out = []
        for s in SUITES:
            out += RUNNERS[s](lams, depth)
        return out + golden_checks(depth)
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}")
    return RUNNERS[name](lams, depth)
