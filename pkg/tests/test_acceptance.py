"""Acceptance criteria, each at its stated tolerance and time budget.

Every test prints one line ``criterion N: PASS|FAIL ...`` (visible even
under output capture).  Criterion 7 cannot hold for the principal series
at lambda = 1/2; that half is an xfail (strict), with the analysis in the
project notes.
"""

import time

import pytest

from jacquetlab import vfilt
from jacquetlab.exactlinalg import format_rational
from jacquetlab.hcmod import (
    catalog_modules,
    finite_dim,
    perturbed,
    principal_series,
    relation_defects,
)
from jacquetlab.jacquet import (
    artin_rees_alphas,
    artin_rees_check,
    artin_rees_threshold,
    candidate_set,
    doubling_defects,
    dual_jacquet_dims,
    eigen_tower,
    stabilization_depth,
)
from jacquetlab.scalar import Rational
from jacquetlab.suites import (
    Check,
    casimir_suite,
    exactness_suite,
    fd_isomorphism,
    parse_lambdas,
    qualitative_checks,
    relations_suite,
    theorem1_suite,
    vfilt_suite,
)

LAMBDAS = parse_lambdas(["1/2", "3/5", "1", "2"])
DEPTH = 6


@pytest.fixture
def announce(capsys):
    def emit(n, ok, seconds, details=""):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {details}".rstrip())
    return emit


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def failures(checks):
    return [f"{c.name}: {c.details}" for c in checks if not c.passed]


def test_criterion_01_relations(announce):
    checks, dt = timed(lambda: relations_suite(LAMBDAS))
    bad = failures(checks)
    announce(1, not bad and dt < 5, dt, f"{len(checks)} modules")
    assert not bad and dt < 5


def test_criterion_02_casimir(announce):
    checks, dt = timed(lambda: casimir_suite(LAMBDAS))
    bad = failures(checks)
    announce(2, not bad and dt < 2, dt, f"{len(checks)} modules")
    assert not bad and dt < 2


def test_criterion_03_finite_dimensional(announce):
    results, dt = timed(lambda: [fd_isomorphism(m, DEPTH) for m in range(7)])
    ok = all(r[0] for r in results)
    announce(3, ok and dt < 2, dt, "m = 0..6")
    assert ok and dt < 2


def _tower_problems(M):
    T = eigen_tower(M, DEPTH)
    seed = T.seed_values
    cands = set(candidate_set(seed, DEPTH))
    final = T.eigen_dims(DEPTH)
    bad = []
    for k in range(1, DEPTH + 1):
        for a, d in T.eigen_dims(k).items():
            if a not in cands:
                bad.append(f"{M.label}: {format_rational(a)} outside S - 2Z")
            elif k >= stabilization_depth(seed, a) and d != final[a]:
                bad.append(f"{M.label}: dim at {format_rational(a)} moves after depth {k}")
    bad += doubling_defects(M, DEPTH)
    if not M.is_finite and M.window_size(T.window) > 512:
        bad.append(f"{M.label}: window {M.window_size(T.window)}")
    return bad


def test_criterion_04_eigenvalue_bound_and_stabilization(announce):
    bad, dt = timed(lambda: [p for lam in LAMBDAS for M in catalog_modules(lam) for p in _tower_problems(M)])
    announce(4, not bad and dt < 30, dt, "; ".join(bad[:3]))
    assert not bad and dt < 30


def test_criterion_05_dual_consistency(announce):
    def run():
        bad = []
        for lam in LAMBDAS:
            for M in catalog_modules(lam):
                T = eigen_tower(M, DEPTH)
                bad += [f"{M.label} k={k}" for k in range(1, DEPTH + 1)
                        if dual_jacquet_dims(M, k) != sum(T.eigen_dims(k).values())]
        return bad
    bad, dt = timed(run)
    announce(5, not bad, dt, f"k <= {DEPTH}; " + "; ".join(bad[:3]))
    assert not bad


def test_criterion_06_exactness(announce):
    checks, dt = timed(lambda: exactness_suite(parse_lambdas(["1", "2"]), DEPTH))
    bad = failures(checks)
    announce(6, not bad, dt, f"{len(checks) // 2} sequences")
    assert not bad


def _artin_rees(M, kmax=4):
    th = artin_rees_threshold(M, DEPTH, kmax)
    dims = [artin_rees_check(M, a, k, DEPTH)[0] for a in artin_rees_alphas(M, DEPTH, kmax)
            for k in range(kmax + 1)]
    return th, all(isinstance(d, int) and d >= 0 for d in dims)


def test_criterion_07_artin_rees_regime(announce):
    mods = [M for lam in LAMBDAS for M in catalog_modules(lam) if lam != Rational(1, 2)]
    res, dt = timed(lambda: {M.label: _artin_rees(M) for M in mods})
    bad = [label for label, (th, finite) in res.items() if th is None or not finite]
    announce(7, not bad, dt, "thresholds " + ", ".join(
        f"{k}: {format_rational(th)}" for k, (th, _) in res.items() if th is not None))
    assert not bad


@pytest.mark.xfail(strict=True, reason="two seed chains an odd integer apart: odd k never vanishes")
def test_criterion_07_artin_rees_half_integral(announce):
    mods = catalog_modules(Rational(1, 2))
    res, dt = timed(lambda: {M.label: _artin_rees(M) for M in mods})
    ok = all(th is not None and finite for th, finite in res.values())
    announce(7, ok, dt, "lambda = 1/2: no vanishing threshold for odd k (see notes)")
    assert ok


def test_criterion_08_v_filtration_axioms(announce):
    def run():
        bad = []
        for lam in LAMBDAS:
            for M in catalog_modules(lam):
                N = vfilt.nearby_cycles(M, DEPTH)
                bad += [f"{M.label}: (V2) at {format_rational(a)}" for a, ok in N.v2.items() if not ok]
                L, reps = vfilt.laurent_model(M, DEPTH)
                for a in reps:
                    bad += vfilt.t_shift_defects(L, a, DEPTH)
        sigma, o = vfilt.pin_convention()
        opposite = {v: k for k, v in vfilt.CONVENTIONS.items()}[(-sigma, o)]
        if vfilt.convention_report(opposite)["v2"]:
            bad.append("opposite convention passes (V2) on fd(2)")
        return bad
    bad, dt = timed(run)
    announce(8, not bad, dt, "; ".join(bad[:3]))
    assert not bad


def test_criterion_09_jacquet_nearby_comparison(announce):
    checks, dt = timed(lambda: theorem1_suite(parse_lambdas(["1/2", "1"]), DEPTH))
    bad = failures(checks)
    announce(9, not bad and dt < 60, dt, f"{len(checks)} modules")
    assert not bad and dt < 60


def test_criterion_10_qualitative(announce):
    checks, dt = timed(lambda: qualitative_checks(DEPTH))
    bad = failures(checks)
    announce(10, not bad, dt, "; ".join(c.name for c in checks))
    assert not bad


def test_criterion_11_mutation_sensitivity(announce, monkeypatch):
    def run():
        caught = {}
        for gen in ("Hc", "Xp", "Xm"):
            M = perturbed(principal_series(Rational(1, 2), 0), gen)
            caught[f"band {gen}+1"] = bool(failures(relations_suite_for(M)))
        monkeypatch.setattr(vfilt, "TWIST", -1)
        vfilt._PINNED.pop(-1, None)
        lams = parse_lambdas(["1/2"])
        caught["twist sign"] = bool(failures(vfilt_suite(lams, DEPTH))) or \
            not vfilt.theorem1_compare(finite_dim(2), DEPTH, "mp").ok
        monkeypatch.setattr(vfilt, "TWIST", 1)
        return caught
    caught, dt = timed(run)
    ok = all(caught.values()) and dt < 60
    announce(11, ok, dt, ", ".join(f"{k}: {'caught' if v else 'missed'}" for k, v in caught.items()))
    assert ok


def relations_suite_for(M):
    bad = relation_defects(M, M.default_window(64))
    return [Check(f"relations {M.label}", not bad, "; ".join(bad))]
