import pytest
from conftest import SEED
from hypothesis import given, seed
from hypothesis import strategies as st
from oracles import ktype_operators

from jacquetlab.exactlinalg import ExactMatrix
from jacquetlab.hcmod import (
    DescriptorError,
    ModuleDescriptor,
    NoReducibility,
    Window,
    casimir_scalar,
    catalog_flags,
    catalog_modules,
    discrete_series,
    exact_sequence_catalog,
    expected_casimir,
    finite_dim,
    operator_window_matrix,
    perturbed,
    principal_series,
    relation_defects,
    verma_reference,
)
from jacquetlab.jacquet import truncated_quotient
from jacquetlab.liealg import E, F, H, LieElement
from jacquetlab.scalar import Rational

XP, XM = LieElement.named("Xp"), LieElement.named("Xm")


def test_principal_series_relations_on_symmetric_window():
    assert relation_defects(principal_series(Rational(1, 2), 0), Window(-32, 32)) == []


def test_principal_series_casimir():
    assert casimir_scalar(principal_series(Rational(1, 2), 0), Window(-32, 32)) == Rational(-3, 8)
    assert casimir_scalar(principal_series(Rational(3, 5), 1), Window(-31, 31)) == Rational(-8, 25)


def test_reducibility_points_at_lambda_one():
    M = principal_series(Rational(1), 0)
    assert M.apply(XM, {2: Rational(1)}) == {}
    assert M.apply(XP, {-2: Rational(1)}) == {}


def test_bands_match_dense_oracle():
    M = principal_series(Rational(3, 5), 1)
    pts = list(range(-9, 10, 2))
    e, f, h = ktype_operators(Rational(3, 5), pts)
    for x, dense in ((E, e), (F, f), (H, h)):
        mine = operator_window_matrix(M, x, Window(-9, 9)).to_dense()
        assert [[Rational(str(c)) for c in row] for row in dense.tolist()] == mine


def test_discrete_series():
    D2 = discrete_series(2)
    assert D2.apply(XM, {2: Rational(1)}) == {}
    assert casimir_scalar(D2, D2.default_window(32)) == 0
    assert discrete_series(3).points(Window(0, 9)) == [3, 5, 7, 9]
    anti = discrete_series(-3)
    assert anti.points(Window(-9, 0)) == [-9, -7, -5, -3]
    assert anti.apply(XP, {-3: Rational(1)}) == {}


def test_finite_dim():
    M = finite_dim(2)
    w = M.default_window(8)
    assert operator_window_matrix(M, H, w).to_dense() == ExactMatrix.diagonal([2, 0, -2]).to_dense()
    assert operator_window_matrix(M, F, w).to_dense() == [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    ef = M.apply(E, M.apply(F, {0: Rational(1)}))
    fe = M.apply(F, M.apply(E, {0: Rational(1)}))
    assert ef == {0: 2} and fe == {}
    assert casimir_scalar(M, w) == 4
    Z = finite_dim(0)
    assert all(Z.apply(x, {0: Rational(1)}) == {} for x in (E, F, H))


def test_verma_reference():
    V = verma_reference(Rational(-1, 2))
    Hm = operator_window_matrix(V, H, V.default_window(3))
    assert [Hm.to_dense()[i][i] for i in range(3)] == [Rational(-1, 2), Rational(-5, 2), Rational(-9, 2)]
    assert verma_reference(Rational(2)).apply(E, {3: Rational(1)}) == {}
    Q = truncated_quotient(verma_reference(Rational(7, 3)), 1)
    assert Q.dim == 1 and Q.h_action.to_dense() == [[Rational(7, 3)]]


def test_no_reducibility_at_half():
    with pytest.raises(NoReducibility):
        exact_sequence_catalog(Rational(1, 2))


@pytest.mark.parametrize("lam", [1, 2])
def test_catalog_sequences_verify(lam):
    for ses in exact_sequence_catalog(Rational(lam)):
        assert ses.verify() == [], ses.label


def test_catalog_contents():
    assert [M.label for M in catalog_modules(Rational(1, 2))] == ["ps(1/2,0)", "ps(1/2,1)"]
    assert [M.label for M in catalog_modules(Rational(1))] == ["ps(1,0)", "ps(1,1)", "ds(2)", "ds(-2)", "fd(0)"]
    assert catalog_flags(0)["regular"] is False


def test_descriptor_roundtrip_and_errors():
    d = ModuleDescriptor.from_json('{"kind": "ps", "lambda": "3/5", "parity": 1}')
    assert ModuleDescriptor.from_json(d.to_json()) == d
    assert d.build().label == "ps(3/5,1)"
    for bad in ['{"kind": "ps", "lambda": "x"}', "[]", "{", '{"kind": "fd", "dim": -1}',
                '{"kind": "fd", "m": 2}', '{"kind": "ds", "lowest_type": 0}']:
        with pytest.raises(DescriptorError):
            ModuleDescriptor.from_json(bad).build()


@pytest.mark.parametrize("gen", ["Hc", "Xp", "Xm"])
def test_perturbation_breaks_relations(gen):
    M = perturbed(principal_series(Rational(1, 2), 0), gen)
    assert relation_defects(M, M.default_window(64))


lams = st.fractions(min_value=-4, max_value=4, max_denominator=7)


@seed(SEED)
@given(lams, st.integers(0, 1))
def test_principal_series_relations_and_casimir(lam, parity):
    M = principal_series(Rational(lam), parity)
    w = M.default_window(24)
    assert relation_defects(M, w) == []
    assert casimir_scalar(M, w) == expected_casimir(lam)


@seed(SEED)
@given(st.integers(0, 9))
def test_finite_dim_relations(m):
    M = finite_dim(m)
    assert relation_defects(M, M.default_window(m + 1)) == []
    assert casimir_scalar(M, M.default_window(m + 1)) == expected_casimir(m + 1)
