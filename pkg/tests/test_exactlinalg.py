from fractions import Fraction

import pytest
from conftest import SEED
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from jacquetlab.exactlinalg import (
    ExactMatrix,
    IncompleteSpectrum,
    NotNilpotentOnSubspace,
    SubspaceBasis,
    as_rational,
    basis_change,
    charpoly,
    format_rational,
    jordan_profile,
    kernel_cokernel,
    nilpotency_order,
    poly_eval,
    poly_mul,
    primary_decomposition,
    rank,
    rational_roots,
    solve,
)
from jacquetlab.scalar import Rational


def jordan(alpha, n):
    return ExactMatrix.from_dense([[alpha if i == j else (1 if j == i + 1 else 0) for j in range(n)]
                                   for i in range(n)])


def poly_from_roots(rs):
    p = [Rational(1)]
    for r in rs:
        p = poly_mul(p, [-Rational(r), Rational(1)])
    return p


# --- rationals -------------------------------------------------------------

@pytest.mark.parametrize("text,value", [("3/5", Fraction(3, 5)), ("-2", Fraction(-2)),
                                        ("4/6", Fraction(2, 3)), (7, Fraction(7))])
def test_as_rational_accepts(text, value):
    assert as_rational(text) == value


@pytest.mark.parametrize("bad", ["x", "1.5", "1e3", "1 /2", True, 0.5, "1/0"])
def test_as_rational_rejects(bad):
    with pytest.raises((TypeError, ValueError, ZeroDivisionError)):
        as_rational(bad)


def test_format_rational_is_canonical():
    assert format_rational(Rational(-6, 4)) == "-3/2"
    assert format_rational(Rational(4, 2)) == "2"


# --- kernels and cokernels ----------------------------------------------------

def test_zero_map():
    K, C = kernel_cokernel(ExactMatrix.zero(3, 3))
    assert (K.dim, C.dim) == (3, 3)


def test_identity():
    K, C = kernel_cokernel(ExactMatrix.identity(4))
    assert (K.dim, C.dim) == (0, 0)


def test_inclusion():
    K, C = kernel_cokernel(ExactMatrix.from_dense([[1, 0], [0, 1], [0, 0]]))
    assert (K.dim, C.dim) == (0, 1)


def test_solve_inconsistent_is_none():
    A = ExactMatrix.from_dense([[1, 1], [2, 2]])
    assert solve(A, {0: Rational(1), 1: Rational(3)}) is None
    x = solve(A, {0: Rational(1), 1: Rational(2)})
    assert A.apply(x) == {0: 1, 1: 2}


def test_matrix_json_roundtrip():
    A = ExactMatrix.from_dense([[Rational(1, 3), 0], [2, Rational(-5, 7)]])
    assert ExactMatrix.from_json(A.to_json()).to_dense() == A.to_dense()


# --- roots ----------------------------------------------------------------------

def test_roots_factored():
    assert dict(rational_roots(poly_from_roots([2, 0, -2]))) == {2: 1, 0: 1, -2: 1}


def test_roots_none_for_x2_plus_1():
    assert rational_roots([1, 0, 1]) == []


def test_roots_with_multiplicity():
    p = poly_from_roots([Rational(1, 2), Rational(1, 2), Rational(-3, 2)])
    assert dict(rational_roots(p)) == {Rational(1, 2): 2, Rational(-3, 2): 1}


# --- primary decomposition ------------------------------------------------------

def test_diagonal_decomposition():
    comps = primary_decomposition(ExactMatrix.diagonal([1, 1, 5]), [1, 5])
    assert [(c.eigenvalue, c.dimension, c.nilpotency_order) for c in comps] == [(5, 1, 1), (1, 2, 1)]


def test_single_jordan_block():
    comps = primary_decomposition(jordan(3, 2), [3])
    assert [(c.eigenvalue, c.dimension, c.nilpotency_order) for c in comps] == [(3, 2, 2)]


def test_rotation_is_incomplete():
    with pytest.raises(IncompleteSpectrum):
        primary_decomposition(ExactMatrix.from_dense([[0, -1], [1, 0]]), [0])


def test_nilpotency_orders():
    a = Rational(7, 3)
    assert nilpotency_order(ExactMatrix.diagonal([a, a]), a) == 1
    assert nilpotency_order(jordan(a, 3), a) == 3
    with pytest.raises(NotNilpotentOnSubspace):
        nilpotency_order(ExactMatrix.diagonal([a, a + 1]), a)


def test_jordan_profile_and_basis_change():
    assert jordan_profile(jordan(0, 3), 0) == (2, 1, 0)
    vecs = [{0: Rational(1), 1: Rational(1)}, {1: Rational(1)}]
    P = ExactMatrix.from_columns(2, vecs)
    assert (basis_change(vecs, 2) @ P).to_dense() == ExactMatrix.identity(2).to_dense()


# --- properties -------------------------------------------------------------------

small = st.fractions(min_value=-6, max_value=6, max_denominator=5)


def matrices(max_side=5):
    return st.integers(1, max_side).flatmap(
        lambda r: st.integers(1, max_side).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@seed(SEED)
@given(matrices())
def test_rank_nullity(rows):
    A = ExactMatrix.from_dense(rows)
    K, C = kernel_cokernel(A)
    r = rank(A)
    assert K.dim + r == A.cols
    assert C.dim + r == A.rows
    for v in K.vectors():
        assert not A.apply(v)


@seed(SEED)
@given(st.lists(small, min_size=1, max_size=5), st.lists(small, min_size=0, max_size=3))
def test_roots_recovered_from_products(rs, extra_quadratics):
    p = poly_from_roots(rs)
    for c in extra_quadratics:  # x^2 + c^2 + 1 has no rational roots
        p = poly_mul(p, [c * c + 1, 0, 1])
    got = dict(rational_roots(p))
    want = {}
    for r in rs:
        want[Rational(r)] = want.get(Rational(r), 0) + 1
    assert got == want


@seed(SEED)
@given(matrices(4).filter(lambda rows: len(rows) == len(rows[0])))
def test_cayley_hamilton(rows):
    A = ExactMatrix.from_dense(rows)
    p = charpoly(A)
    acc = ExactMatrix.zero(A.rows)
    power = ExactMatrix.identity(A.rows)
    for c in p:
        acc = acc + power.scale(c)
        power = power @ A
    assert acc.is_zero()


@seed(SEED)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(1, 3)), min_size=1, max_size=4))
def test_decomposition_of_block_diagonal(blocks):
    n = sum(s for _, s in blocks)
    ent, off = {}, 0
    for a, s in blocks:
        for i in range(s):
            ent[(off + i, off + i)] = Rational(a)
            if i + 1 < s:
                ent[(off + i, off + i + 1)] = Rational(1)
        off += s
    A = ExactMatrix(n, n, ent)
    comps = primary_decomposition(A, {a for a, _ in blocks})
    for c in comps:
        sizes = [s for a, s in blocks if a == c.eigenvalue]
        assert c.dimension == sum(sizes)
        assert c.nilpotency_order == max(sizes)
    assert poly_eval(charpoly(A), comps[0].eigenvalue) == 0


@seed(SEED)
@given(st.lists(st.dictionaries(st.integers(0, 5), small.filter(bool), max_size=4), max_size=6))
def test_subspace_insert_matches_rank(vecs):
    S = SubspaceBasis(6)
    for v in vecs:
        S.insert(v)
    A = ExactMatrix.from_columns(6, vecs) if vecs else ExactMatrix.zero(6, 0)
    assert S.dim == (rank(A) if vecs else 0)
    assert all(S.contains(v) for v in vecs)


@seed(SEED)
@settings(max_examples=25)
@given(st.integers(1, 40), st.integers(1, 40),
       st.lists(st.tuples(st.integers(0, 39), st.integers(0, 39), small.filter(bool)), max_size=120))
def test_rank_nullity_sparse(rows, cols, triples):
    A = ExactMatrix(rows, cols, {(i % rows, j % cols): Rational(c) for i, j, c in triples})
    K, C = kernel_cokernel(A)
    assert K.dim + rank(A) == cols
    assert C.dim + rank(A) == rows
    assert all(not A.apply(v) for v in K.vectors())
