from conftest import SEED
from hypothesis import given, seed
from hypothesis import strategies as st

from jacquetlab.liealg import (
    E,
    F,
    H,
    LieElement,
    NonHomogeneous,
    bracket,
    cayley_split_generators,
    compact_bracket,
    grading_degree,
)


def test_defining_relations():
    assert bracket(H, E) == E.scale(2)
    assert bracket(E, F) == H
    assert bracket(H, F) == F.scale(-2)


def test_grading_degrees():
    assert grading_degree(E) == 2
    assert grading_degree(F) == -2
    assert grading_degree(H) == 0
    assert grading_degree(E + H) is NonHomogeneous


def _compact_images():
    return cayley_split_generators()


def test_cayley_images_satisfy_split_relations():
    g = _compact_images()
    # brackets evaluated with the compact relations [Hc, X+-] = +-2 X+-, [X+, X-] = Hc
    assert compact_bracket(g["h"], g["e"]) == tuple(2 * c for c in g["e"])
    assert compact_bracket(g["e"], g["f"]) == g["h"]
    assert compact_bracket(g["h"], g["f"]) == tuple(-2 * c for c in g["f"])


def test_cayley_matches_explicit_formula():
    g = _compact_images()
    half = 1 / 2
    assert g["e"] == (half, -half, half)
    assert g["f"] == (half, half, -half)
    assert g["h"] == (0, 1, 1)


def test_cayley_is_invertible():
    for name, x in (("e", E), ("h", H), ("f", F)):
        assert LieElement.from_compact(*_compact_images()[name]) == x
    for x in (LieElement.named("Hc"), LieElement.named("Xp"), LieElement.named("Xm")):
        assert LieElement.from_compact(*x.compact()) == x


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
elements = st.builds(LieElement, coeff, coeff, coeff)


@seed(SEED)
@given(elements, elements, elements)
def test_jacobi(x, y, z):
    total = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
    assert total.is_zero()


@seed(SEED)
@given(elements, elements, coeff)
def test_bilinear_antisymmetric(x, y, a):
    assert bracket(x, y) == -bracket(y, x)
    assert bracket(x.scale(a) + y, y) == bracket(x, y).scale(a)


@seed(SEED)
@given(elements, elements)
def test_compact_bracket_agrees(x, y):
    assert LieElement.from_compact(*compact_bracket(x.compact(), y.compact())) == bracket(x, y)


@seed(SEED)
@given(st.sampled_from(["e", "h", "f"]), st.sampled_from(["e", "h", "f"]), coeff.filter(bool))
def test_degree_additive(a, b, c):
    x, y = LieElement.named(a).scale(c), LieElement.named(b)
    z = bracket(x, y)
    if not z.is_zero():
        assert grading_degree(z) == grading_degree(x) + grading_degree(y)
