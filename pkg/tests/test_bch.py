from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilgeom import GradedAlgebra, bch_series, compile_group_law, dilate, inverse, multiply
from nilgeom.bch import dynkin_words
from nilgeom.errors import NonpositiveScale


def bch_reference(alg, x, y):
    """Independent oracle: the closed-form BCH expansion through order 4
    with the classical coefficients, evaluated by nested brackets."""
    br = alg.bracket
    z = np.asarray(x, float) + np.asarray(y, float)
    if alg.step >= 2:
        z = z + br(x, y) / 2.0
    if alg.step >= 3:
        z = z + (br(x, br(x, y)) + br(y, br(y, x))) / 12.0
    if alg.step >= 4:
        z = z - br(y, br(x, br(x, y))) / 24.0
    return z


@pytest.fixture(scope="module")
def filiform4():
    table = {
        (0, 1): {2: Fraction(1)},
        (0, 2): {3: Fraction(1)},
        (0, 3): {4: Fraction(1)},
    }
    return GradedAlgebra("filiform4", [2, 1, 1, 1], table)


def test_dynkin_words_low_order_coefficients():
    # merged per-word weights reproduce the classical order-2 and order-3 terms
    words = dict((w, c) for c, w in dynkin_words(3))
    assert words[(0,)] == 1 and words[(1,)] == 1
    assert words[(0, 1)] == Fraction(1, 4)
    assert words[(1, 0)] == Fraction(-1, 4)
    # [x,[x,y]]: words xxy and xyx combine to 1/12
    assert words[(0, 0, 1)] - words[(0, 1, 0)] == Fraction(1, 12)
    # [y,[x,y]]: words yxy and yyx combine to -1/12
    assert words[(1, 0, 1)] - words[(1, 1, 0)] == Fraction(-1, 12)


def test_heisenberg_frozen_value(heis):
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    z = bch_series(heis, e1, e2)
    assert np.allclose(z, [1.0, 1.0, 0.5], atol=1e-15)
    assert np.allclose(bch_reference(heis, e1, e2), z, atol=1e-15)


def test_engel_frozen_value(engel):
    e1 = np.array([1.0, 0, 0, 0])
    e2 = np.array([0.0, 1, 0, 0])
    z = bch_series(engel, e1, e2)
    expected = [1.0, 1.0, 0.5, 1.0 / 12.0]
    assert np.allclose(z, expected, atol=1e-15)
    assert np.allclose(bch_reference(engel, e1, e2), expected, atol=1e-15)


@pytest.mark.parametrize("group", ["heis", "engel", "filiform4"])
def test_series_matches_reference_oracle(group, request, rng):
    alg = request.getfixturevalue(group)
    x = rng.standard_normal((500, alg.q))
    y = rng.standard_normal((500, alg.q))
    got = bch_series(alg, x, y)
    want = bch_reference(alg, x, y)
    assert np.max(np.abs(got - want)) < 1e-12 * (1 + np.max(np.abs(want)))


def test_heisenberg_matrix_log_oracle(heis, rng):
    # faithful 3x3 unipotent representation: (a,b,c) -> [[1,a,c+ab/2],[0,1,b],[0,0,1]]
    def mat(v):
        a, b, c = v
        return np.array([[1, a, c + a * b / 2], [0, 1, b], [0, 0, 1.0]])

    for _ in range(50):
        x, y = rng.standard_normal((2, 3))
        m = mat(x) @ mat(y)
        a, b = m[0, 1], m[1, 2]
        z = np.array([a, b, m[0, 2] - a * b / 2])
        assert np.allclose(multiply(heis, x, y), z, atol=1e-13)


def test_third_coordinate_polynomial(heis, rng):
    x, y = rng.standard_normal((2, 200, 3))
    z = multiply(heis, x, y)
    expected = x[:, 2] + y[:, 2] + (x[:, 0] * y[:, 1] - x[:, 1] * y[:, 0]) / 2
    assert np.allclose(z[:, 2], expected, atol=1e-14)


@pytest.mark.parametrize("group", ["heis", "engel", "filiform4"])
def test_compiled_matches_series(group, request, rng):
    alg = request.getfixturevalue(group)
    law = compile_group_law(alg)
    x = rng.standard_normal((2000, alg.q))
    y = rng.standard_normal((2000, alg.q))
    a = law.evaluate(x, y)
    b = bch_series(alg, x, y)
    scale = 1 + np.max(np.abs(b))
    assert np.max(np.abs(a - b)) <= 1e-12 * scale


def test_compiled_exact_inverse_and_associativity(engel):
    law = compile_group_law(engel)
    x = [Fraction(1, 3), Fraction(-2, 7), Fraction(5, 2), Fraction(0)]
    y = [Fraction(4, 5), Fraction(1, 9), Fraction(-1, 2), Fraction(3)]
    z = [Fraction(-1, 4), Fraction(2), Fraction(1, 6), Fraction(-2, 3)]
    neg = [-v for v in x]
    assert law.evaluate_exact(x, neg) == [Fraction(0)] * 4
    left = law.evaluate_exact(law.evaluate_exact(x, y), z)
    right = law.evaluate_exact(x, law.evaluate_exact(y, z))
    assert left == right


def test_dilate_frozen_example(heis, rng):
    v = rng.standard_normal(3)
    d = dilate(heis, 2.0, v)
    assert np.allclose(d, [2 * v[0], 2 * v[1], 4 * v[2]], atol=1e-15)


def test_dilate_rejects_nonpositive(heis):
    with pytest.raises(NonpositiveScale):
        dilate(heis, 0.0, np.zeros(3))
    with pytest.raises(NonpositiveScale):
        dilate(heis, -1.0, np.zeros(3))


def test_dilation_is_automorphism(engel, rng):
    x, y = rng.standard_normal((2, 300, 4))
    for r in (0.25, 3.0):
        lhs = multiply(engel, dilate(engel, r, x), dilate(engel, r, y))
        rhs = dilate(engel, r, multiply(engel, x, y))
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * (1 + np.max(np.abs(rhs)))


coord = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.tuples(*([coord] * 9)))
def test_associativity_property(vals):
    from nilgeom import builtin_group

    heis = builtin_group("heisenberg")
    x = np.array(vals[0:3])
    y = np.array(vals[3:6])
    z = np.array(vals[6:9])
    lhs = multiply(heis, multiply(heis, x, y), z)
    rhs = multiply(heis, x, multiply(heis, y, z))
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * (1 + np.max(np.abs(rhs)))


@settings(max_examples=60, deadline=None)
@given(st.tuples(*([coord] * 4)))
def test_inverse_property(vals):
    from nilgeom import builtin_group

    engel = builtin_group("engel")
    x = np.array(vals)
    z = multiply(engel, x, inverse(x))
    assert np.max(np.abs(z)) < 1e-9 * (1 + np.max(np.abs(x)))
