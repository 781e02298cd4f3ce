import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilgeom import (
    HomogeneousNorm,
    builtin_group,
    default_norm,
    dilate,
    hdist,
    make_norm,
    multiply,
    sample_unit_sphere,
)
from nilgeom.errors import UncalibratedNorm


def test_koranyi_frozen_values(heis, heis_norm):
    # (|z|^4 + 16 t^2)^{1/4}: vertical unit point has norm 2, horizontal unit point 1
    assert heis_norm(np.array([0.0, 0.0, 1.0])) == pytest.approx(2.0, abs=1e-15)
    assert heis_norm(np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0, abs=1e-15)
    assert hdist(heis_norm, np.zeros(3), np.array([1.0, 0, 0])) == pytest.approx(
        1.0, abs=1e-15
    )


def test_norm_positive_definite(heis, heis_norm, rng):
    assert heis_norm(np.zeros(3)) == 0.0
    x = rng.standard_normal((100, 3))
    assert np.all(heis_norm(x) > 0)


@pytest.mark.parametrize("group", ["heis", "engel", "ab2"])
def test_homogeneity(group, request, rng):
    alg = request.getfixturevalue(group)
    norm = request.getfixturevalue(group + "_norm")
    x = rng.standard_normal((200, alg.q))
    base = norm(x)
    for r in (1e-3, 0.5, 7.0, 42.0):
        scaled = norm(dilate(alg, r, x))
        assert np.max(np.abs(scaled - r * base)) < 1e-12 * np.max(r * base)


@pytest.mark.parametrize("group", ["heis", "engel"])
def test_symmetry(group, request, rng):
    alg = request.getfixturevalue(group)
    norm = request.getfixturevalue(group + "_norm")
    x = rng.standard_normal((200, alg.q))
    from nilgeom import inverse

    assert np.allclose(norm(inverse(x)), norm(x), rtol=1e-12)


@pytest.mark.parametrize("group", ["heis", "engel"])
def test_left_invariance_of_distance(group, request, rng):
    alg = request.getfixturevalue(group)
    norm = request.getfixturevalue(group + "_norm")
    g = rng.standard_normal((50, alg.q))
    x = rng.standard_normal((50, alg.q))
    y = rng.standard_normal((50, alg.q))
    d0 = hdist(norm, x, y)
    d1 = hdist(norm, multiply(alg, g, x), multiply(alg, g, y))
    assert np.max(np.abs(d1 - d0)) < 1e-10 * (1 + np.max(d0))


def test_certified_margin_nonnegative(heis_norm, engel_norm, ab2_norm):
    for norm in (heis_norm, engel_norm, ab2_norm):
        assert norm.certified_margin is not None
        assert norm.certified_margin > -1e-9


def test_uncertified_norm_refuses_to_evaluate(heis):
    raw = HomogeneousNorm(heis, "koranyi", {"beta": 16.0})
    with pytest.raises(UncalibratedNorm):
        raw(np.array([1.0, 0.0, 0.0]))


def test_koranyi_rejected_beyond_step_two(engel):
    with pytest.raises(UncalibratedNorm):
        HomogeneousNorm(engel, "koranyi", {"beta": 16.0})


def test_triangle_inequality_sampled(heis, heis_norm, rng):
    x = rng.standard_normal((5000, 3))
    y = rng.standard_normal((5000, 3))
    slack = heis_norm(x) + heis_norm(y) - heis_norm(multiply(heis, x, y))
    assert np.min(slack) > -1e-9 * (1 + np.max(heis_norm(x)))


def test_weighted_max_triangle_on_engel(engel, engel_norm, rng):
    r = np.exp(rng.uniform(-3, 3, size=(4000, 1)))
    x = dilate(engel, r[:, 0], rng.standard_normal((4000, 4)))
    y = rng.standard_normal((4000, 4))
    slack = engel_norm(x) + engel_norm(y) - engel_norm(multiply(engel, x, y))
    assert np.min(slack) > -1e-9 * (1 + np.max(engel_norm(x)))


def test_sample_unit_sphere(engel, engel_norm, rng):
    pts = sample_unit_sphere(engel_norm, 500, rng)
    assert pts.shape == (500, 4)
    assert np.max(np.abs(engel_norm(pts) - 1.0)) < 1e-12


def test_abelian_weighted_max_is_euclidean(ab2, ab2_norm, rng):
    # single layer, eps_1 = 1: the norm is plain Euclidean length
    x = rng.standard_normal((300, 2))
    assert np.allclose(ab2_norm(x), np.linalg.norm(x, axis=-1), rtol=1e-14)


def test_make_norm_kind_override(heis):
    norm = make_norm(heis, kind="weighted-max", samples=20000, seed=3)
    assert norm.kind == "weighted-max"
    assert norm.certified_margin is not None


def test_default_norm_uses_group_file_kind(heis, engel, heis_norm, engel_norm):
    assert heis_norm.kind == "koranyi"
    assert engel_norm.kind == "weighted-max"


def test_spec_dict_round_trip(heis_norm):
    d = heis_norm.spec_dict()
    assert d["kind"] == "koranyi"
    assert float(d["params"]["beta"]) == 16.0


coords = st.tuples(*([st.floats(-10, 10, allow_nan=False)] * 6))


@settings(max_examples=60, deadline=None)
@given(coords)
def test_triangle_property_heisenberg(vals):
    heis = builtin_group("heisenberg")
    norm = default_norm(heis)
    x = np.array(vals[:3])
    y = np.array(vals[3:])
    lhs = norm(multiply(heis, x, y))
    assert lhs <= norm(x) + norm(y) + 1e-9 * (1 + lhs)
