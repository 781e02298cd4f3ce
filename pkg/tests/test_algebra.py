import json
from fractions import Fraction

import numpy as np
import pytest

from nilgeom import GradedAlgebra, builtin_group, builtin_group_names, load_group
from nilgeom.errors import (
    AntisymmetryViolation,
    DimensionMismatch,
    GradingViolation,
    JacobiViolation,
)


def test_builtin_groups_load_and_validate():
    names = builtin_group_names()
    assert {"heisenberg", "engel", "abelian2"} <= set(names)
    for name in names:
        alg = builtin_group(name)
        assert alg.validate()


def test_heisenberg_structure(heis):
    assert heis.step == 2
    assert heis.q == 3
    assert heis.layer_dims == (2, 1)
    assert list(heis.weights) == [1, 1, 2]
    assert heis.hom_dim == 4
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    assert np.allclose(heis.bracket(e1, e2), [0, 0, 1])
    assert np.allclose(heis.bracket(e2, e1), [0, 0, -1])


def test_engel_structure(engel):
    assert engel.q == 4
    assert engel.step == 3
    assert engel.hom_dim == 7
    e = np.eye(4)
    assert np.allclose(engel.bracket(e[0], e[1]), e[2])
    assert np.allclose(engel.bracket(e[0], e[2]), e[3])
    assert np.allclose(engel.bracket(e[1], e[2]), 0)


def test_bracket_bilinear(heis, rng):
    x, y, z = rng.standard_normal((3, 3))
    a, b = 0.7, -1.3
    lhs = heis.bracket(a * x + b * y, z)
    rhs = a * heis.bracket(x, z) + b * heis.bracket(y, z)
    assert np.allclose(lhs, rhs, atol=1e-14)
    assert np.allclose(heis.bracket(x, y), -heis.bracket(y, x), atol=1e-14)


def test_grading_violation():
    with pytest.raises(GradingViolation):
        GradedAlgebra("bad", [2, 1], {(0, 1): {0: Fraction(1)}})


def test_antisymmetry_violation():
    spec = {
        "name": "bad",
        "layers": [2, 1],
        "brackets": [[1, 2, 3, "1"], [2, 1, 3, "1"]],
    }
    with pytest.raises(AntisymmetryViolation):
        load_group(json.dumps(spec))


def test_self_bracket_rejected():
    spec = {"name": "bad", "layers": [2, 1], "brackets": [[1, 1, 3, "1"]]}
    with pytest.raises(AntisymmetryViolation):
        load_group(json.dumps(spec))


def test_jacobi_violation():
    # [e1,e2]=e4 and [e3,e4]=e5 leave [e3,[e1,e2]] uncancelled
    spec = {
        "name": "bad",
        "layers": [3, 1, 1],
        "brackets": [[1, 2, 4, "1"], [3, 4, 5, "1"]],
    }
    with pytest.raises(JacobiViolation):
        load_group(json.dumps(spec))


def test_declared_step_checked():
    spec = {"name": "bad", "step": 3, "layers": [2, 1], "brackets": [[1, 2, 3, "1"]]}
    with pytest.raises(GradingViolation):
        load_group(json.dumps(spec))


def test_decimal_coefficients_parse_exactly():
    spec = {"name": "g", "layers": [2, 1], "brackets": [[1, 2, 3, "0.1"]]}
    alg = load_group(json.dumps(spec))
    assert alg.brackets_exact[(0, 1)][2] == Fraction(1, 10)
    # bare JSON floats go through the same decimal-string path
    text = '{"name": "g", "layers": [2, 1], "brackets": [[1, 2, 3, 0.1]]}'
    alg2 = load_group(text)
    assert alg2.brackets_exact[(0, 1)][2] == Fraction(1, 10)


def test_spec_dict_round_trip(engel):
    alg = load_group(json.dumps(engel.spec_dict()))
    assert alg.layer_dims == engel.layer_dims
    assert alg.brackets_exact == engel.brackets_exact
    assert alg.norm_spec == engel.norm_spec


def test_coordinate_length_checked(heis):
    with pytest.raises(DimensionMismatch):
        heis.check_coords(np.zeros(4))


def test_layer_slices(engel):
    assert engel.layer_slice(1) == slice(0, 2)
    assert engel.layer_slice(2) == slice(2, 3)
    assert engel.layer_slice(3) == slice(3, 4)
    with pytest.raises(DimensionMismatch):
        engel.layer_slice(4)
