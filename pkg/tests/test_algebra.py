import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ymhk.algebra import SU2, U1, GroupElem, adjoint_act, bracket, bracket_cograd, get_group, inner

vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10, allow_nan=False))
quat = arrays(np.float64, 4, elements=st.floats(-1, 1, allow_nan=False)).filter(
    lambda q: np.linalg.norm(q) > 1e-3
)


def _elem(q):
    return GroupElem(SU2, q / np.linalg.norm(q))


@given(vec3, vec3)
def test_bracket_antisymmetric(x, y):
    np.testing.assert_allclose(bracket(x, y), -bracket(y, x), atol=1e-12)


@given(vec3, vec3, vec3)
def test_jacobi(x, y, z):
    j = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
    assert np.max(np.abs(j)) <= 1e-10 * (1 + np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z))


@given(vec3, vec3, vec3)
def test_ad_invariance(x, y, z):
    # <[x, y], z> = <x, [y, z]>
    lhs = inner(bracket(x, y), z)
    rhs = inner(x, bracket(y, z))
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


@given(vec3, vec3, vec3)
def test_cograd_is_gradient_of_bracket_pairing(x, y, s):
    # d/dx <S, [x, y]> is bracket_cograd(y, S)
    g = bracket_cograd(y, s)
    for a in range(3):
        e = SU2.basis(a)
        assert abs(inner(s, bracket(e, y)) - g[a]) <= 1e-9 * (1 + abs(g[a]))


@given(quat, vec3, vec3)
@settings(max_examples=50)
def test_adjoint_action_is_automorphism(q, x, y):
    g = _elem(q)
    np.testing.assert_allclose(
        adjoint_act(g, bracket(x, y)), bracket(adjoint_act(g, x), adjoint_act(g, y)), atol=1e-9
    )
    assert abs(inner(adjoint_act(g, x), adjoint_act(g, y)) - inner(x, y)) <= 1e-9 * (1 + abs(inner(x, y)))


@given(quat, quat, vec3)
@settings(max_examples=50)
def test_adjoint_action_is_homomorphism(p, q, x):
    g, h = _elem(p), _elem(q)
    np.testing.assert_allclose(adjoint_act(g * h, x), adjoint_act(g, adjoint_act(h, x)), atol=1e-9)


def test_u1_is_abelian():
    x, y = np.array([2.0]), np.array([-3.0])
    assert U1.abelian and not SU2.abelian
    assert bracket(x, y, U1)[0] == 0.0
    np.testing.assert_array_equal(adjoint_act(GroupElem.identity(U1), x), x)


def test_su2_structure_constants():
    e1, e2, e3 = (SU2.basis(a) for a in range(3))
    np.testing.assert_array_equal(bracket(e1, e2), e3)
    np.testing.assert_array_equal(bracket(e2, e3), e1)


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        bracket(np.zeros(2), np.zeros(2))
    with pytest.raises(ValueError):
        get_group("SU3")


def test_group_elem_requires_unit_norm():
    with pytest.raises(ValueError):
        GroupElem(SU2, np.array([1.0, 1.0, 0.0, 0.0]))
    rng = np.random.default_rng(0)
    g = GroupElem.random(SU2, rng)
    R = g.rotation()
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0)
