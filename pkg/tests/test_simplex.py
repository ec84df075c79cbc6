import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bound_atlas.linalg import is_psd, min_eigenvalues, nuclear_norm, partial_transpose, realign, trace_pair
from bound_atlas.simplex import (
    Q_to_q,
    bell_basis,
    bell_decompose,
    bell_projector,
    ccnr_norm,
    check_weights,
    full_density,
    horodecki_Q,
    horodecki_q,
    hl_density,
    hl_density_from_q,
    hl_vertices,
    hl_weights,
    pt_blocks,
    pt_min_eigenvalue,
    q_to_Q,
    weights_to_density,
    weyl_op,
)

W3 = np.exp(2j * np.pi / 3)


def simplex_point(draw_u, scale):
    u = np.sort(np.asarray(draw_u))
    return np.diff(u, prepend=0.0) * scale


hl3_points = st.lists(st.floats(0, 1), min_size=3, max_size=3).map(
    lambda u: simplex_point(u, np.array([1, 1 / 3, 1 / 2]))
)
hl4_points = st.lists(st.floats(0, 1), min_size=4, max_size=4).map(
    lambda u: simplex_point(u, np.array([1, 1 / 4, 1 / 4, 1 / 3]))
)


def test_weyl_examples():
    assert np.allclose(weyl_op(3, 0, 0), np.eye(3))
    shift = np.roll(np.eye(3), 1, axis=0)
    assert np.allclose(weyl_op(3, 0, 1), shift)
    assert np.allclose(weyl_op(3, 1, 0), np.diag([1, W3, W3**2]))
    with pytest.raises(ValueError):
        weyl_op(3, 3, 0)


@pytest.mark.parametrize("d", [3, 4])
def test_bell_basis_is_orthonormal_resolution(d):
    P = bell_basis(d)
    flat = P.reshape(d * d, d * d, d * d)
    gram = np.einsum("aij,bji->ab", flat, flat)
    assert np.allclose(gram, np.eye(d * d))
    assert np.allclose(flat.sum(axis=0), np.eye(d * d))
    assert np.allclose(np.trace(flat, axis1=1, axis2=2), 1)
    assert not P.flags.writeable


def test_bell_trace_pair_examples():
    assert np.isclose(trace_pair(bell_projector(3, 1, 2), bell_projector(3, 1, 2)), 1)
    assert abs(trace_pair(bell_projector(3, 1, 2), bell_projector(3, 2, 1))) < 1e-15


def test_q_Q_examples():
    assert np.allclose(q_to_Q(3, [0, 0, 0]), [1 / 9] * 3)
    assert np.allclose(q_to_Q(4, [0, 0, 0, 0]), [1 / 16] * 4)
    for lam in (0.0, 1.0, 3.0, 4.5, 5.0):
        assert np.allclose(q_to_Q(3, horodecki_q(lam)), [2 / 7, (5 - lam) / 21, 0], atol=1e-15)
    assert np.allclose(horodecki_Q(3.0), [2 / 7, 2 / 21, 0])


@settings(max_examples=50)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_q_round_trip_d3(q):
    assert np.allclose(Q_to_q(3, q_to_Q(3, q)), q, atol=1e-12)


@settings(max_examples=50)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_q_round_trip_d4(q):
    assert np.allclose(Q_to_q(4, q_to_Q(4, q)), q, atol=1e-12)


@settings(max_examples=30)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_q_and_Q_routes_agree_d3(q):
    assert np.allclose(hl_density_from_q(3, q), hl_density(3, q_to_Q(3, q)), atol=1e-12)


@settings(max_examples=30)
@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4))
def test_q_and_Q_routes_agree_d4(q):
    assert np.allclose(hl_density_from_q(4, q), hl_density(4, q_to_Q(4, q)), atol=1e-12)


def test_hl_density_examples():
    assert np.allclose(hl_density(3, [1 / 9] * 3), np.eye(9) / 9)
    assert np.allclose(hl_density(4, [1 / 16] * 4), np.eye(16) / 16)


def test_hl_weights_pattern_d3():
    c = bell_decompose(hl_density(3, [2 / 7, 2 / 21, 0]), 3)
    expect = np.array([[2 / 7, 2 / 21, 1 / 7], [0, 2 / 21, 1 / 7], [0, 2 / 21, 1 / 7]])
    assert np.allclose(c, expect, atol=1e-12)
    assert np.sum(np.isclose(c, 2 / 21)) == 3
    assert np.sum(np.isclose(c, 0)) == 2


@settings(max_examples=50)
@given(hl3_points)
def test_hl3_states_are_valid(Q):
    rho = hl_density(3, Q)
    assert np.isclose(np.trace(rho).real, 1)
    assert is_psd(rho, tol=1e-12)
    assert np.allclose(bell_decompose(rho, 3), hl_weights(3, Q), atol=1e-12)


@settings(max_examples=50)
@given(hl4_points)
def test_hl4_states_are_valid(Q):
    rho = hl_density(4, Q)
    assert np.isclose(np.trace(rho).real, 1)
    assert is_psd(rho, tol=1e-12)
    assert np.allclose(bell_decompose(rho, 4), hl_weights(4, Q), atol=1e-12)


@pytest.mark.parametrize("d", [3, 4])
def test_vertices_are_extreme_states(d):
    V = hl_vertices(d)
    assert V.shape == (d + 1 if d == 3 else 5, 3 if d == 3 else 4)
    for v in V:
        c = hl_weights(d, v)
        assert np.all(c >= -1e-15) and np.isclose(c.sum(), 1)


def test_bell_decompose_examples():
    assert np.allclose(bell_decompose(np.eye(9) / 9, 3), np.full((3, 3), 1 / 9))
    c = bell_decompose(bell_projector(3, 0, 0), 3)
    assert np.isclose(c[0, 0], 1) and np.isclose(np.abs(c).sum(), 1)
    with pytest.raises(ValueError):
        bell_decompose(np.diag([1.0] + [0.0] * 8), 3)


def test_full_density_examples():
    assert np.allclose(full_density(np.full((3, 3), 1 / 9)), np.eye(9) / 9)
    c = np.zeros((4, 4))
    c[2, 3] = 1
    assert np.allclose(full_density(c), bell_projector(4, 2, 3))
    with pytest.raises(ValueError):
        full_density(np.full((3, 3), 0.2))
    with pytest.raises(ValueError):
        check_weights(np.array([[1.5, -0.5], [0, 0]]))


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 4]))
def test_full_density_round_trip(seed, d):
    c = np.random.default_rng(seed).dirichlet(np.ones(d * d)).reshape(d, d)
    assert np.allclose(bell_decompose(full_density(c), d), c, atol=1e-12)


def test_horodecki_range():
    with pytest.raises(ValueError):
        horodecki_q(5.5)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_structured_paths_match_dense(d):
    rng = np.random.default_rng(d)
    c = rng.dirichlet(np.ones(d * d), size=200).reshape(-1, d, d)
    rho = weights_to_density(c)
    pt = partial_transpose(rho, (d, d))
    dense_min = min_eigenvalues(pt)
    assert np.allclose(pt_min_eigenvalue(c), dense_min, atol=1e-13)
    dense_eigs = np.sort(np.linalg.eigvalsh(pt), axis=-1)
    block_eigs = np.sort(np.linalg.eigvalsh(pt_blocks(c)).reshape(len(c), -1), axis=-1)
    assert np.allclose(block_eigs, dense_eigs, atol=1e-13)
    assert np.allclose(ccnr_norm(c), nuclear_norm(realign(rho, (d, d))), atol=1e-12)
