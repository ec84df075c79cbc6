import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bound_atlas.linalg import (
    hermiticity_defect,
    is_psd,
    min_eigenvalues,
    nuclear_norm,
    partial_transpose,
    realign,
    trace_pair,
)
from bound_atlas.simplex import bell_projector

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def random_state(rng, d=3):
    g = rng.normal(size=(d * d, d * d)) + 1j * rng.normal(size=(d * d, d * d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@given(arrays(np.float64, (9, 9), elements=finite), arrays(np.float64, (9, 9), elements=finite))
def test_partial_transpose_is_an_involution(re, im):
    m = re + 1j * im
    assert np.allclose(partial_transpose(partial_transpose(m, (3, 3)), (3, 3)), m)


@given(arrays(np.float64, (3, 3), elements=finite), arrays(np.float64, (3, 3), elements=finite))
def test_partial_transpose_of_product(a, b):
    out = partial_transpose(np.kron(a, b), (3, 3))
    assert np.allclose(out, np.kron(a, b.T))


def test_partial_transpose_first_subsystem():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(3, 3)), rng.normal(size=(4, 4))
    assert np.allclose(partial_transpose(np.kron(a + a.T, b), (3, 4), sys=0), np.kron(a + a.T, b))
    c = rng.normal(size=(3, 3))
    assert np.allclose(partial_transpose(np.kron(c, b), (3, 4), sys=0), np.kron(c.T, b))


def test_partial_transpose_batched():
    rng = np.random.default_rng(1)
    ms = rng.normal(size=(5, 16, 16))
    out = partial_transpose(ms, (4, 4))
    for m, o in zip(ms, out):
        assert np.allclose(o, partial_transpose(m, (4, 4)))


def test_partial_transpose_rejects_bad_dims():
    with pytest.raises(ValueError):
        partial_transpose(np.eye(9), (2, 4))


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_partial_transpose_preserves_trace_and_hermiticity(seed):
    rho = random_state(np.random.default_rng(seed))
    pt = partial_transpose(rho, (3, 3))
    assert np.isclose(np.trace(pt), 1.0)
    assert hermiticity_defect(pt) < 1e-12


def test_bell_projector_partial_transpose_is_swap_over_d():
    P = bell_projector(3, 0, 0)
    pt = partial_transpose(P, (3, 3))
    swap = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            swap[3 * i + j, 3 * j + i] = 1
    assert np.allclose(pt, swap / 3)
    assert np.isclose(min_eigenvalues(pt), -1 / 3)
    v = is_psd(pt)
    assert not v.is_psd and np.isclose(v.min_eigenvalue, -1 / 3)


def test_is_psd_examples():
    assert is_psd(np.eye(9) / 9).is_psd
    assert is_psd(np.diag([1.0] + [0.0] * 8))
    assert not is_psd(np.diag([1.0, -1e-6]))
    assert is_psd(np.diag([1.0, -1e-12]))


def test_is_psd_rejects_non_hermitian():
    with pytest.raises(ValueError):
        is_psd(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_realign_examples():
    assert np.isclose(nuclear_norm(realign(np.eye(9) / 9, (3, 3))), 1 / 3)
    assert np.isclose(nuclear_norm(realign(bell_projector(3, 0, 0), (3, 3))), 3.0)


def test_realign_product_is_rank_one():
    rng = np.random.default_rng(2)
    ra = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    ra = ra @ ra.conj().T
    rb = rng.normal(size=(3, 3))
    rb = rb @ rb.T
    r = realign(np.kron(ra, rb), (3, 3))
    s = np.linalg.svd(r, compute_uv=False)
    assert np.sum(s > 1e-10 * s[0]) == 1
    assert np.isclose(nuclear_norm(r), np.linalg.norm(ra) * np.linalg.norm(rb))


def test_realign_matches_index_definition():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(12, 12))
    r = realign(m, (3, 4))
    t = m.reshape(3, 4, 3, 4)
    for i in range(3):
        for ip in range(3):
            for j in range(4):
                for jp in range(4):
                    assert r[i * 3 + ip, j * 4 + jp] == t[i, j, ip, jp]


def test_nuclear_norm_examples():
    assert nuclear_norm(np.zeros((4, 4))) == 0
    assert np.isclose(nuclear_norm(np.eye(5)), 5)


def test_trace_pair_examples():
    rng = np.random.default_rng(4)
    rho = random_state(rng)
    assert np.isclose(trace_pair(np.eye(9), rho), 1.0)
    assert abs(trace_pair(bell_projector(3, 0, 0), bell_projector(3, 0, 1))) < 1e-15
