"""Bell projectors, magic-simplex states and the Hiesmayr-Loffler subfamilies.

Labeling
--------
``P[k, l]`` is the projector onto ``(I (x) W[k, l]) |Omega>``, where
``W[k, l] |s> = w**(k s) |s + l>`` with ``w = exp(2 pi i / d)`` and
``|Omega> = d**-1/2 sum_i |ii>``.  Putting the Weyl operator on the second
factor makes the printed Choi (d=3) and Chruscinski (d=4) witness matrices
reproduce their known Q-space inequalities; with the shift on the first
factor the roles of ``l`` and ``-l`` are exchanged.

Hiesmayr-Loffler families
-------------------------
In Q-coordinates the Bell weights of the d=3 family are

====================  ===========================
entry                 weight
====================  ===========================
(0, 0)                Q1
(k, 1), k = 0..2      Q2
(1, 0), (2, 0)        Q3
(k, 2), k = 0..2      (1 - Q1 - 3 Q2 - 2 Q3) / 3
====================  ===========================

and for d=4: ``Q1`` at (0,0), ``Q2`` on column ``l=1``, ``Q3`` on column
``l=2``, ``Q4`` at (1,0),(2,0),(3,0) and ``(1 - Q1 - 4 Q2 - 4 Q3 - 3 Q4) / 4``
on column ``l=3``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .linalg import trace_pair

SUPPORTED_HL = (3, 4)

# Q = A @ q + b
_Q_OF_q = {
    3: (
        np.array([[32.0, -5.0, -20.0], [-4.0, -5.0, 40.0], [-4.0, 17.5, -20.0]]) / 180.0,
        np.array([20.0, 20.0, 20.0]) / 180.0,
    ),
    4: (
        np.array(
            [
                [75.0, -11.0, -55.0, -55.0],
                [-5.0, -11.0, 165.0, -55.0],
                [-5.0, -11.0, -55.0, 165.0],
                [-5.0, 143.0 / 3.0, -55.0, -55.0],
            ]
        )
        / 880.0,
        np.array([55.0, 55.0, 55.0, 55.0]) / 880.0,
    ),
}

# q = C @ Q + e
_q_OF_Q = {
    3: (
        np.array(
            [
                [5.0 / 3.0 * 4, 5.0 / 3.0 * 3, 5.0 / 3.0 * 2],
                [8.0 / 3.0, 8.0, 8.0 / 3.0 * 5],
                [1.0, 6.0, 2.0],
            ]
        ),
        np.array([-5.0 / 3.0, -8.0 / 3.0, -1.0]),
    ),
    4: (
        np.array(
            [
                [11.0 / 4 * 5, 11.0, 11.0, 11.0 / 4 * 3],
                [15.0 / 4, 15.0, 15.0, 15.0 / 4 * 7],
                [1.0, 8.0, 4.0, 3.0],
                [1.0, 4.0, 8.0, 3.0],
            ]
        ),
        np.array([-11.0 / 4, -15.0 / 4, -1.0, -1.0]),
    ),
}


def _check_hl(d: int) -> None:
    if d not in SUPPORTED_HL:
        raise ValueError(f"Hiesmayr-Loffler family only defined for d in {SUPPORTED_HL}, got {d}")


def _coords(d: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != _ncoords(d):
        raise ValueError(f"expected {_ncoords(d)} coordinates for d={d}, got shape {x.shape}")
    return x


def _ncoords(d: int) -> int:
    return 3 if d == 3 else 4


def weyl_op(d: int, k: int, l: int) -> np.ndarray:
    """Weyl operator ``W[k, l] |s> = w**(k s) |s + l mod d>``."""
    if not (0 <= k < d and 0 <= l < d):
        raise ValueError(f"Weyl indices ({k}, {l}) out of range for d={d}")
    w = np.exp(2j * np.pi / d)
    m = np.zeros((d, d), dtype=complex)
    for s in range(d):
        m[(s + l) % d, s] = w ** (k * s)
    return m


def max_entangled(d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return v


def bell_projector(d: int, k: int, l: int) -> np.ndarray:
    v = np.kron(np.eye(d), weyl_op(d, k, l)) @ max_entangled(d)
    return np.outer(v, v.conj())


@lru_cache(maxsize=None)
def bell_basis(d: int) -> np.ndarray:
    """All Bell projectors as a read-only array of shape ``(d, d, d*d, d*d)``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    basis = np.array([[bell_projector(d, k, l) for l in range(d)] for k in range(d)])
    basis.setflags(write=False)
    return basis


def q_to_Q(d: int, q) -> np.ndarray:
    _check_hl(d)
    a, b = _Q_OF_q[d]
    return _coords(d, q) @ a.T + b


def Q_to_q(d: int, Q) -> np.ndarray:
    _check_hl(d)
    c, e = _q_OF_Q[d]
    return _coords(d, Q) @ c.T + e


def hl_weights(d: int, Q) -> np.ndarray:
    """Bell weights ``c[k, l]`` of the HL state at ``Q`` (batched over leading axes)."""
    _check_hl(d)
    Q = _coords(d, Q)
    c = np.empty(Q.shape[:-1] + (d, d))
    if d == 3:
        q1, q2, q3 = np.moveaxis(Q, -1, 0)
        rest = (1.0 - q1 - 3.0 * q2 - 2.0 * q3) / 3.0
        c[..., 0, 0] = q1
        c[..., 1:, 0] = q3[..., None]
        c[..., :, 1] = q2[..., None]
        c[..., :, 2] = rest[..., None]
    else:
        q1, q2, q3, q4 = np.moveaxis(Q, -1, 0)
        rest = (1.0 - q1 - 4.0 * (q2 + q3) - 3.0 * q4) / 4.0
        c[..., 0, 0] = q1
        c[..., 1:, 0] = q4[..., None]
        c[..., :, 1] = q2[..., None]
        c[..., :, 2] = q3[..., None]
        c[..., :, 3] = rest[..., None]
    return c


def weights_to_density(c) -> np.ndarray:
    """``sum c[k,l] P[k,l]`` without validating the weights (batched)."""
    c = np.asarray(c, dtype=float)
    d = c.shape[-1]
    basis = bell_basis(d).reshape(d * d, d * d, d * d)
    return np.tensordot(c.reshape(c.shape[:-2] + (d * d,)), basis, axes=(-1, 0))


def hl_density(d: int, Q) -> np.ndarray:
    return weights_to_density(hl_weights(d, Q))


def hl_density_from_q(d: int, q) -> np.ndarray:
    """HL state built directly from the q-parameterization (no Q detour)."""
    _check_hl(d)
    q = _coords(d, q)
    P = bell_basis(d)
    ident = np.eye(d * d)
    if d == 3:
        q1, q2, q3 = q
        q4 = 0.0
    else:
        q1, q2, q3, q4 = q
    rho = q1 * P[0, 0] / (d * d - d - 1)
    rho = rho + q2 * sum(P[i, 0] for i in range(1, d)) / ((d - 1) * (d + 1))
    rho = rho + q3 * sum(P[i, 1] for i in range(d)) / d
    if d > 3:
        rho = rho + q4 * sum(P[i, z] for z in range(2, d - 1) for i in range(d)) / d
    scale = 1.0 - q1 / (d * d - d - 1) - q2 / (d + 1) - (d - 3) * q4 - q3
    return rho + scale * ident / (d * d)


def hl_vertices(d: int) -> np.ndarray:
    """Vertices of the HL density polytope in Q-space."""
    _check_hl(d)
    scale = (1.0, 1.0 / 3.0, 1.0 / 2.0) if d == 3 else (1.0, 0.25, 0.25, 1.0 / 3.0)
    return np.vstack([np.zeros(len(scale)), np.diag(scale)])


def bell_decompose(rho, d: int, tol: float = 1e-10) -> np.ndarray:
    """Recover ``c[k, l] = Tr[P[k,l] rho]`` for a Bell-diagonal operator.

    Raises
    ------
    ValueError
        If ``rho`` has a component outside the span of the Bell projectors,
        or the weights are not real.
    """
    rho = np.asarray(rho)
    P = bell_basis(d)
    c = np.array([[trace_pair(P[k, l], rho) for l in range(d)] for k in range(d)])
    if np.max(np.abs(c.imag)) > tol:
        raise ValueError("Bell weights are not real")
    c = c.real
    residual = np.max(np.abs(rho - weights_to_density(c)))
    if residual > tol:
        raise ValueError(f"operator is not Bell-diagonal (residual {residual:.3g})")
    return c


def check_weights(c, tol: float = 1e-12) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"weights must form a d x d grid, got shape {c.shape}")
    if np.min(c) < -tol:
        raise ValueError("weights must be nonnegative")
    if abs(c.sum() - 1.0) > tol:
        raise ValueError(f"weights must sum to 1, got {c.sum():.15g}")
    return c


def full_density(c) -> np.ndarray:
    """Magic-simplex state ``sum c[k,l] P[k,l]`` after validating the weights."""
    return weights_to_density(check_weights(c))


def horodecki_q(lam) -> np.ndarray:
    """q-parameters of the Horodecki state for ``lam`` in [0, 5] (array-friendly)."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0.0) or np.any(lam > 5.0):
        raise ValueError("lambda must lie in [0, 5]")
    return np.stack([(30.0 - 5.0 * lam) / 21.0, -8.0 * lam / 21.0, (5.0 - 2.0 * lam) / 7.0], axis=-1)


def horodecki_Q(lam) -> np.ndarray:
    """Q-coordinates of the Horodecki state; they reduce to ``(2/7, (5 - lam)/21, 0)``."""
    return q_to_Q(3, horodecki_q(lam))


# Structured paths for Bell-diagonal states.  With the labeling above,
# <a,b| rho |a',b'> = f(l, a - a') when b - a = b' - a' = l, where
# f(l, j) = d**-1 sum_k c[k, l] w**(k j): an inverse DFT of c along k.


def _coupling(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    # f[..., j, l]
    return np.fft.ifft(c, axis=-2)


@lru_cache(maxsize=None)
def _pt_block_index(d: int) -> tuple[np.ndarray, np.ndarray]:
    m, a, ap = np.meshgrid(np.arange(d), np.arange(d), np.arange(d), indexing="ij")
    return (a - ap) % d, (m - a - ap) % d


def pt_blocks(c) -> np.ndarray:
    """Partial transpose of a Bell-diagonal state as ``d`` blocks of size ``d x d``.

    Block ``m`` acts on ``span{|a, m - a>}``; the full matrix is their direct sum.
    Returns shape ``(..., d, d, d)``.
    """
    c = np.asarray(c, dtype=float)
    d = c.shape[-1]
    j, l = _pt_block_index(d)
    return _coupling(c)[..., j, l]


def pt_min_eigenvalue(c) -> np.ndarray:
    """Smallest eigenvalue of the partial transpose of ``sum c P`` (batched)."""
    return np.linalg.eigvalsh(pt_blocks(c))[..., 0].min(axis=-1)


def ccnr_norm(c) -> np.ndarray:
    """Trace norm of the realigned Bell-diagonal state: ``d**-1 sum |fft2(c)|``."""
    c = np.asarray(c, dtype=float)
    d = c.shape[-1]
    return np.abs(np.fft.fft2(c)).sum(axis=(-2, -1)) / d
