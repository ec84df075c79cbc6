"""Dense matrix primitives for bipartite operators.

Every function accepts either a single square matrix or a stack of them
(shape ``(..., n, n)``) so the samplers can push whole batches through the
same code used for one-off checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10


def _split(mat: np.ndarray, dims) -> tuple[int, int]:
    if dims is None:
        raise ValueError("a bipartite split (dA, dB) is required")
    d_a, d_b = (int(v) for v in dims)
    n = mat.shape[-1]
    if mat.ndim < 2 or mat.shape[-2] != n:
        raise ValueError(f"expected square matrices, got shape {mat.shape}")
    if d_a * d_b != n:
        raise ValueError(f"split {d_a}x{d_b} does not match dimension {n}")
    return d_a, d_b


def partial_transpose(mat, dims, sys: int = 1) -> np.ndarray:
    """Transpose the indices of one subsystem of a bipartite operator.

    Parameters
    ----------
    mat : array_like
        Matrix of shape ``(..., dA*dB, dA*dB)``.
    dims : tuple of int
        Subsystem dimensions ``(dA, dB)``.
    sys : {0, 1}
        Subsystem to transpose; ``1`` (the second factor) by default.
    """
    mat = np.asarray(mat)
    d_a, d_b = _split(mat, dims)
    lead = mat.shape[:-2]
    t = mat.reshape(lead + (d_a, d_b, d_a, d_b))
    k = len(lead)
    axes = list(range(k))
    if sys == 1:
        axes += [k, k + 3, k + 2, k + 1]
    elif sys == 0:
        axes += [k + 2, k + 1, k, k + 3]
    else:
        raise ValueError(f"sys must be 0 or 1, got {sys}")
    return t.transpose(axes).reshape(mat.shape)


def realign(mat, dims) -> np.ndarray:
    """Realignment ``R[(i,k),(j,l)] = M[(i,j),(k,l)]``.

    The result has shape ``(..., dA**2, dB**2)``. For a product operator
    ``A (x) B`` it equals ``vec(A) vec(B)^T``.
    """
    mat = np.asarray(mat)
    d_a, d_b = _split(mat, dims)
    lead = mat.shape[:-2]
    k = len(lead)
    t = mat.reshape(lead + (d_a, d_b, d_a, d_b))
    axes = list(range(k)) + [k, k + 2, k + 1, k + 3]
    return t.transpose(axes).reshape(lead + (d_a * d_a, d_b * d_b))


def nuclear_norm(mat) -> np.ndarray | float:
    """Sum of singular values (trace norm)."""
    mat = np.asarray(mat)
    s = np.linalg.svd(mat, compute_uv=False).sum(axis=-1)
    return float(s) if s.ndim == 0 else s


def trace_pair(a, b) -> complex:
    """Hilbert-Schmidt pairing ``Tr[A^dagger B]``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def hermiticity_defect(mat) -> float:
    mat = np.asarray(mat)
    return float(np.max(np.abs(mat - np.swapaxes(mat, -1, -2).conj()), initial=0.0))


@dataclass(frozen=True)
class PsdVerdict:
    is_psd: bool
    min_eigenvalue: float
    tolerance: float

    def __bool__(self) -> bool:
        return self.is_psd


def min_eigenvalues(mats) -> np.ndarray:
    """Smallest eigenvalue of each Hermitian matrix in a stack."""
    return np.linalg.eigvalsh(np.asarray(mats))[..., 0]


def is_psd(mat, tol: float = DEFAULT_TOL) -> PsdVerdict:
    """Decide positive semidefiniteness from the full Hermitian spectrum.

    The comparison is non-strict: ``min_eigenvalue >= -tol`` counts as PSD,
    so states on the boundary of the PPT set classify as PPT.

    Raises
    ------
    ValueError
        If the input is not Hermitian to within ``tol`` (max-entry norm).
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    defect = hermiticity_defect(mat)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3g} > {tol:.3g})")
    lam = float(np.linalg.eigvalsh(mat)[0])
    return PsdVerdict(lam >= -tol, lam, tol)
