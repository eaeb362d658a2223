"""Small dense linear algebra helpers shared by the geometry modules."""

from __future__ import annotations

import numpy as np
from scipy.linalg import subspace_angles


def gram_residual(basis: np.ndarray) -> float:
    """Max entrywise deviation of ``basis.T @ basis`` from the identity."""
    basis = np.asarray(basis, dtype=float)
    if basis.shape[1] == 0:
        return 0.0
    return float(np.max(np.abs(basis.T @ basis - np.eye(basis.shape[1]))))


def orth(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the column span, rank decided by an absolute threshold."""
    vectors = np.asarray(vectors, dtype=float)
    dim = vectors.shape[0]
    if vectors.size == 0:
        return np.zeros((dim, 0))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > tol))
    return u[:, :rank]


def null_space(matrix: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the kernel, rank decided by an absolute threshold."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    ncols = matrix.shape[1]
    if matrix.shape[0] == 0:
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(matrix, full_matrices=True)
    rank = int(np.sum(s > tol))
    return vt[rank:].T.copy()


def complement(basis: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column span."""
    basis = np.asarray(basis, dtype=float)
    if basis.shape[1] == 0:
        return np.eye(basis.shape[0])
    return null_space(basis.T, tol)


def max_principal_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle between two column spans.

    Spans of different dimension are never equal, so that case returns pi/2.
    Two empty spans coincide (angle 0).
    """
    if a.shape[1] != b.shape[1]:
        return float(np.pi / 2)
    if a.shape[1] == 0:
        return 0.0
    return float(np.max(subspace_angles(a, b)))


def contained_in(a: np.ndarray, b: np.ndarray) -> float:
    """Distance of span(a) from span(b): norm of the part of ``a`` outside ``b``."""
    if a.shape[1] == 0:
        return 0.0
    residual = a - b @ (b.T @ a) if b.shape[1] else a
    return float(np.linalg.norm(residual, 2))


def random_orthonormal(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, k)))
    return q * np.sign(np.diag(r))
