"""Extrinsic geometry of a submanifold at one point of a quaternionic space form.

Curvature conventions: ``R(X, Y, Z, W) = g(R(X, Y) Z, W)`` and the sectional
curvature of an orthonormal pair is ``K(X, Y) = R(X, Y, Y, X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, FrameError
from .linalg import complement
from .quat import DEFAULT_TOL, QuaternionicTriple, Subspace, _frozen, _maxabs, decompose


@dataclass(frozen=True)
class PointDatum:
    """One point: tangent and normal frames plus h^r_{ij} stacked as ``h[r, i, j]``."""

    triple: QuaternionicTriple
    c: float
    tangent: Subspace
    normal: Subspace
    h: np.ndarray
    sym_tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        n, q, N = self.tangent.dim, self.normal.dim, self.triple.dim
        if self.tangent.ambient_dim != N or self.normal.ambient_dim != N:
            raise DimensionError(f"frames must live in R^{N}")
        if n + q != N:
            raise DimensionError(f"tangent ({n}) and normal ({q}) dimensions must add up to {N}")
        if h.shape != (q, n, n):
            raise DimensionError(f"h must have shape {(q, n, n)}, got {h.shape}")
        cross = _maxabs(self.tangent.basis.T @ self.normal.basis)
        if cross > self.tangent.tol:
            raise FrameError(f"tangent and normal frames not orthogonal, residual {cross:.1e}", cross)
        asym = _maxabs(h - h.transpose(0, 2, 1))
        if asym > self.sym_tol:
            raise FrameError(f"h is not symmetric, residual {asym:.1e}", asym)
        object.__setattr__(self, "h", _frozen(h))
        object.__setattr__(self, "c", float(self.c))

    @classmethod
    def build(cls, triple, c, tangent: Subspace, h=None, normal: Subspace | None = None) -> "PointDatum":
        if normal is None:
            normal = tangent.complement()
        n, q = tangent.dim, normal.dim
        if h is None:
            h = np.zeros((q, n, n))
        return cls(triple, c, tangent, normal, h)

    @property
    def n(self) -> int:
        return self.tangent.dim

    @property
    def m(self) -> int:
        return self.triple.m

    def decomposition(self):
        return decompose(self.triple, self.tangent, self.normal)

    def with_h(self, h) -> "PointDatum":
        return PointDatum(self.triple, self.c, self.tangent, self.normal, h)

    def with_c(self, c) -> "PointDatum":
        return PointDatum(self.triple, c, self.tangent, self.normal, self.h)

    def reframed(self, q_tan: np.ndarray | None = None, q_nor: np.ndarray | None = None) -> "PointDatum":
        """Same geometry in rotated tangent/normal frames (orthogonal ``q_*``)."""
        n, q = self.n, self.normal.dim
        q_tan = np.eye(n) if q_tan is None else q_tan
        q_nor = np.eye(q) if q_nor is None else q_nor
        h = np.einsum("rs,rij,ia,jb->sab", q_nor, self.h, q_tan, q_tan)
        return PointDatum(
            self.triple, self.c, self.tangent.rotated(q_tan), self.normal.rotated(q_nor), h
        )


@dataclass(frozen=True)
class CurvatureTensor:
    R: np.ndarray

    @property
    def n(self) -> int:
        return self.R.shape[0]

    def sectional(self, i: int, j: int) -> float:
        return float(self.R[i, j, j, i])

    def symmetry_residual(self) -> float:
        R = self.R
        bianchi = R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)
        return max(
            _maxabs(R + R.transpose(1, 0, 2, 3)),
            _maxabs(R + R.transpose(0, 1, 3, 2)),
            _maxabs(R - R.transpose(2, 3, 0, 1)),
            _maxabs(bianchi),
        )

    def rotated(self, q: np.ndarray) -> "CurvatureTensor":
        return CurvatureTensor(_frozen(np.einsum("abcd,ai,bj,ck,dl->ijkl", self.R, q, q, q, q)))


def ambient_curvature(triple: QuaternionicTriple, c: float, X, Y, Z, W) -> float:
    """g(R(X, Y) Z, W) for the quaternionic space form of constant c."""
    vecs = [np.asarray(v, dtype=float) for v in (X, Y, Z, W)]
    for v in vecs:
        if v.shape != (triple.dim,):
            raise DimensionError(f"vectors must have shape ({triple.dim},), got {v.shape}")
    X, Y, Z, W = vecs
    RZ = Z.dot(Y) * X - X.dot(Z) * Y
    for J in triple.J:
        RZ = RZ + Z.dot(J @ Y) * (J @ X) - Z.dot(J @ X) * (J @ Y) + 2 * X.dot(J @ Y) * (J @ Z)
    return float(c / 4 * RZ.dot(W))


def ambient_curvature_tensor(triple: QuaternionicTriple, c: float, frame: np.ndarray) -> np.ndarray:
    """All components g(R(e_x, e_y) e_z, e_w) on the columns of ``frame``."""
    G = frame.T @ frame
    # M[a, b] = <e_a, J e_b>
    Ms = [frame.T @ J @ frame for J in triple.J]
    R = np.einsum("zy,xw->xyzw", G, G) - np.einsum("xz,yw->xyzw", G, G)
    for M in Ms:
        R = R + np.einsum("zy,wx->xyzw", M, M) - np.einsum("zx,wy->xyzw", M, M)
        R = R + 2 * np.einsum("xy,wz->xyzw", M, M)
    return c / 4 * R


def gauss_curvature(datum: PointDatum) -> CurvatureTensor:
    h = datum.h
    R = ambient_curvature_tensor(datum.triple, datum.c, datum.tangent.basis)
    R = R + np.einsum("rjk,ril->ijkl", h, h) - np.einsum("rik,rjl->ijkl", h, h)
    return CurvatureTensor(_frozen(R))


def mean_curvature(datum: PointDatum) -> tuple[np.ndarray, float]:
    H = np.trace(datum.h, axis1=1, axis2=2) / datum.n
    return H, float(H @ H)


def shape_operator(datum: PointDatum, N) -> np.ndarray:
    return np.einsum("r,rij->ij", np.asarray(N, dtype=float), datum.h)


def h_norm_sq(datum: PointDatum) -> float:
    return float(np.sum(datum.h**2))


def scalar_curvature(R: CurvatureTensor) -> float:
    K = np.einsum("ijji->ij", R.R)
    return float(np.sum(np.triu(K, 1)))


@dataclass(frozen=True)
class DiagonalFrame:
    """A datum re-expressed with e_{n+1} along H and A_{n+1} diagonal.

    ``principal`` holds the eigenvalues a_1 >= ... >= a_n of A_{n+1}.
    ``mean_curvature_zero`` flags the H = 0 branch, where the first normal
    vector is an arbitrary unit normal.
    """

    datum: PointDatum
    principal: np.ndarray
    mean_curvature_zero: bool


def diagonalizing_frame(datum: PointDatum, tol: float = DEFAULT_TOL) -> DiagonalFrame:
    H, H2 = mean_curvature(datum)
    q = datum.normal.dim
    zero = np.sqrt(H2) <= tol
    if zero:
        q_nor = np.eye(q)
    else:
        u = H / np.sqrt(H2)
        q_nor = np.column_stack([u, complement(u[:, None])])
    rotated = datum.reframed(q_nor=q_nor)
    w, v = np.linalg.eigh(rotated.h[0]) if q else (np.zeros(datum.n), np.eye(datum.n))
    order = np.argsort(-w, kind="stable")
    out = rotated.reframed(q_tan=v[:, order])
    return DiagonalFrame(out, _frozen(w[order]), bool(zero))
