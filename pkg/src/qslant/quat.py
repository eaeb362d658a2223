"""Quaternionic linear algebra on R^{4m}.

The model is H^m with J1, J2, J3 acting as left multiplication by i, j, k on
each quaternionic coordinate ``a + b i + c j + d k <-> (a, b, c, d)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateAngleError, DimensionError, FrameError, NotSlantError
from .linalg import complement, gram_residual, null_space

DEFAULT_TOL = 1e-10

# left multiplication by i, j, k on one quaternion (a, b, c, d)
_LEFT_I = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
_LEFT_J = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
_LEFT_K = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuaternionicTriple:
    m: int
    J: tuple

    @property
    def dim(self) -> int:
        return 4 * self.m

    def relation_residual(self) -> float:
        """Max entrywise residual of the quaternion relations and orthogonality."""
        eye = np.eye(self.dim)
        res = 0.0
        for a in range(3):
            ja, jb, jc = self.J[a], self.J[(a + 1) % 3], self.J[(a + 2) % 3]
            res = max(
                res,
                np.abs(ja @ ja + eye).max(),
                np.abs(ja @ jb - jc).max(),
                np.abs(jb @ ja + jc).max(),
                np.abs(ja.T @ ja - eye).max(),
            )
        return float(res)


def standard_triple(m: int) -> QuaternionicTriple:
    if int(m) != m or m < 1:
        raise DimensionError(f"quaternionic dimension must be a positive integer, got {m!r}")
    m = int(m)
    eye = np.eye(m)
    J = tuple(_frozen(np.kron(eye, block)) for block in (_LEFT_I, _LEFT_J, _LEFT_K))
    return QuaternionicTriple(m=m, J=J)


@dataclass(frozen=True)
class Subspace:
    """Column-orthonormal basis of a subspace of R^N."""

    basis: np.ndarray
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2:
            raise DimensionError(f"basis must be a 2-d array, got shape {basis.shape}")
        res = gram_residual(basis)
        if res > self.tol:
            raise FrameError(f"frame Gram residual {res:.1e} exceeds {self.tol:.0e}", res)
        object.__setattr__(self, "basis", _frozen(basis))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_rows(cls, rows, tol: float = DEFAULT_TOL) -> "Subspace":
        rows = np.asarray(rows, dtype=float)
        return cls(rows.T if rows.size else rows.reshape(0, 0), tol)

    def complement(self) -> "Subspace":
        return Subspace(complement(self.basis))

    def rotated(self, q: np.ndarray) -> "Subspace":
        return Subspace(self.basis @ q)


@dataclass(frozen=True)
class SlantDecomposition:
    """Tangential/normal splitting of each J_alpha, expressed in the given bases.

    ``P[a]`` is k x k, ``F[a]`` is q x k, ``B[a]`` is k x q and ``C[a]`` is q x q,
    where k and q are the tangent and normal dimensions.
    """

    tangent: Subspace
    normal: Subspace
    P: tuple
    F: tuple
    B: tuple
    C: tuple

    @property
    def k(self) -> int:
        return self.tangent.dim

    def reassembly_residual(self, triple: QuaternionicTriple) -> float:
        T, N = self.tangent.basis, self.normal.basis
        res = 0.0
        for a in range(3):
            res = max(res, np.abs(T @ self.P[a] + N @ self.F[a] - triple.J[a] @ T).max())
            if N.shape[1]:
                res = max(res, np.abs(T @ self.B[a] + N @ self.C[a] - triple.J[a] @ N).max())
        return float(res)

    def lemma52_residuals(self) -> dict:
        """Residuals of the four identities obtained by splitting J_alpha^2 = -Id."""
        k, q = self.k, self.normal.dim
        ek, eq = np.eye(k), np.eye(q)
        out = {"L1": 0.0, "L2": 0.0, "L3": 0.0, "L4": 0.0}
        for a in range(3):
            P, F, B, C = self.P[a], self.F[a], self.B[a], self.C[a]
            out["L1"] = max(out["L1"], _maxabs(P @ P + ek + B @ F))
            out["L2"] = max(out["L2"], _maxabs(C @ F + F @ P))
            out["L3"] = max(out["L3"], _maxabs(C @ C + eq + F @ B))
            out["L4"] = max(out["L4"], _maxabs(P @ B + B @ C))
        return out


def _maxabs(a: np.ndarray) -> float:
    return float(np.abs(a).max()) if a.size else 0.0


def decompose(
    triple: QuaternionicTriple, tangent: Subspace, normal: Subspace | None = None
) -> SlantDecomposition:
    if tangent.ambient_dim != triple.dim:
        raise DimensionError(f"tangent lives in R^{tangent.ambient_dim}, triple acts on R^{triple.dim}")
    if normal is None:
        normal = tangent.complement()
    else:
        if normal.ambient_dim != triple.dim:
            raise DimensionError("normal frame ambient dimension mismatch")
        if tangent.dim + normal.dim > triple.dim:
            raise DimensionError("tangent and normal dimensions exceed the ambient dimension")
        cross = _maxabs(tangent.basis.T @ normal.basis)
        if cross > tangent.tol:
            raise FrameError(f"tangent and normal frames not orthogonal, residual {cross:.1e}", cross)
    T, N = tangent.basis, normal.basis
    P = tuple(_frozen(T.T @ J @ T) for J in triple.J)
    F = tuple(_frozen(N.T @ J @ T) for J in triple.J)
    B = tuple(_frozen(T.T @ J @ N) for J in triple.J)
    C = tuple(_frozen(N.T @ J @ N) for J in triple.J)
    return SlantDecomposition(tangent, normal, P, F, B, C)


@dataclass(frozen=True)
class SlantResult:
    is_slant: bool
    lam: float
    theta: float
    residual: float
    cross_residual: float
    kind: str  # "quaternionic", "totally_real", "proper" or "not_slant"

    @property
    def cos2(self) -> float:
        return -self.lam


def slant_test(dec: SlantDecomposition, tol: float = DEFAULT_TOL) -> SlantResult:
    """Decide whether every J_alpha meets the subspace at one common angle.

    The angle condition is ``P_a^2 = -cos^2(theta) Id`` for each alpha. The
    mixed products ``P_b P_a`` (a != b) are reported as ``cross_residual``; they
    equal ``-cos^2(theta) Id`` only when all three P_a coincide, which fails
    for quaternionic subspaces.
    """
    k = dec.k
    if k < 1:
        raise DimensionError("slant test needs a subspace of dimension >= 1")
    eye = np.eye(k)
    cos2 = -np.mean([np.trace(P @ P) for P in dec.P]) / k
    cos2 = float(min(max(cos2, 0.0), 1.0))
    residual = max(_maxabs(P @ P + cos2 * eye) for P in dec.P)
    cross = max(
        (_maxabs(dec.P[b] @ dec.P[a] + cos2 * eye) for a in range(3) for b in range(3) if a != b),
        default=0.0,
    )
    is_slant = residual <= tol
    if not is_slant:
        kind = "not_slant"
    elif cos2 >= 1.0 - tol:
        kind = "quaternionic"
    elif cos2 <= tol:
        kind = "totally_real"
    else:
        kind = "proper"
    theta = float(np.arccos(np.sqrt(cos2)))
    return SlantResult(is_slant, -cos2, theta, float(residual), float(cross), kind)


def check_corollary22(dec: SlantDecomposition, theta: float, tol: float = DEFAULT_TOL) -> dict:
    """Residuals of the squared-operator and inner-product identities on a slant subspace.

    Keys: ``PP`` (P_a^2 + cos^2 Id), ``BF`` (B_a F_a + sin^2 Id), ``PgP`` and
    ``FgF`` (inner products with a = b), and ``PgP_cross``/``FgF_cross`` for the
    a != b inner products.
    """
    sr = slant_test(dec, tol)
    if not sr.is_slant:
        raise NotSlantError(f"subspace is not slant (residual {sr.residual:.1e})", sr.residual)
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    eye = np.eye(dec.k)
    out = dict.fromkeys(("PP", "BF", "PgP", "FgF", "PgP_cross", "FgF_cross"), 0.0)
    for a in range(3):
        out["PP"] = max(out["PP"], _maxabs(dec.P[a] @ dec.P[a] + c2 * eye))
        out["BF"] = max(out["BF"], _maxabs(dec.B[a] @ dec.F[a] + s2 * eye))
        for b in range(3):
            pp = _maxabs(dec.P[a].T @ dec.P[b] - c2 * eye)
            ff = _maxabs(dec.F[a].T @ dec.F[b] - s2 * eye)
            same = "" if a == b else "_cross"
            out["PgP" + same] = max(out["PgP" + same], pp)
            out["FgF" + same] = max(out["FgF" + same], ff)
    return out


@dataclass(frozen=True)
class AdaptedFrame:
    """Orthonormal tangent frame with e_{2l} = sec(theta) P_alpha e_{2l-1}.

    ``coords`` holds the frame in the coordinates of the original tangent basis,
    ``basis`` in ambient coordinates.
    """

    coords: np.ndarray
    basis: np.ndarray
    alpha: int
    theta: float


def adapted_slant_frame(
    triple: QuaternionicTriple,
    tangent: Subspace,
    alpha: int = 1,
    tol: float = DEFAULT_TOL,
    first: np.ndarray | None = None,
) -> AdaptedFrame:
    """Greedy adapted frame for J_alpha (alpha in 1..3).

    ``first`` is the starting unit vector in tangent-basis coordinates; by
    default the first basis column.
    """
    if alpha not in (1, 2, 3):
        raise DimensionError(f"alpha must be 1, 2 or 3, got {alpha}")
    n = tangent.dim
    if n % 2:
        raise DimensionError(f"adapted slant frames need even dimension, got {n}")
    dec = decompose(triple, tangent)
    sr = slant_test(dec, tol)
    if not sr.is_slant:
        raise NotSlantError(f"subspace is not slant (residual {sr.residual:.1e})", sr.residual)
    if sr.kind != "proper":
        raise DegenerateAngleError(f"adapted frame undefined for {sr.kind} subspace (theta={sr.theta:.6g})")
    P = dec.P[alpha - 1]
    sec = 1.0 / np.cos(sr.theta)
    cols = []
    while len(cols) < n:
        if not cols:
            e = np.eye(n)[:, 0] if first is None else np.asarray(first, dtype=float)
            e = e / np.linalg.norm(e)
        else:
            e = null_space(np.array(cols))[:, 0]
        cols.append(e)
        cols.append(sec * (P @ e))
    coords = np.column_stack(cols)
    return AdaptedFrame(_frozen(coords), _frozen(tangent.basis @ coords), alpha, sr.theta)
