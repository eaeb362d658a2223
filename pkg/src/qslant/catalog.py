"""Deterministic generators for subspaces and point data used by tests and the CLI."""

from __future__ import annotations

from urllib.parse import parse_qsl, urlsplit

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionError, ParameterError
from .linalg import null_space, random_orthonormal
from .pointwise import PointDatum
from .quat import Subspace, decompose, standard_triple

INV_SQRT3 = 1.0 / np.sqrt(3.0)

# right multiplication by i, j, k on one quaternion; commutes with J1, J2, J3
_RIGHT = (
    np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float),
    np.array([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=float),
    np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float),
)


def quaternionic_subspace(m: int, k: int) -> Subspace:
    """H^k x {0} inside H^m."""
    if not 1 <= k <= m:
        raise DimensionError(f"need 1 <= k <= m, got k={k}, m={m}")
    return Subspace(np.eye(4 * m)[:, : 4 * k])


def totally_real_subspace(m: int, n: int) -> Subspace:
    """Real axis of the first n quaternionic coordinates."""
    if not 1 <= n <= m:
        raise DimensionError(f"totally real construction needs 1 <= n <= m, got n={n}, m={m}")
    return Subspace(np.eye(4 * m)[:, [4 * i for i in range(n)]])


def slant_plane(theta: float) -> Subspace:
    """span{e1, (0, a, a, a, d, 0, 0, 0)} in R^8 with a = cos(theta)."""
    a = float(np.cos(theta))
    if a > INV_SQRT3 + 1e-15 or a < -1e-15:
        raise ParameterError(
            f"slant plane needs 0 <= cos(theta) <= 1/sqrt(3); cos({theta:.6g}) = {a:.6g}"
        )
    a = max(a, 0.0)
    d = np.sqrt(max(1.0 - 3.0 * a * a, 0.0))
    v1 = np.eye(8)[0]
    v2 = np.array([0.0, a, a, a, d, 0.0, 0.0, 0.0])
    return Subspace(np.column_stack([v1, v2]))


def slant_4space() -> Subspace:
    """Two blockwise slant planes span{1, (i + j + k)/sqrt(3)} in H^2; theta = arccos(1/sqrt(3))."""
    a = INV_SQRT3
    basis = np.zeros((8, 4))
    basis[0, 0] = 1.0
    basis[1:4, 1] = a
    basis[4, 2] = 1.0
    basis[5:8, 3] = a
    return Subspace(basis)


def quaternionic_isometry(m: int, rng: np.random.Generator) -> np.ndarray:
    """Random orthogonal map of R^{4m} commuting with J1, J2, J3."""
    blocks = np.zeros((4 * m, 4 * m))
    for i in range(m):
        w = rng.standard_normal(4)
        w /= np.linalg.norm(w)
        blocks[4 * i : 4 * i + 4, 4 * i : 4 * i + 4] = w[0] * np.eye(4) + sum(
            w[j + 1] * _RIGHT[j] for j in range(3)
        )
    mix = random_orthonormal(rng, m, m)
    return np.kron(mix, np.eye(4)) @ blocks


def random_slant_subspace(n: int, seed: int) -> Subspace:
    """Random slant subspace of R^8: a rotated slant plane (n=2) or slant 4-space (n=4).

    Tangent bases are additionally rotated by a random orthogonal matrix.
    """
    rng = np.random.default_rng(seed)
    if n == 2:
        theta = rng.uniform(np.arccos(INV_SQRT3), np.pi / 2)
        base = slant_plane(theta)
    elif n == 4:
        base = slant_4space()
    else:
        raise DimensionError(f"random slant subspaces exist here for n in (2, 4), got {n}")
    Q = quaternionic_isometry(2, rng)
    return Subspace(Q @ base.basis @ random_orthonormal(rng, n, n))


def random_point_datum(subspace: Subspace, c: float = 0.0, h_scale: float = 1.0, seed: int = 0) -> PointDatum:
    triple = standard_triple(subspace.ambient_dim // 4)
    normal = subspace.complement()
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((normal.dim, subspace.dim, subspace.dim))
    h = h_scale * 0.5 * (g + g.transpose(0, 2, 1))
    return PointDatum(triple, c, subspace, normal, h)


def delta_datum(subspace: Subspace, c: float = 0.0) -> PointDatum:
    """h(e_i, e_j) = delta_ij v for the first normal vector v."""
    datum = PointDatum.build(standard_triple(subspace.ambient_dim // 4), c, subspace)
    h = np.zeros_like(datum.h)
    h[0] = np.eye(subspace.dim)
    return datum.with_h(h)


def kernel_datum(subspace: Subspace, kernel_dim: int = 1, c: float = 0.0, seed: int = 0,
                 psd: bool = False) -> PointDatum:
    """Datum whose h vanishes on the last ``kernel_dim`` tangent directions.

    With ``psd=True`` h takes values along one normal direction with a positive
    semidefinite coefficient matrix, so every sectional curvature is >= c-terms.
    """
    n = subspace.dim
    datum = PointDatum.build(standard_triple(subspace.ambient_dim // 4), c, subspace)
    rng = np.random.default_rng(seed)
    r = n - kernel_dim
    h = np.zeros_like(datum.h)
    if psd:
        a = rng.standard_normal((r, r))
        h[0, :r, :r] = a @ a.T + np.eye(r)
    else:
        g = rng.standard_normal((h.shape[0], r, r))
        h[:, :r, :r] = 0.5 * (g + g.transpose(0, 2, 1))
    return datum.with_h(h)


def quaternionic_slant_basis(subspace: Subspace, tol: float = 1e-10) -> np.ndarray:
    """Basis (as a stack of h arrays) of all second fundamental forms with A_{F_a Y} Z symmetric in Y, Z."""
    triple = standard_triple(subspace.ambient_dim // 4)
    dec = decompose(triple, subspace)
    n, q = subspace.dim, dec.normal.dim
    sym = []
    for r in range(q):
        for i in range(n):
            for j in range(i, n):
                e = np.zeros((q, n, n))
                e[r, i, j] = e[r, j, i] = 1.0
                sym.append(e)
    sym = np.array(sym)
    rows = []
    for F in dec.F:
        # S[i, j, :] = A_{F e_i} e_j
        S = np.einsum("ri,zrkj->zijk", F, sym)
        rows.append((S - S.transpose(0, 2, 1, 3)).reshape(len(sym), -1))
    constraint = np.concatenate(rows, axis=1).T
    coeffs = null_space(constraint, tol)
    return np.einsum("zb,zrij->brij", coeffs, sym)


def quaternionic_slant_datum(subspace: Subspace, seed: int = 0, c: float = 0.0) -> PointDatum:
    """Random h in the solution space of the quaternionic slant condition (may be zero)."""
    basis = quaternionic_slant_basis(subspace)
    rng = np.random.default_rng(seed)
    h = np.einsum("b,brij->rij", rng.standard_normal(len(basis)), basis) if len(basis) else None
    return PointDatum.build(standard_triple(subspace.ambient_dim // 4), c, subspace, h)


def search_slant_plane(cos2: float, seed: int = 0, m: int = 2) -> tuple[Subspace, float]:
    """Minimize the slant residual for a prescribed cos^2(theta) over 2-planes of R^{4m}.

    Returns the best plane and its residual; no claim that zero is reachable.
    """
    triple = standard_triple(m)
    rng = np.random.default_rng(seed)

    def frame(z):
        q, _ = np.linalg.qr(z.reshape(4 * m, 2))
        return q

    def loss(z):
        T = frame(z)
        return sum(np.sum((T.T @ J @ T @ T.T @ J @ T + cos2 * np.eye(2)) ** 2) for J in triple.J)

    best = None
    for _ in range(8):
        res = minimize(loss, rng.standard_normal(8 * m), method="BFGS", options={"gtol": 1e-12})
        if best is None or res.fun < best.fun:
            best = res
    return Subspace(frame(best.x)), float(np.sqrt(best.fun))


def _params(query: str) -> dict:
    out = {}
    for key, value in parse_qsl(query):
        try:
            out[key] = float(value)
        except ValueError:
            raise ParameterError(f"parameter {key}={value!r} is not a number") from None
    return out


def catalog_case(uri: str) -> PointDatum:
    """Resolve ``catalog:<name>[?key=value&...]`` to a PointDatum."""
    parts = urlsplit(uri)
    if parts.scheme != "catalog":
        raise ParameterError(f"not a catalog reference: {uri!r}")
    name, p = parts.path, _params(parts.query)
    c = p.get("c", 0.0)
    seed = int(p.get("seed", 0))
    if name == "slant-plane-tg":
        return PointDatum.build(standard_triple(2), c, slant_plane(p.get("theta", np.pi / 3)))
    if name == "slant-plane-random":
        return random_point_datum(slant_plane(p.get("theta", np.pi / 3)), c, p.get("scale", 1.0), seed)
    if name in ("slant4-tg", "slant4-c4"):
        return PointDatum.build(standard_triple(2), 4.0 if name == "slant4-c4" else c, slant_4space())
    if name == "slant4-random":
        return random_point_datum(slant_4space(), c, p.get("scale", 1.0), seed)
    if name == "delta-totally-real":
        return delta_datum(totally_real_subspace(2, 2), c)
    if name == "totally-real-random":
        return random_point_datum(totally_real_subspace(2, 2), c, p.get("scale", 1.0), seed)
    if name == "quaternionic-tg":
        return PointDatum.build(standard_triple(2), c, quaternionic_subspace(2, 1))
    if name == "kernel":
        return kernel_datum(slant_plane(p.get("theta", np.pi / 3)), 1, c, seed, psd=True)
    raise ParameterError(f"unknown catalog entry {name!r}")


CATALOG_NAMES = (
    "slant-plane-tg", "slant-plane-random", "slant4-tg", "slant4-c4", "slant4-random",
    "delta-totally-real", "totally-real-random", "quaternionic-tg", "kernel",
)
