"""k-Ricci curvature and Chen's invariant Theta_k.

Theta_k is split into an exact inner problem and a search over the
Grassmannian. For a fixed k-plane L with orthonormal basis B the map
X -> Ric_L(X) is the quadratic form ``q_L = B^T M(L) B`` with
``M(L)_{ps} = sum_{qr} R_{pqrs} (B B^T)_{qr}``, so its infimum over unit X in
L is ``lambda_min(q_L)``. The outer problem minimizes that over Gr(k, n).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContainmentError, DimensionError, ParameterError
from .linalg import gram_residual
from .pointwise import CurvatureTensor
from .quat import DEFAULT_TOL, _frozen


@dataclass(frozen=True)
class PlaneSection:
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2 or not 2 <= basis.shape[1] <= basis.shape[0]:
            raise DimensionError(f"plane section basis must be n x k with 2 <= k <= n, got {basis.shape}")
        res = gram_residual(basis)
        if res > DEFAULT_TOL:
            raise DimensionError(f"plane section basis not orthonormal, residual {res:.1e}")
        object.__setattr__(self, "basis", _frozen(basis))

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def coordinate(cls, n: int, indices) -> "PlaneSection":
        return cls(np.eye(n)[:, list(indices)])


@dataclass(frozen=True)
class ThetaConfig:
    starts: int = 64
    max_iter: int = 500
    tol: float = 1e-10
    seed: int = 0
    gradient: str = "fd"  # or "analytic"
    fd_step: float = 1e-6


@dataclass(frozen=True)
class ThetaResult:
    value: float
    argmin_plane: PlaneSection
    argmin_vector: np.ndarray
    starts: int
    converged: bool
    oracle_gap: float | None = None
    iterations: int = 0


def ricci_form(R: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Quadratic form of X -> Ric_L(X) on L = span(B), in B-coordinates.

    Accepts a stack of bases with shape (..., n, k).
    """
    P = B @ np.swapaxes(B, -1, -2)
    M = np.einsum("pqrs,...qr->...ps", R, P)
    return np.swapaxes(B, -1, -2) @ M @ B


def ricci_curvature(R: CurvatureTensor, L: PlaneSection, X) -> float:
    """Ric_L(X) = sum_i R(X, f_i, f_i, X) over any orthonormal basis f of L."""
    X = np.asarray(X, dtype=float)
    if abs(np.linalg.norm(X) - 1.0) > 1e-8:
        raise ContainmentError(f"X must be a unit vector, |X| = {np.linalg.norm(X):.6g}")
    outside = np.linalg.norm(X - L.basis @ (L.basis.T @ X))
    if outside > 1e-8:
        raise ContainmentError(f"X is not in the plane section (distance {outside:.1e})")
    P = L.basis @ L.basis.T
    return float(np.einsum("p,pqrs,qr,s->", X, R.R, P, X))


def plane_scalar_curvature(R: CurvatureTensor, L: PlaneSection) -> float:
    B = L.basis
    RL = np.einsum("pqrs,pa,qb,rc,sd->abcd", R.R, B, B, B, B, optimize=True)
    K = np.einsum("abba->ab", RL)
    return float(np.sum(np.triu(K, 1)))


def coordinate_average_residual(R: CurvatureTensor, k: int) -> tuple[float, float]:
    """Scalar curvature recovered from all coordinate k-plane sections.

    Returns ``(tau, weighted_sum)`` where the weighted sum is
    ``(k-2)!(n-k)!/(n-2)! * sum_L tau(L)`` over coordinate sections.
    """
    n = R.n
    _check_k(n, k)
    total = sum(
        plane_scalar_curvature(R, PlaneSection.coordinate(n, idx))
        for idx in itertools.combinations(range(n), k)
    )
    weight = math.factorial(k - 2) * math.factorial(n - k) / math.factorial(n - 2)
    K = np.einsum("ijji->ij", R.R)
    return float(np.sum(np.triu(K, 1))), float(weight * total)


def _check_k(n: int, k: int):
    if int(k) != k or not 2 <= k <= n:
        raise ParameterError(f"k must satisfy 2 <= k <= n = {n}, got {k}")


def _qr_pos(A: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(A)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d = np.where(d == 0, 1.0, d)
    return q * d[..., None, :]


def _objective(R: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(ricci_form(R, B))[..., 0]


def _fd_gradient(R: np.ndarray, B: np.ndarray, h: float) -> np.ndarray:
    S, n, k = B.shape
    E = np.eye(n * k).reshape(n * k, n, k) * h
    plus = _objective(R, B[:, None] + E[None])
    minus = _objective(R, B[:, None] - E[None])
    return ((plus - minus) / (2 * h)).reshape(S, n, k)


def _analytic_gradient(R: np.ndarray, B: np.ndarray) -> np.ndarray:
    # Danskin: with x the bottom eigenvector and y = B x,
    # d/dB [y^T M(BB^T) y] = 2 M y x^T + 2 N B, N_qr = sum_ps R_pqrs y_p y_s
    _, v = np.linalg.eigh(ricci_form(R, B))
    x = v[..., :, 0]
    y = np.einsum("snk,sk->sn", B, x)
    P = B @ np.swapaxes(B, -1, -2)
    M = np.einsum("pqrs,...qr->...ps", R, P)
    N = np.einsum("pqrs,tp,ts->tqr", R, y, y)
    return 2 * np.einsum("tps,ts,tk->tpk", M, y, x) + 2 * N @ B


def theta_k(R: CurvatureTensor, k: int, config: ThetaConfig = ThetaConfig()) -> ThetaResult:
    """Upper bound on Theta_k from multi-start descent on Gr(k, n).

    Every start gets its own child seed, so the result does not depend on the
    order in which starts are processed.
    """
    n = R.n
    _check_k(n, k)
    Rt = np.asarray(R.R)
    if k == n:
        B = np.eye(n)
        return _result(Rt, B, k, starts=1, converged=True, iterations=0)
    seeds = np.random.SeedSequence(config.seed).spawn(config.starts)
    B = np.stack([_qr_pos(np.random.default_rng(s).standard_normal((n, k))) for s in seeds])
    f = _objective(Rt, B)
    active = np.ones(len(B), dtype=bool)
    converged = np.zeros(len(B), dtype=bool)
    iters = np.zeros(len(B), dtype=int)
    steps = 0.5 ** np.arange(40)
    for _ in range(config.max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Ba = B[idx]
        if config.gradient == "analytic":
            G = _analytic_gradient(Rt, Ba)
        else:
            G = _fd_gradient(Rt, Ba, config.fd_step)
        # horizontal projection: tangent vector of Gr(k, n) at span(B)
        G = G - Ba @ (np.swapaxes(Ba, -1, -2) @ G)
        trial = _qr_pos(Ba[:, None] - steps[None, :, None, None] * G[:, None])
        ft = _objective(Rt, trial)
        better = ft < f[idx, None]
        has = better.any(axis=1)
        first = np.argmax(better, axis=1)
        iters[idx] += 1
        gain = np.where(has, f[idx] - ft[np.arange(idx.size), first], 0.0)
        upd = idx[has]
        B[upd] = trial[has, first[has]]
        f[upd] = ft[has, first[has]]
        done = gain < config.tol
        converged[idx[done]] = True
        active[idx[done]] = False
    best = int(np.argmin(f))
    return _result(Rt, B[best], k, starts=config.starts, converged=bool(converged[best]),
                   iterations=int(iters[best]))


def _result(R, B, k, starts, converged, iterations) -> ThetaResult:
    w, v = np.linalg.eigh(ricci_form(R, B))
    X = B @ v[:, 0]
    return ThetaResult(
        value=float(w[0] / (k - 1)),
        argmin_plane=PlaneSection(B),
        argmin_vector=_frozen(X / np.linalg.norm(X)),
        starts=starts,
        converged=converged,
        iterations=iterations,
    )


def _oracle_min_ricci(R: np.ndarray, B: np.ndarray) -> np.ndarray:
    # contract the last slot with L first, then the middle pair with the projector
    n, k = B.shape[-2:]
    lead = B.shape[:-2]
    B = B.reshape(-1, n, k)
    T = (R.reshape(n**3, n) @ B).reshape(-1, n, n * n, k)  # [p, qr, d]
    proj = (B @ B.transpose(0, 2, 1)).reshape(-1, 1, 1, n * n)
    U = (proj @ T)[:, :, 0, :]  # [p, d]
    ric = B.transpose(0, 2, 1) @ U
    ric = 0.5 * (ric + np.swapaxes(ric, -1, -2))
    return np.linalg.eigvalsh(ric)[..., 0].reshape(lead)


def brute_force_theta_k(
    R: CurvatureTensor, k: int, samples: int = 100_000, seed: int = 0, refine: int = 10, chunk: int = 4096
) -> float:
    """Sampling oracle: best of ``samples`` random k-planes, then local random search on the best ``refine``.

    Planes are drawn in fixed-size chunks from one stream, so a run with more
    samples sees a superset of the planes of a run with fewer. The refinement
    is a derivative-free (1+64) evolution strategy with an adaptive radius.
    """
    n = R.n
    _check_k(n, k)
    Rt = np.asarray(R.R)
    if k == n:
        return float(_oracle_min_ricci(Rt, np.eye(n)) / (k - 1))
    rng = np.random.default_rng(seed)
    best_vals = np.empty(0)
    best_mats = np.empty((0, n, k))
    drawn = 0
    while drawn < samples:
        G = rng.standard_normal((chunk, n, k))[: samples - drawn]
        drawn += len(G)
        Q, _ = np.linalg.qr(G)
        vals = _oracle_min_ricci(Rt, Q)
        best_vals = np.concatenate([best_vals, vals])
        best_mats = np.concatenate([best_mats, Q])
        keep = np.argsort(best_vals, kind="stable")[: max(refine, 1)]
        best_vals, best_mats = best_vals[keep], best_mats[keep]
    if refine > 0:
        best_vals, best_mats = _local_search(Rt, best_vals[:refine], best_mats[:refine], rng)
    return float(best_vals.min() / (k - 1))


def _local_search(R, vals, mats, rng, offspring: int = 64, max_rounds: int = 400):
    sigma = np.full(len(vals), 0.1)
    for _ in range(max_rounds):
        live = sigma > 1e-10
        if not live.any():
            break
        idx = np.flatnonzero(live)
        noise = rng.standard_normal((idx.size, offspring) + mats.shape[1:])
        cand, _ = np.linalg.qr(mats[idx, None] + sigma[idx, None, None, None] * noise)
        cv = _oracle_min_ricci(R, cand)
        j = np.argmin(cv, axis=1)
        cbest = cv[np.arange(idx.size), j]
        win = cbest < vals[idx]
        vals[idx[win]] = cbest[win]
        mats[idx[win]] = cand[win, j[win]]
        sigma[idx] = np.where(win, sigma[idx] * 1.5, sigma[idx] * 0.5)
    return vals, mats
