"""Parametric immersions into flat H^m and their pointwise geometry by finite differences."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable
from urllib.parse import parse_qsl, urlsplit

import numpy as np

from .errors import MarginError, ParameterError, RankError
from .linalg import complement
from .pointwise import CurvatureTensor, PointDatum
from .quat import QuaternionicTriple, Subspace, decompose, slant_test
from .catalog import INV_SQRT3

MIN_SINGULAR = 1e-6


@dataclass(frozen=True)
class ImmersionChart:
    n: int
    m: int
    map: Callable[[np.ndarray], np.ndarray]
    box: tuple
    fd_step: float = 1e-4
    grid: tuple = ()
    name: str = ""

    def __call__(self, u) -> np.ndarray:
        return np.asarray(self.map(np.asarray(u, dtype=float)), dtype=float)

    def grid_points(self, grid=None) -> list:
        """Cell-centred sample points, row-major over the axes."""
        grid = tuple(grid or self.grid or (5,) * self.n)
        axes = [lo + (np.arange(g) + 0.5) * (hi - lo) / g for (lo, hi), g in zip(self.box, grid)]
        return [np.array(p) for p in itertools.product(*axes)]

    def margin_ok(self, u, margin: float) -> bool:
        return all(lo + margin <= x <= hi - margin for x, (lo, hi) in zip(u, self.box))


@dataclass(frozen=True)
class JetData:
    first: np.ndarray  # N x n
    second: np.ndarray  # n x n x N
    point: np.ndarray


def _raw_jets(chart: ImmersionChart, u: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    n = chart.n
    E = np.eye(n) * h
    f0 = chart(u)
    N = f0.size
    first = np.empty((N, n))
    second = np.empty((n, n, N))
    fp = [chart(u + E[i]) for i in range(n)]
    fm = [chart(u - E[i]) for i in range(n)]
    for i in range(n):
        first[:, i] = (fp[i] - fm[i]) / (2 * h)
        second[i, i] = (fp[i] - 2 * f0 + fm[i]) / h**2
    for i, j in itertools.combinations(range(n), 2):
        mixed = (chart(u + E[i] + E[j]) - chart(u + E[i] - E[j])
                 - chart(u - E[i] + E[j]) + chart(u - E[i] - E[j])) / (4 * h * h)
        second[i, j] = second[j, i] = mixed
    # entries below the rounding floor of the stencil are indistinguishable from zero
    scale = max(float(np.abs(f0).max()), max(float(np.abs(f).max()) for f in fp + fm))
    floor = 8 * np.finfo(float).eps * scale / h**2
    second[np.abs(second) <= floor] = 0.0
    return first, second


def jets(chart: ImmersionChart, u, richardson: bool = False, step: float | None = None) -> JetData:
    """Central-difference first and second partials at ``u``."""
    u = np.asarray(u, dtype=float)
    h = chart.fd_step if step is None else step
    if not chart.margin_ok(u, 2 * h):
        raise MarginError(f"point {u.tolist()} is within {2 * h:g} of the box boundary")
    first, second = _raw_jets(chart, u, h)
    if richardson:
        f2, s2 = _raw_jets(chart, u, h / 2)
        first = (4 * f2 - first) / 3
        second = (4 * s2 - second) / 3
    return JetData(first, second, u)


def _frame(first: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.linalg.svd(first, compute_uv=False)
    if s[-1] <= MIN_SINGULAR:
        raise RankError(f"differential is rank deficient (min singular value {s[-1]:.1e})")
    # Gram-Schmidt in domain-coordinate order: first = Q R with diag(R) > 0
    Q, R = np.linalg.qr(first)
    d = np.sign(np.diag(R))
    return Q * d, (R.T * d).T


def point_datum_at(chart: ImmersionChart, triple: QuaternionicTriple, u, richardson: bool = False,
                   step: float | None = None) -> PointDatum:
    """PointDatum (c = 0) of the immersion at ``u``: orthonormalized tangent frame and h."""
    jet = jets(chart, u, richardson, step)
    Q, Rm = _frame(jet.first)
    Rinv = np.linalg.inv(Rm)
    normal = complement(Q)
    # h(e_a, e_b) = sum_ij Rinv_ia Rinv_jb (d_i d_j x)^perp
    coord_h = np.einsum("ijN,Nr->rij", jet.second, normal)
    h = np.einsum("rij,ia,jb->rab", coord_h, Rinv, Rinv)
    h = 0.5 * (h + h.transpose(0, 2, 1))
    return PointDatum(triple, 0.0, Subspace(Q, tol=1e-9), Subspace(normal, tol=1e-9), h)


def _coordinate_fields(chart, u, fd_step):
    """Coordinate h_{jk} (ambient normal vectors), Christoffel symbols and frame data at u."""
    first, second = _raw_jets(chart, u, fd_step)
    Q, Rm = _frame(first)
    proj = np.eye(first.shape[0]) - Q @ Q.T
    hc = second @ proj  # n x n x N, normal parts
    g = first.T @ first
    n = g.shape[0]
    lower = np.einsum("Ni,jkN->ijk", first, second).reshape(n, -1)
    gamma = np.linalg.solve(g, lower).reshape(n, n, n)  # Gamma^i_{jk}
    return hc, gamma, proj, Rm


def codazzi_residual(chart: ImmersionChart, triple: QuaternionicTriple, u, step: float) -> float:
    """Max over orthonormal frame triples of |(D_X h)(Y, Z) - (D_Y h)(X, Z)| in flat ambient space.

    The covariant derivative uses coordinate fields: derivatives of h_{jk} by
    central differences with ``step``, the normal connection as the normal
    projection at ``u``, and Christoffel terms for the induced connection.
    """
    u = np.asarray(u, dtype=float)
    n, h = chart.n, chart.fd_step
    if not chart.margin_ok(u, step + 2 * h):
        raise MarginError(f"point {u.tolist()} too close to the boundary for step {step:g}")
    hc, gamma, proj, Rm = _coordinate_fields(chart, u, h)
    dh = np.empty((n,) + hc.shape)  # dh[i] = d_i h_{jk}
    for i in range(n):
        e = np.eye(n)[i] * step
        hp = _coordinate_fields(chart, u + e, h)[0]
        hm = _coordinate_fields(chart, u - e, h)[0]
        dh[i] = (hp - hm) / (2 * step)
    Dh = dh @ proj  # normal connection
    # (nabla_i h)_{jk} = D_i h_{jk} - Gamma^l_{ij} h_{lk} - Gamma^l_{ik} h_{jl}
    cov = Dh - np.einsum("lij,lkN->ijkN", gamma, hc) - np.einsum("lik,jlN->ijkN", gamma, hc)
    res = cov - cov.transpose(1, 0, 2, 3)
    Rinv = np.linalg.inv(Rm)
    res = np.einsum("ijkN,ia,jb,kc->abcN", res, Rinv, Rinv, Rinv)
    return float(np.linalg.norm(res, axis=-1).max())


def intrinsic_curvature(chart: ImmersionChart, u, step: float, richardson: bool = False) -> CurvatureTensor:
    """Riemann tensor of the induced metric alone, in the orthonormal frame of ``point_datum_at``.

    Christoffel symbols come from the metric derivatives (finite differences of
    g with ``step``), not from the second fundamental form, so this is an
    independent route to tau. With ``richardson`` the O(step^2) error is
    cancelled using a second evaluation at step/2.
    """
    if richardson:
        coarse = intrinsic_curvature(chart, u, step)
        fine = intrinsic_curvature(chart, u, step / 2)
        return CurvatureTensor((4 * fine.R - coarse.R) / 3)
    u = np.asarray(u, dtype=float)
    n, h = chart.n, chart.fd_step

    def metric(v):
        first, _ = _raw_jets(chart, v, h)
        return first.T @ first

    def christoffel(v):
        g = metric(v)
        dg = np.empty((n, n, n))  # dg[l] = d_l g
        for l in range(n):
            e = np.eye(n)[l] * step
            dg[l] = (metric(v + e) - metric(v - e)) / (2 * step)
        # Gamma^i_{jk} = 1/2 g^{il} (d_j g_{lk} + d_k g_{lj} - d_l g_{jk})
        lower = 0.5 * (np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg)
        return np.linalg.solve(g, lower.reshape(n, -1)).reshape(n, n, n)

    if not chart.margin_ok(u, 2 * step + 2 * h):
        raise MarginError(f"point {u.tolist()} too close to the boundary for step {step:g}")
    G = christoffel(u)
    dG = np.empty((n, n, n, n))  # dG[a] = d_a Gamma
    for a in range(n):
        e = np.eye(n)[a] * step
        dG[a] = (christoffel(u + e) - christoffel(u - e)) / (2 * step)
    # R(d_i, d_j) d_k = Rup[l, k, i, j] d_l
    Rup = (np.einsum("iljk->lkij", dG) - np.einsum("jlik->lkij", dG)
           + np.einsum("lim,mjk->lkij", G, G) - np.einsum("ljm,mik->lkij", G, G))
    g = metric(u)
    # R(X, Y, Z, W) = g(R(X, Y) Z, W): R_ijkw = g_wl Rup[l, k, i, j]
    Rc = np.einsum("wl,lkij->ijkw", g, Rup)
    first, _ = _raw_jets(chart, u, h)
    _, Rm = _frame(first)
    Rinv = np.linalg.inv(Rm)
    return CurvatureTensor(np.einsum("ijkl,ia,jb,kc,ld->abcd", Rc, Rinv, Rinv, Rinv, Rinv))


@dataclass
class GridPoint:
    u: tuple
    skipped: bool
    theta: float = float("nan")
    slant_residual: float = float("nan")
    reason: str = ""


@dataclass
class SlantField:
    points: list = field(default_factory=list)
    is_slant: bool = False
    theta_spread: float = float("nan")
    max_residual: float = float("nan")


def slant_angle_field(chart: ImmersionChart, triple: QuaternionicTriple, grid=None, tol: float = 1e-10) -> SlantField:
    out = SlantField()
    for u in chart.grid_points(grid):
        try:
            jet = jets(chart, u)
            Q, _ = _frame(jet.first)
        except (MarginError, RankError) as exc:
            out.points.append(GridPoint(tuple(u), True, reason=str(exc)))
            continue
        sr = slant_test(decompose(triple, Subspace(Q, tol=1e-9)), tol)
        out.points.append(GridPoint(tuple(u), False, sr.theta, sr.residual))
    live = [p for p in out.points if not p.skipped]
    if live:
        thetas = np.array([p.theta for p in live])
        out.theta_spread = float(thetas.max() - thetas.min())
        out.max_residual = float(max(p.slant_residual for p in live))
        out.is_slant = out.max_residual <= tol and float(np.var(thetas)) <= tol
    return out


def _affine(vectors, m=2):
    V = np.column_stack(vectors)
    return lambda u: V @ u


def _slant_plane_vectors(theta):
    a = np.cos(theta)
    d = np.sqrt(max(1.0 - 3.0 * a * a, 0.0))
    return np.eye(8)[0], np.array([0.0, a, a, a, d, 0.0, 0.0, 0.0])


def builtin_chart(uri: str) -> ImmersionChart:
    """Resolve ``builtin:<name>[?key=value...]``.

    Names: slant-plane (theta), quaternionic-line, totally-real-plane,
    quadratic-graph (a, b, c: coefficients of a u1^2 + b u1 u2 + c u2^2),
    slant-cylinder (theta, r), curved-graph, slant4-affine.
    """
    parts = urlsplit(uri)
    if parts.scheme != "builtin":
        raise ParameterError(f"not a builtin chart reference: {uri!r}")
    try:
        p = {k: float(v) for k, v in parse_qsl(parts.query)}
    except ValueError:
        raise ParameterError(f"bad chart parameters in {uri!r}") from None
    name = parts.path
    step = p.get("fd_step", 1e-4)
    box2 = ((-1.0, 1.0), (-1.0, 1.0))
    if name == "slant-plane":
        theta = p.get("theta", np.pi / 3)
        if np.cos(theta) > INV_SQRT3 + 1e-12:
            raise ParameterError(f"slant plane needs cos(theta) <= 1/sqrt(3), theta={theta}")
        return ImmersionChart(2, 2, _affine(_slant_plane_vectors(theta)), box2, step, name=uri)
    if name == "quaternionic-line":
        E = np.eye(8)
        return ImmersionChart(4, 2, _affine([E[0], E[1], E[2], E[3]]), ((-1.0, 1.0),) * 4, step, name=uri)
    if name == "totally-real-plane":
        E = np.eye(8)
        return ImmersionChart(2, 2, _affine([E[0], E[4]]), box2, step, name=uri)
    if name == "slant4-affine":
        a = INV_SQRT3
        E = np.eye(8)
        vecs = [E[0], a * (E[1] + E[2] + E[3]), E[4], a * (E[5] + E[6] + E[7])]
        return ImmersionChart(4, 2, _affine(vecs), ((-1.0, 1.0),) * 4, step, name=uri)
    if name == "quadratic-graph":
        a, b, c = p.get("a", 1.0), p.get("b", 0.5), p.get("c", -0.75)

        def quad(u):
            x = np.zeros(8)
            x[0], x[1] = u
            x[4] = a * u[0] ** 2 + b * u[0] * u[1] + c * u[1] ** 2
            return x

        return ImmersionChart(2, 2, quad, box2, step, name=uri)
    if name == "slant-cylinder":
        theta, r = p.get("theta", np.pi / 3), p.get("r", 1.0)
        a = np.cos(theta)
        if a > INV_SQRT3 + 1e-12:
            raise ParameterError(f"slant cylinder needs cos(theta) <= 1/sqrt(3), theta={theta}")
        d = np.sqrt(max(1.0 - 3.0 * a * a, 0.0))

        def cyl(u):
            x = np.zeros(8)
            x[0] = u[0]
            x[1:4] = a * u[1]
            x[4] = d * r * np.sin(u[1] / r)
            x[5] = -d * r * np.cos(u[1] / r)
            return x

        return ImmersionChart(2, 2, cyl, box2, step, name=uri)
    if name == "curved-graph":
        def curved(u):
            x = np.zeros(8)
            x[0], x[1] = u
            x[4] = np.sin(u[0]) * np.cos(u[1])
            x[6] = 0.5 * u[0] * u[1] ** 2
            return x

        return ImmersionChart(2, 2, curved, box2, step, name=uri)
    raise ParameterError(f"unknown builtin chart {name!r}")
