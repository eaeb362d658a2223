"""First normal space, the quaternionic slant condition and the unfull-bundle obstruction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotSlantError, PreconditionError
from .linalg import max_principal_angle, orth
from .pointwise import PointDatum, mean_curvature
from .quat import DEFAULT_TOL, SlantDecomposition, slant_test
from .verify import relative_null_space

RANK_TOL = 1e-10
ANGLE_TOL = 1e-8


@dataclass(frozen=True)
class FirstNormalSpace:
    """Im h_p and its complement, both in normal-frame coordinates."""

    basis: np.ndarray
    complement: np.ndarray
    is_full: bool

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def first_normal_space(datum: PointDatum, tol: float = RANK_TOL) -> FirstNormalSpace:
    q, n = datum.normal.dim, datum.n
    iu = np.triu_indices(n)
    values = datum.h[:, iu[0], iu[1]]  # q x n(n+1)/2, columns h(e_i, e_j)
    u, s, _ = np.linalg.svd(values, full_matrices=True) if q else (np.zeros((0, 0)), np.zeros(0), None)
    r = int(np.sum(s > tol))
    return FirstNormalSpace(u[:, :r], u[:, r:], r == q)


def _dec(datum, dec):
    return datum.decomposition() if dec is None else dec


def _require_proper(dec: SlantDecomposition, tol: float):
    sr = slant_test(dec, tol)
    if not sr.is_slant:
        raise NotSlantError(f"not slant (residual {sr.residual:.1e})", sr.residual)
    if sr.kind != "proper":
        raise PreconditionError(f"criterion applies to proper slant data, got {sr.kind}")
    return sr


@dataclass(frozen=True)
class QuaternionicSlantResult:
    passed: bool
    residual: float


def quaternionic_slant_residual(datum: PointDatum, dec: SlantDecomposition | None = None) -> float:
    """max over alpha, i, j of |A_{F_a e_i} e_j - A_{F_a e_j} e_i|."""
    dec = _dec(datum, dec)
    res = 0.0
    for F in dec.F:
        S = np.einsum("ri,rkj->ijk", F, datum.h)  # S[i, j] = A_{F e_i} e_j
        diff = S - S.transpose(1, 0, 2)
        res = max(res, float(np.linalg.norm(diff, axis=2).max()))
    return res


def quaternionic_slant_test(
    datum: PointDatum, dec: SlantDecomposition | None = None, tol: float = DEFAULT_TOL
) -> QuaternionicSlantResult:
    dec = _dec(datum, dec)
    _require_proper(dec, tol)
    res = quaternionic_slant_residual(datum, dec)
    return QuaternionicSlantResult(res <= tol, res)


@dataclass(frozen=True)
class Lemma53Result:
    residual: float  # on F_alpha(T_pM), where the identity is asserted
    outside_residual: float  # on the rest of the normal space, reported only


def check_lemma53(dec: SlantDecomposition, theta: float) -> Lemma53Result:
    """<C_a U, C_a V> - cos^2 <U, V> on F_a(T_pM) and on its complement."""
    c2 = np.cos(theta) ** 2
    inside = outside = 0.0
    for F, C in zip(dec.F, dec.C):
        U = orth(F)
        W = orth(np.eye(F.shape[0]) - U @ U.T)
        for basis, which in ((U, "in"), (W, "out")):
            if not basis.shape[1]:
                continue
            g = (C @ basis).T @ (C @ basis) - c2 * basis.T @ basis
            r = float(np.abs(g).max())
            if which == "in":
                inside = max(inside, r)
            else:
                outside = max(outside, r)
    return Lemma53Result(inside, outside)


@dataclass(frozen=True)
class Lemma54Result:
    passed: bool
    dims: dict  # alpha -> (dim B_a((Im h)^perp), dim N_p)
    angles: dict  # alpha -> largest principal angle


def check_lemma54(datum: PointDatum, dec: SlantDecomposition | None = None, tol: float = DEFAULT_TOL) -> Lemma54Result:
    """Compare B_a((Im h_p)^perp) with the relative null space for each alpha."""
    dec = _dec(datum, dec)
    qs = quaternionic_slant_test(datum, dec, tol)
    if not qs.passed:
        raise PreconditionError(f"datum fails the quaternionic slant condition (residual {qs.residual:.1e})")
    fns = first_normal_space(datum)
    nul = relative_null_space(datum)
    dims, angles = {}, {}
    ok = True
    for a, B in enumerate(dec.B, start=1):
        image = orth(B @ fns.complement, RANK_TOL)
        dims[a] = (image.shape[1], nul.shape[1])
        angles[a] = max_principal_angle(image, nul)
        ok = ok and angles[a] <= ANGLE_TOL
    return Lemma54Result(ok, dims, angles)


@dataclass(frozen=True)
class Thm55Result:
    premises_hold: bool
    c_required_zero: bool
    verdict: str  # "consistent" or "contradiction"
    details: dict


def thm55_consistency(datum: PointDatum, dec: SlantDecomposition | None = None, tol: float = DEFAULT_TOL) -> Thm55Result:
    """Unfull first normal bundle + minimal codimension + quaternionic slant forces c = 0."""
    dec = _dec(datum, dec)
    sr = slant_test(dec, tol)
    proper = sr.is_slant and sr.kind == "proper"
    qs_res = quaternionic_slant_residual(datum, dec)
    qs = proper and qs_res <= tol
    minimal = datum.normal.dim == 2 * datum.m
    fns = first_normal_space(datum)
    premises = bool(proper and qs and minimal and not fns.is_full)
    consistent = (not premises) or abs(datum.c) <= tol
    details = {
        "proper_slant": bool(proper),
        "slant_kind": sr.kind,
        "quaternionic_slant": bool(qs),
        "quaternionic_slant_residual": qs_res,
        "minimal_codimension": bool(minimal),
        "first_normal_dim": fns.dim,
        "first_normal_full": fns.is_full,
        "c": datum.c,
        "H2": mean_curvature(datum)[1],
    }
    return Thm55Result(premises, premises, "consistent" if consistent else "contradiction", details)
