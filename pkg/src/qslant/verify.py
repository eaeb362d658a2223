"""Checks of the mean-curvature and shape-operator inequalities at a point.

Each check compares ``lhs`` against ``rhs`` and records ``slack``; a check
passes when ``slack >= -tolerance``. Identities use ``slack = -|lhs - rhs|``.
Logical (if-and-only-if) checks use ``slack`` 0 when consistent and -1 otherwise,
with tolerance 0.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateAngleError, NotSlantError
from .linalg import contained_in, null_space
from .pointwise import (
    PointDatum,
    gauss_curvature,
    h_norm_sq,
    mean_curvature,
    scalar_curvature,
    shape_operator,
)
from .quat import adapted_slant_frame, slant_test
from .ricci import ThetaConfig, brute_force_theta_k, theta_k

IDENTITY_TOL = 1e-9
FRAME_SUM_TOL = 1e-10
INEQUALITY_TOL = 1e-8
STRICT_TOL = 1e-12
EQUALITY_WINDOW = 1e-8
RANK_TOL = 1e-10
ANGLE_TOL = 1e-8


@dataclass
class Check:
    name: str
    paper_anchor: str
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    passed: bool
    status: str = ""
    certificate: dict | None = None
    note: str = ""

    def __post_init__(self):
        self.lhs, self.rhs, self.slack = float(self.lhs), float(self.rhs), float(self.slack)
        if not self.status:
            self.status = "pass" if self.passed else "fail"


def _identity(name, anchor, lhs, rhs, tol, **kw) -> Check:
    slack = -abs(lhs - rhs)
    return Check(name, anchor, lhs, rhs, slack, tol, slack >= -tol, **kw)


def _inequality(name, anchor, lhs, rhs, tol, **kw) -> Check:
    slack = lhs - rhs
    return Check(name, anchor, lhs, rhs, slack, tol, slack >= -tol, **kw)


def _logical(name, anchor, lhs, rhs, ok, **kw) -> Check:
    return Check(name, anchor, lhs, rhs, 0.0 if ok else -1.0, 0.0, bool(ok), **kw)


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    datum_summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        for key, value in other.datum_summary.items():
            self.datum_summary.setdefault(key, value)
        return self

    def to_dict(self) -> dict:
        return {"datum_summary": dict(self.datum_summary), "checks": [asdict(c) for c in self.checks]}


@dataclass(frozen=True)
class PointInvariants:
    n: int
    theta: float
    cos2: float
    kind: str
    H: np.ndarray
    H2: float
    tau: float
    h2: float
    threshold: float  # (c/4)(1 + 9 cos^2 / (n - 1))


def point_invariants(datum: PointDatum, tol: float = 1e-10) -> PointInvariants:
    sr = slant_test(datum.decomposition(), tol)
    if not sr.is_slant:
        raise NotSlantError(f"datum is not slant (residual {sr.residual:.1e})", sr.residual)
    n = datum.n
    H, H2 = mean_curvature(datum)
    tau = scalar_curvature(gauss_curvature(datum))
    threshold = datum.c / 4 * (1 + 9 * sr.cos2 / (n - 1))
    return PointInvariants(n, sr.theta, sr.cos2, sr.kind, H, H2, tau, h_norm_sq(datum), threshold)


def trace_identity_residual(datum: PointDatum, inv: PointInvariants | None = None) -> tuple[float, float]:
    """Both sides of n^2 |H|^2 = 2 tau + |h|^2 - (c/4)[n(n-1) + 9 n cos^2]."""
    inv = inv or point_invariants(datum)
    n, c = inv.n, datum.c
    lhs = n * n * inv.H2
    rhs = 2 * inv.tau + inv.h2 - c / 4 * (n * (n - 1) + 9 * n * inv.cos2)
    return lhs, rhs


def frame_sum(datum: PointDatum, alpha: int = 1) -> tuple[float, bool]:
    """sum_beta sum_ij g(P_beta e_i, e_j)^2 in an adapted slant frame.

    Falls back to the given tangent frame when the angle is 0 or pi/2 (no
    adapted frame exists); the second value tells which frame was used.
    """
    try:
        frame = adapted_slant_frame(datum.triple, datum.tangent, alpha).basis
        adapted = True
    except DegenerateAngleError:
        frame = datum.tangent.basis
        adapted = False
    total = sum(float(np.sum((frame.T @ J @ frame) ** 2)) for J in datum.triple.J)
    return total, adapted


def _summary(datum, inv, k, theta_val) -> dict:
    return {
        "n": inv.n,
        "m": datum.m,
        "c": datum.c,
        "theta": inv.theta,
        "kind": inv.kind,
        "H2": inv.H2,
        "tau": inv.tau,
        "k": k,
        "theta_k": theta_val,
    }


def _scope_note(kind: str) -> str:
    if kind == "quaternionic":
        return "extrapolated: theta = 0 is outside the stated hypotheses"
    if kind == "totally_real":
        return "totally real case"
    return ""


def verify_thm31(
    datum: PointDatum, k: int, theta_cfg: ThetaConfig = ThetaConfig(), oracle_samples: int = 0
) -> VerificationReport:
    """Mean-curvature / k-Ricci inequality together with the identities it rests on."""
    inv = point_invariants(datum)
    n, c = inv.n, datum.c
    tr = theta_k(gauss_curvature(datum), k, theta_cfg)
    note = _scope_note(inv.kind)
    report = VerificationReport(datum_summary=_summary(datum, inv, k, tr.value))

    lhs, rhs = trace_identity_residual(datum, inv)
    report.checks.append(_identity("trace_identity", "gauss-equation trace identity", lhs, rhs, IDENTITY_TOL))

    fs, adapted = frame_sum(datum)
    report.checks.append(_identity(
        "frame_sum", "adapted-frame sum of g(P e_i, e_j)^2", fs, 3 * n * inv.cos2, FRAME_SUM_TOL,
        note="" if adapted else "no adapted frame at theta in {0, pi/2}; given frame used",
    ))

    rhs23 = 2 * inv.tau - c / 4 * (n * (n - 1) + 9 * n * inv.cos2)
    report.checks.append(_inequality(
        "intermediate_inequality", "n(n-1)|H|^2 >= 2 tau - ...", n * (n - 1) * inv.H2, rhs23, INEQUALITY_TOL
    ))

    report.checks.append(_inequality(
        "scalar_vs_theta", "tau >= n(n-1)/2 Theta_k", inv.tau, n * (n - 1) / 2 * tr.value, INEQUALITY_TOL
    ))

    cert = {
        "theta_k": tr.value,
        "argmin_plane": tr.argmin_plane.basis.tolist(),
        "argmin_vector": tr.argmin_vector.tolist(),
        "starts": tr.starts,
        "converged": tr.converged,
    }
    main = _inequality(
        "mean_curvature_bound", "|H|^2 >= Theta_k - (c/4)(1 + 9 cos^2/(n-1))",
        inv.H2, tr.value - inv.threshold, INEQUALITY_TOL, certificate=cert, note=note,
    )
    report.checks.append(main)
    if oracle_samples > 0:
        oracle = brute_force_theta_k(gauss_curvature(datum), k, oracle_samples, theta_cfg.seed)
        gap = tr.value - oracle
        cert["oracle_theta_k"] = oracle
        cert["oracle_gap"] = gap
        report.checks.append(_inequality(
            "mean_curvature_bound_oracle", "|H|^2 >= Theta_k - (c/4)(1 + 9 cos^2/(n-1))",
            inv.H2, oracle - inv.threshold, INEQUALITY_TOL, note=note,
            certificate={"oracle_theta_k": oracle, "oracle_gap": gap},
        ))
    return report


def relative_null_space(datum: PointDatum, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (tangent-frame coordinates) of {Z : h(Z, Y) = 0 for all Y}."""
    stacked = datum.h.reshape(-1, datum.n)
    return null_space(stacked, tol)


def verify_thm41(
    datum: PointDatum, k: int, theta_cfg: ThetaConfig = ThetaConfig(), tol: float = 1e-10
) -> VerificationReport:
    """Shape operator at the mean curvature against the k-Ricci threshold."""
    inv = point_invariants(datum)
    n = inv.n
    tr = theta_k(gauss_curvature(datum), k, theta_cfg)
    note = _scope_note(inv.kind)
    report = VerificationReport(datum_summary=_summary(datum, inv, k, tr.value))
    b = (n - 1) / n * (tr.value - inv.threshold)
    A = shape_operator(datum, inv.H)
    w, v = np.linalg.eigh(A)
    at_threshold = abs(tr.value - inv.threshold) <= EQUALITY_WINDOW
    h_zero = np.sqrt(inv.h2) <= tol
    if inv.H2 <= tol**2:
        note = (note + "; " if note else "") + "H = 0 branch"

    lam = float(w[0] - b)
    if not at_threshold:
        chk = Check("shape_operator_strict_bound", "A_H > b Id off threshold", lam, 0.0, lam, STRICT_TOL,
                    lam >= -STRICT_TOL, note=note, certificate={"b": b, "eigenvalues": w.tolist()})
        if abs(lam) <= STRICT_TOL:
            chk.status = "boundary"
        report.checks.append(chk)
    else:
        report.checks.append(_inequality(
            "shape_operator_nonnegative", "A_H >= 0 at threshold", float(w[0]), 0.0, tol, note=note,
            certificate={"b": b, "eigenvalues": w.tolist()},
        ))

    nul = relative_null_space(datum)
    near = np.abs(w - b) <= EQUALITY_WINDOW
    eigspace = v[:, near]
    if eigspace.shape[1]:
        dist = contained_in(eigspace, nul)
        ok = at_threshold and dist <= ANGLE_TOL
    else:
        dist = 0.0
        ok = True
    # converse: at the threshold every null direction is an eigenvector for b
    converse = float(np.abs((A - b * np.eye(n)) @ nul).max()) if (at_threshold and nul.shape[1]) else 0.0
    ok = ok and converse <= ANGLE_TOL
    report.checks.append(_logical(
        "eigenvector_null_space", "A_H X = b X iff threshold and X in null space", dist, converse, ok,
        certificate={"eigenvectors": eigspace.T.tolist(), "null_space": nul.T.tolist(),
                     "at_threshold": at_threshold, "max_distance": dist},
        note=note,
    ))

    dev = float(np.abs(A - b * np.eye(n)).max())
    scalar = dev <= tol
    report.checks.append(_logical(
        "totally_geodesic_equality", "A_H = b Id iff totally geodesic", dev, float(np.sqrt(inv.h2)),
        scalar == h_zero,
        certificate={"A_H_is_scalar": scalar, "totally_geodesic": bool(h_zero)},
        note="totally geodesic point" if h_zero else note,
    ))
    return report
