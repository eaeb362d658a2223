"""End-to-end acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured worst case,
then asserts. Run with ``pytest tests/test_acceptance.py -s`` (or look for the
lines in the ``-v`` output, which are written past the capture).
"""

import json

import numpy as np
import pytest

from qslant.catalog import (
    CATALOG_NAMES,
    INV_SQRT3,
    catalog_case,
    delta_datum,
    kernel_datum,
    quaternionic_slant_datum,
    quaternionic_subspace,
    random_point_datum,
    random_slant_subspace,
    slant_4space,
    slant_plane,
    totally_real_subspace,
)
from qslant.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from qslant.immersion import (
    builtin_chart,
    codazzi_residual,
    intrinsic_curvature,
    point_datum_at,
    slant_angle_field,
)
from qslant.linalg import max_principal_angle, random_orthonormal
from qslant.normal_bundle import check_lemma53, check_lemma54, thm55_consistency
from qslant.pointwise import (
    PointDatum,
    gauss_curvature,
    h_norm_sq,
    mean_curvature,
    scalar_curvature,
)
from qslant.quat import Subspace, check_corollary22, decompose, slant_test, standard_triple
from qslant.ricci import ThetaConfig, brute_force_theta_k, coordinate_average_residual, theta_k
from qslant.verify import frame_sum, point_invariants, trace_identity_residual, verify_thm31, verify_thm41

N_DATA = 1000
ORACLE_SAMPLES = 100_000


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


def sweep_datum(i: int) -> PointDatum:
    """The i-th datum of the shared random sweep: n, c and the h scale cycle with i."""
    n = (2, 4)[i % 2]
    c = (-4.0, 0.0, 4.0)[(i // 2) % 3]
    scale = (1.0, 0.3, 0.03)[(i // 6) % 3]
    return random_point_datum(random_slant_subspace(n, seed=i), c, scale, seed=10_000 + i)


def test_structure(report):
    worst_rel = 0.0
    exact = True
    for m in (1, 2, 3):
        t = standard_triple(m)
        I = np.eye(4 * m)
        J1, J2, J3 = t.J
        exact &= all(np.array_equal(J @ J, -I) and np.array_equal(J.T @ J, I) for J in t.J)
        exact &= np.array_equal(J1 @ J2, J3) and np.array_equal(J2 @ J3, J1) and np.array_equal(J3 @ J1, J2)
        exact &= np.array_equal(J2 @ J1, -J3)
    rng = np.random.default_rng(0)
    for m in (2, 3):
        t = standard_triple(m)
        for _ in range(100):
            k = int(rng.integers(1, 4 * m))
            dec = decompose(t, Subspace(random_orthonormal(rng, 4 * m, k)))
            worst_rel = max(worst_rel, *dec.lemma52_residuals().values())
    report(1, exact and worst_rel <= 1e-12,
           f"quaternion relations exact={exact}; worst L1-L4 residual {worst_rel:.2e} (tol 1e-12)")


def test_slant_characterization(report):
    t = standard_triple(2)
    thetas = np.linspace(np.arccos(INV_SQRT3), np.pi / 2, 50)
    lam_err = cor = 0.0
    all_slant = True
    for theta in thetas:
        dec = decompose(t, slant_plane(theta))
        sr = slant_test(dec)
        all_slant &= sr.is_slant
        lam_err = max(lam_err, abs(sr.lam + np.cos(theta) ** 2))
        res = check_corollary22(dec, theta)
        # the mixed normal products are not an identity; see test_quat
        cor = max(cor, *(v for k, v in res.items() if k != "FgF_cross"))
    ok = all_slant and lam_err <= 1e-12 and cor <= 1e-10
    report(2, ok, f"50 angles slant={all_slant}; |lam + cos^2| <= {lam_err:.2e} (1e-12); "
                  f"squared-operator residual {cor:.2e} (1e-10)")


def test_trace_identity_sweep(report):
    worst = worst_frame = 0.0
    for i in range(N_DATA):
        d = sweep_datum(i)
        inv = point_invariants(d)
        lhs, rhs = trace_identity_residual(d, inv)
        worst = max(worst, abs(lhs - rhs))
        total, adapted = frame_sum(d, 1 + i % 3)
        assert adapted
        worst_frame = max(worst_frame, abs(total - 3 * d.n * inv.cos2))
    report(3, worst <= 1e-9 and worst_frame <= 1e-10,
           f"{N_DATA} data: identity residual {worst:.2e} (1e-9); frame sum residual {worst_frame:.2e} (1e-10)")


def oracle_theta(d: PointDatum, k: int, seed: int) -> float:
    R = gauss_curvature(d)
    if d.n == 2:
        return R.sectional(0, 1)
    return brute_force_theta_k(R, k, ORACLE_SAMPLES, seed=seed)


def test_mean_curvature_inequality(report):
    worst = np.inf
    for i in range(N_DATA):
        d = sweep_datum(i)
        k = 2 if d.n == 2 else (2, 3, 4)[(i // 2) % 3]
        inv = point_invariants(d)
        slack = inv.H2 - (oracle_theta(d, k, seed=i) - inv.threshold)
        worst = min(worst, slack)
    eq = verify_thm31(catalog_case("catalog:slant-plane-tg"), 2).check("mean_curvature_bound")
    equality = eq.lhs == 0.0 and abs(eq.rhs) <= 1e-12
    report(4, worst >= -1e-8 and equality,
           f"{N_DATA} data: min slack {worst:.3e} (>= -1e-8); flat totally geodesic plane "
           f"{eq.lhs:g} = {eq.rhs:g}")


def test_shape_operator(report):
    strict = verify_thm41(delta_datum(totally_real_subspace(2, 2)), 2).check("shape_operator_strict_bound")
    lam_ok = abs(strict.slack - 0.5) <= 1e-10 and strict.passed
    tg_ok = True
    for sub in (slant_plane(np.pi / 3), slant_4space(), totally_real_subspace(2, 2), quaternionic_subspace(2, 1)):
        rep = verify_thm41(PointDatum.build(standard_triple(2), 0.0, sub), 2, ThetaConfig(starts=16))
        tg = rep.check("totally_geodesic_equality")
        b = rep.checks[0].certificate["b"]
        tg_ok &= tg.passed and tg.note == "totally geodesic point" and abs(b) <= 1e-10 and tg.lhs <= 1e-10
    worst_angle = 0.0
    kernel_ok = True
    for seed in range(10):
        for sub, kdim in ((slant_plane(1.2), 1), (slant_4space(), 1), (slant_4space(), 2)):
            d = kernel_datum(sub, kdim, 0.0, seed, psd=True)
            chk = verify_thm41(d, 2, ThetaConfig(starts=16)).check("eigenvector_null_space")
            eig = np.array(chk.certificate["eigenvectors"]).reshape(-1, d.n).T
            nul = np.array(chk.certificate["null_space"]).reshape(-1, d.n).T
            kernel_ok &= chk.passed and eig.shape[1] == kdim
            worst_angle = max(worst_angle, max_principal_angle(eig, nul))
    ok = lam_ok and tg_ok and kernel_ok and worst_angle <= 1e-8
    report(5, ok, f"delta datum lambda_min {strict.slack:.12f} (0.5 +- 1e-10); totally geodesic ok={tg_ok}; "
                  f"kernel eigenvectors in null space ok={kernel_ok}, max angle {worst_angle:.2e} (1e-8)")


def test_theta_vs_oracle(report):
    gap = 0.0
    full = avg = 0.0
    for i in range(50):
        d = random_point_datum(random_slant_subspace(4, seed=500 + i), (-4.0, 0.0, 4.0)[i % 3], seed=600 + i)
        R = gauss_curvature(d)
        k = 2 + i % 2
        opt = theta_k(R, k, ThetaConfig(starts=64, seed=i)).value
        gap = max(gap, abs(opt - brute_force_theta_k(R, k, ORACLE_SAMPLES, seed=i)))
        ric = np.einsum("pqqs->ps", R.R)
        full = max(full, abs(theta_k(R, 4).value - np.linalg.eigvalsh(ric)[0] / 3))
        for kk in (2, 3, 4):
            tau, weighted = coordinate_average_residual(R, kk)
            avg = max(avg, abs(tau - weighted))
    ok = gap <= 1e-4 and full <= 1e-10 and avg <= 1e-10
    report(6, ok, f"50 data: max |theta_k - oracle| {gap:.2e} (1e-4); Theta_n residual {full:.2e} (1e-10); "
                  f"averaging residual {avg:.2e} (1e-10)")


def test_normal_bundle(report):
    t = standard_triple(2)
    l53 = 0.0
    for i in range(50):
        dec = PointDatum.build(t, 0.0, random_slant_subspace((2, 4)[i % 2], seed=i)).decomposition()
        l53 = max(l53, check_lemma53(dec, slant_test(dec).theta).residual)
    l54 = 0.0
    l54_ok = True
    for sub in (slant_4space(), slant_plane(np.pi / 3), slant_plane(1.4)):
        res = check_lemma54(PointDatum.build(t, 0.0, sub))
        l54_ok &= res.passed
        l54 = max(l54, *res.angles.values())
    flat = thm55_consistency(catalog_case("catalog:slant4-tg")).verdict == "consistent"
    curved = thm55_consistency(catalog_case("catalog:slant4-c4"))
    flag = curved.premises_hold and curved.verdict == "contradiction"
    witnesses = 0
    data = [catalog_case(f"catalog:{name}?c={c}") for name in CATALOG_NAMES for c in (1.0, 4.0)]
    data += [quaternionic_slant_datum(slant_4space(), seed, c=4.0) for seed in range(20)]
    for d in data:
        r = thm55_consistency(d)
        witnesses += r.premises_hold and r.verdict == "consistent"
    ok = l53 <= 1e-12 and l54_ok and l54 <= 1e-8 and flat and flag and witnesses == 0
    report(7, ok, f"normal-part isometry residual {l53:.2e} (1e-12); null-space image angle {l54:.2e} (1e-8); "
                  f"flat consistent={flat}; c=4 flagged={flag}; positive-c witnesses {witnesses} of {len(data)}")


def test_immersion_pipeline(report):
    T2 = standard_triple(2)
    affine = builtin_chart("builtin:slant-plane")
    field = slant_angle_field(affine, T2, (5, 5))
    hmax = max(np.sqrt(h_norm_sq(point_datum_at(affine, T2, u))) for u in affine.grid_points((5, 5)))
    affine_ok = field.is_slant and field.theta_spread <= 1e-10 and hmax <= 1e-10
    quad = builtin_chart("builtin:quadratic-graph?fd_step=1e-3")
    ratios = []
    at_1e3 = 0.0
    for u in [(0.2, -0.3), (-0.5, 0.4), (0.35, 0.1)]:
        r1, r2 = codazzi_residual(quad, T2, u, 2e-3), codazzi_residual(quad, T2, u, 1e-3)
        ratios.append(r1 / r2)
        at_1e3 = max(at_1e3, r2)
    ratio_ok = all(3.5 <= r <= 4.5 for r in ratios) and at_1e3 <= 1e-4
    ident = 0.0
    for name in ("slant-cylinder", "quadratic-graph"):
        chart = builtin_chart(f"builtin:{name}")
        for u in chart.grid_points((5, 5)):
            d = point_datum_at(chart, T2, u, richardson=True)
            tau = scalar_curvature(intrinsic_curvature(chart, u, 1e-2, richardson=True))
            ident = max(ident, abs(4 * mean_curvature(d)[1] - 2 * tau - h_norm_sq(d)))
    ok = affine_ok and ratio_ok and ident <= 1e-6
    report(8, ok, f"affine |h| {hmax:.1e} (1e-10), theta spread {field.theta_spread:.1e} (1e-10); "
                  f"Codazzi ratios {', '.join(f'{r:.3f}' for r in ratios)} ([3.5, 4.5]); "
                  f"immersion identity residual {ident:.1e} (1e-6)")


def test_cli_contract(report, tmp_path, capsys):
    args = ["verify", "--case", "catalog:slant4-random?seed=2&c=4", "--k", "2", "--seed", "3", "--starts", "8"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    codes = [main(args + ["--report", str(a)]), main(args + ["--report", str(b)])]
    identical = a.read_bytes() == b.read_bytes()
    d = random_point_datum(slant_4space(), seed=0)
    rows = d.tangent.basis.T.copy()
    rows[0, 0] += 0.05
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"m": 2, "c": 0.0, "tangent_frame": rows.tolist(), "h": d.h.tolist()}))
    malformed = main(["verify", "--case", str(bad)])
    contradiction = main(["verify", "--case", "catalog:slant4-c4", "--check", "thm55"])
    capsys.readouterr()
    ok = identical and codes == [EXIT_OK, EXIT_OK] and malformed == EXIT_INPUT and contradiction == EXIT_FAIL
    report(9, ok, f"byte-identical={identical}; exit codes pass={codes[0]} malformed={malformed} "
                  f"contradiction={contradiction} (expect 0, 1, 2)")
