"""Command-line front end: ``qslant verify | theta-k | immersion``.

Exit codes: 0 all requested checks pass, 1 input error, 2 a check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .catalog import catalog_case
from .errors import QSFError
from .immersion import builtin_chart, codazzi_residual, intrinsic_curvature, point_datum_at, slant_angle_field
from .normal_bundle import (
    check_lemma53,
    check_lemma54,
    first_normal_space,
    quaternionic_slant_test,
    thm55_consistency,
)
from .pointwise import PointDatum, gauss_curvature, h_norm_sq, mean_curvature, scalar_curvature
from .quat import Subspace, slant_test, standard_triple
from .ricci import ThetaConfig, brute_force_theta_k, theta_k
from .verify import Check, VerificationReport, verify_thm31, verify_thm41

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2
FRAME_TOL = 1e-8
SYM_TOL = 1e-10
CHECKS = ("thm31", "thm41", "qslant", "lemma53", "lemma54", "thm55")


class InputError(Exception):
    pass


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and insertion-ordered keys."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent, _level + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def load_case(ref: str) -> PointDatum:
    """Read a case file or resolve a ``catalog:`` reference."""
    if ref.startswith("catalog:"):
        try:
            return catalog_case(ref)
        except QSFError as exc:
            raise InputError(str(exc)) from None
    try:
        with open(ref, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read case file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    return parse_case(raw)


def parse_case(raw: dict) -> PointDatum:
    if not isinstance(raw, dict):
        raise InputError("case file must hold a JSON object")
    try:
        m, c = int(raw["m"]), float(raw.get("c", 0.0))
        rows = np.asarray(raw["tangent_frame"], dtype=float)
        h = np.asarray(raw["h"], dtype=float)
        normal_rows = raw.get("normal_frame")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid case file: {exc!r}") from None
    try:
        triple = standard_triple(m)
        if rows.ndim != 2 or rows.shape[1] != 4 * m:
            raise InputError(f"tangent_frame rows must have length {4 * m}")
        tangent = Subspace(rows.T, tol=FRAME_TOL)
        if normal_rows is None:
            normal = tangent.complement()
        else:
            normal = Subspace(np.asarray(normal_rows, dtype=float).T, tol=FRAME_TOL)
        return PointDatum(triple, c, tangent, normal, h, sym_tol=SYM_TOL)
    except QSFError as exc:
        raise InputError(str(exc)) from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QSF_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"QSF_SEED must be an integer, got {env!r}") from None


def _versions() -> dict:
    return {"qslant": __version__, "numpy": np.__version__}


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _normal_bundle_checks(datum: PointDatum, which: set, tol: float) -> VerificationReport:
    report = VerificationReport()
    dec = datum.decomposition()
    sr = slant_test(dec, tol)
    if "qslant" in which:
        qs = quaternionic_slant_test(datum, dec, tol)
        report.checks.append(Check("quaternionic_slant", "A_{F Y} Z = A_{F Z} Y", qs.residual, 0.0,
                                   -qs.residual, tol, qs.passed))
    if "lemma53" in which:
        l53 = check_lemma53(dec, sr.theta)
        report.checks.append(Check("normal_part_isometry", "<C U, C V> = cos^2 <U, V> on F(TM)",
                                   l53.residual, 0.0, -l53.residual, 1e-12, l53.residual <= 1e-12,
                                   certificate={"outside_residual": l53.outside_residual}))
    if "lemma54" in which:
        l54 = check_lemma54(datum, dec, tol)
        worst = max(l54.angles.values())
        report.checks.append(Check("null_space_image", "B((Im h)^perp) = N_p", worst, 0.0, -worst, 1e-8,
                                   l54.passed, certificate={"dims": {str(k): v for k, v in l54.dims.items()}}))
    if "thm55" in which:
        t55 = thm55_consistency(datum, dec, tol)
        ok = t55.verdict == "consistent"
        chk = Check("unfull_bundle_obstruction", "unfull first normal bundle forces c = 0", float(datum.c),
                    0.0, 0.0 if ok else -1.0, 0.0, ok, certificate=dict(t55.details, premises_hold=t55.premises_hold),
                    note="" if ok else "contradiction flag: premises hold with c != 0")
        report.checks.append(chk)
    fns = first_normal_space(datum)
    report.datum_summary.setdefault("first_normal_dim", fns.dim)
    return report


def cmd_verify(args) -> int:
    datum = load_case(args.case)
    seed = _seed(args)
    which = set(args.check.split(",")) if args.check else {"thm31", "thm41"}
    unknown = which - set(CHECKS)
    if unknown:
        raise InputError(f"unknown checks: {sorted(unknown)}; choose from {CHECKS}")
    cfg = ThetaConfig(starts=args.starts, seed=seed)
    report = VerificationReport()
    try:
        if "thm31" in which:
            report.extend(verify_thm31(datum, args.k, cfg, args.oracle_samples))
        if "thm41" in which:
            report.extend(verify_thm41(datum, args.k, cfg, args.tol))
        report.extend(_normal_bundle_checks(datum, which, args.tol))
    except QSFError as exc:
        raise InputError(str(exc)) from None
    out = report.to_dict()
    out["seed"] = seed
    out["versions"] = _versions()
    _write(dumps(out), args.report)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: slack={c.slack:.3e} tol={c.tolerance:.0e}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_theta_k(args) -> int:
    datum = load_case(args.case)
    seed = _seed(args)
    R = gauss_curvature(datum)
    try:
        res = theta_k(R, args.k, ThetaConfig(starts=args.starts, seed=seed))
        oracle = brute_force_theta_k(R, args.k, args.oracle_samples, seed) if args.oracle_samples > 0 else None
    except QSFError as exc:
        raise InputError(str(exc)) from None
    out = {
        "k": args.k,
        "theta_k": res.value,
        "argmin_plane": res.argmin_plane.basis.T.tolist(),
        "argmin_vector": res.argmin_vector.tolist(),
        "starts": res.starts,
        "converged": res.converged,
        "oracle_theta_k": oracle,
        "oracle_gap": None if oracle is None else res.value - oracle,
        "seed": seed,
        "versions": _versions(),
    }
    _write(dumps(out), args.report)
    return EXIT_OK


def cmd_immersion(args) -> int:
    try:
        chart = builtin_chart(args.chart)
    except QSFError as exc:
        raise InputError(str(exc)) from None
    try:
        grid = tuple(int(g) for g in args.grid.lower().split("x"))
    except ValueError:
        raise InputError(f"grid must look like 5x5, got {args.grid!r}") from None
    if len(grid) != chart.n:
        raise InputError(f"chart has {chart.n} parameters, grid has {len(grid)} axes")
    if args.fd_step is not None:
        chart = type(chart)(chart.n, chart.m, chart.map, chart.box, args.fd_step, grid, chart.name)
    triple = standard_triple(chart.m)
    field = slant_angle_field(chart, triple, grid, args.tol)
    header = [f"u{i + 1}" for i in range(chart.n)] + [
        "skipped", "theta", "slant_residual", "H2", "tau", "trace_identity_residual", "codazzi_residual",
    ]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    worst = {"trace_identity_residual": 0.0, "codazzi_residual": 0.0}
    for p in field.points:
        row = [format(x, ".17g") for x in p.u]
        if p.skipped:
            writer.writerow(row + ["1"] + [""] * 6)
            continue
        try:
            datum = point_datum_at(chart, triple, p.u, richardson=True)
            tau = scalar_curvature(intrinsic_curvature(chart, p.u, 1e-2, richardson=True))
            cod = codazzi_residual(chart, triple, p.u, args.codazzi_step)
        except QSFError:
            writer.writerow(row + ["1"] + [""] * 6)
            continue
        _, H2 = mean_curvature(datum)
        n = chart.n
        # flat ambient: n^2|H|^2 = 2 tau + |h|^2
        ident = n * n * H2 - 2 * tau - h_norm_sq(datum)
        worst["trace_identity_residual"] = max(worst["trace_identity_residual"], abs(ident))
        worst["codazzi_residual"] = max(worst["codazzi_residual"], cod)
        writer.writerow(row + ["0"] + [format(x, ".17g") for x in (p.theta, p.slant_residual, H2, tau, ident, cod)])
    text = buf.getvalue()
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    summary = {
        "chart": args.chart,
        "grid": list(grid),
        "points": len(field.points),
        "skipped": sum(p.skipped for p in field.points),
        "is_slant": field.is_slant,
        "theta_spread": field.theta_spread,
        "max_slant_residual": field.max_residual,
        "max_trace_identity_residual": worst["trace_identity_residual"],
        "max_codazzi_residual": worst["codazzi_residual"],
        "versions": _versions(),
    }
    if args.report:
        _write(dumps(summary), args.report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qslant", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="random seed (fallback: $QSF_SEED, then 0)")
        p.add_argument("--report", default=None, help="write the JSON report here (default: stdout)")
        p.add_argument("--tol", type=float, default=1e-10)

    v = sub.add_parser("verify", help="verify inequalities and normal-bundle facts for one case")
    v.add_argument("--case", required=True, help="case JSON path or catalog:<name>")
    v.add_argument("--k", type=int, default=2)
    v.add_argument("--starts", type=int, default=64)
    v.add_argument("--oracle-samples", type=int, default=0)
    v.add_argument("--check", default=None, help=f"comma list from {','.join(CHECKS)} (default thm31,thm41)")
    common(v)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("theta-k", help="compute Theta_k for one case")
    t.add_argument("--case", required=True)
    t.add_argument("--k", type=int, default=2)
    t.add_argument("--starts", type=int, default=64)
    t.add_argument("--oracle-samples", type=int, default=0)
    common(t)
    t.set_defaults(func=cmd_theta_k)

    im = sub.add_parser("immersion", help="sample a builtin chart on a grid")
    im.add_argument("chart", help="builtin:<name>[?key=value...]")
    im.add_argument("--grid", default="5x5")
    im.add_argument("--fd-step", type=float, default=None)
    im.add_argument("--codazzi-step", type=float, default=1e-2)
    im.add_argument("--csv", default=None, help="write per-point CSV here (default: stdout)")
    common(im)
    im.set_defaults(func=cmd_immersion)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
