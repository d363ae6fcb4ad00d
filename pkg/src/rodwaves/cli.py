"""Command-line entry point.

    rodwaves eval-i --alpha 2 --beta 0
    rodwaves beta-gamma --gamma 1
    rodwaves constants
    rodwaves bounds --gamma 1
    rodwaves check --datum datum.json --gamma 1 [--line]
    rodwaves simulate --datum datum.json --gamma 3 [--modes 512] [--tmax 2]
    rodwaves scan --gamma-min -2 --gamma-max 2 --step 0.01
    rodwaves materials
    rodwaves fig-data --which courbe

Reports are JSON on stdout; errors are JSON on stderr with exit status 2
for domain errors and 1 for anything else.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import criteria, reports, simulator, thresholds, variational
from .datum import InitialDatum
from .kernel import BETA_MAX, InadmissibleWeightError
from .legendre import find_alpha0

FIGURES = ("upbound-betag", "i2beta", "ifini", "courbe")


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# commands


def cmd_eval_i(args):
    if abs(args.beta) > BETA_MAX + 1e-12:
        raise InadmissibleWeightError(
            f"weight changes sign: |beta|={abs(args.beta):.6g} > (e+1)/(e-1)"
        )
    res = variational.eval_I(variational.MinProblem(args.alpha, args.beta), args.grid)
    params = {"alpha": args.alpha, "beta": args.beta, "grid": args.grid}
    return params, res.to_dict(include_minimizer=args.minimizer), {"method": res.method}


def cmd_beta_gamma(args):
    res = thresholds.compute_beta_gamma(args.gamma, args.grid)
    return {"gamma": args.gamma, "grid": args.grid}, res.to_dict(), {
        "method": res.method, "grid_points": thresholds.SCAN_POINTS, "beta_tol": thresholds.BETA_TOL}


def cmd_constants(args):
    cc = thresholds.compute_critical_constants()
    d = cc.to_dict()
    d["poincare_limit_from_alpha0"] = -1.0 / cc.alpha0
    return {}, d, {"method": "legendre-series + newton-bisect"}


def cmd_bounds(args):
    g = args.gamma
    res = thresholds.compute_beta_gamma(g, args.grid)
    value, bound = thresholds.beta_infinity(args.grid)
    out = {
        "gamma": g,
        "upper_bound": thresholds.beta_gamma_upper_bound(g),
        "beta_gamma": res.beta_gamma,
        "beta_gamma_finite": res.finite,
        "beta_gamma_line": thresholds.beta_gamma_nonperiodic(g),
        "beta_infinity": value,
        "beta_infinity_bound": bound,
    }
    return {"gamma": g, "grid": args.grid}, out, {"method": "closed-form bounds"}


def _load_datum(path):
    try:
        return InitialDatum.from_json(path)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DomainError(f"cannot read datum file {path}: {exc}") from exc


def cmd_check(args):
    datum = _load_datum(args.datum)
    if args.line or datum.domain == "line":
        verdict = criteria.check_blowup_line(datum, args.gamma)
    else:
        verdict = criteria.check_blowup_periodic(datum, args.gamma)
    params = {"datum": datum.to_dict(), "gamma": args.gamma, "line": bool(args.line)}
    prov = {"scan_points": criteria.SCAN_POINTS, "boundary_tol": criteria.BOUNDARY_TOL}
    if datum.decay_flag:
        prov["warning"] = "sampled datum: Fourier coefficients decay slower than |k|^-2"
    return params, verdict.to_dict(), prov


def cmd_simulate(args):
    datum = _load_datum(args.datum)
    traj = tuple(args.trajectory or ())
    cfg = simulator.SimConfig(gamma=args.gamma, N=args.modes, t_max=args.tmax,
                              cfl_safety=args.cfl, trajectories=traj)
    out = simulator.run(datum, cfg)
    fit = simulator.detect_and_fit_blowup(out)
    summary = simulator.run_summary(out, fit)
    if args.gamma != 0 and datum.domain == "circle":
        verdict = criteria.check_blowup_periodic(datum, args.gamma)
        summary["criterion"] = verdict.to_dict()
    files = None
    if args.out:
        files = list(simulator.write_run_output(out, args.out, fit))
    summary["files"] = files
    params = {"datum": datum.to_dict(), "gamma": args.gamma, "modes": args.modes,
              "tmax": args.tmax, "cfl": args.cfl}
    return params, summary, {"integrator": "rk4", "dealias": "3/2 padding"}


def cmd_scan(args):
    scan = thresholds.scan_applicability(args.gamma_min, args.gamma_max, args.step, args.grid)
    params = {"gamma_min": args.gamma_min, "gamma_max": args.gamma_max, "step": args.step}
    return params, scan.to_dict(), {"method": "max over beta of beta^2 + I - alpha"}


def cmd_materials(args):
    rows = thresholds.reproduce_materials(args.grid)
    return {}, {"rows": rows, "all_pass": all(r["pass"] for r in rows)}, {}


# ---------------------------------------------------------------------------
# figure data


def _linspace(a, b, n):
    return [float(v) for v in np.linspace(a, b, n)]


def figure_rows(which: str, points: int, grid=None):
    """Header and rows of curve samples for one of ``FIGURES``."""
    if which == "upbound-betag":
        cc = thresholds.compute_critical_constants()
        gs = _linspace(-6.0, cc.gamma1_minus, points) + _linspace(cc.gamma1_plus, 6.0, points)
        rows = []
        for g in gs:
            rows.append([g, thresholds.beta_gamma_upper_bound(g),
                         thresholds.compute_beta_gamma(g, grid).beta_gamma])
        return ["gamma", "upper_bound", "beta_gamma"], rows
    if which == "i2beta":
        rows = []
        for b in _linspace(0.0, BETA_MAX, points):
            v = variational.closed_form_I2(b, n_samples=2).value
            rows.append([b, v, b * b + v - 2.0])
        return ["beta", "I_alpha2", "beta2_plus_I_minus_2"], rows
    if which == "ifini":
        rows = []
        for b in _linspace(0.0, BETA_MAX, points):
            if abs(b - BETA_MAX) < 1e-12:
                rows.append([b, find_alpha0()])
            else:
                rows.append([b, -variational.poincare_best_constant(b).lambda_min])
        return ["beta", "alpha_threshold"], rows
    if which == "courbe":
        rows = []
        for g in _linspace(-10.0, 10.0, 2 * points):
            if g == 0.0:
                continue
            rows.append([g, thresholds.compute_beta_gamma(g, grid).beta_gamma])
        return ["gamma", "beta_gamma"], rows
    raise DomainError(f"unknown figure {which!r}; choose from {', '.join(FIGURES)}")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else repr(float(v)) for v in r])
    return buf.getvalue()


def cmd_fig_data(args):
    header, rows = figure_rows(args.which, args.points, args.grid)
    text = _csv_text(header, rows)
    if args.out is None:
        return None, text, None
    with open(args.out, "w") as fh:
        fh.write(text)
    return ({"which": args.which, "points": args.points},
            {"file": args.out, "columns": header, "rows": len(rows)}, {"format": "csv"})


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rodwaves", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--grid", type=int, default=None, help="FD grid size (default: env RODWAVES_GRID or 4096)")
        return sp

    sp = add("eval-i", cmd_eval_i, "value of I(alpha, beta)")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--minimizer", action="store_true", help="include the sampled minimiser")

    sp = add("beta-gamma", cmd_beta_gamma, "blowup threshold beta_gamma")
    sp.add_argument("--gamma", type=float, required=True)

    add("constants", cmd_constants, "critical constants alpha0, alpha1+-, alpha2+-, gamma1+-, gamma2+-")

    sp = add("bounds", cmd_bounds, "analytic upper bounds for beta_gamma")
    sp.add_argument("--gamma", type=float, required=True)

    sp = add("check", cmd_check, "apply the breaking criterion to a datum")
    sp.add_argument("--datum", required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--line", action="store_true", help="use the criterion on the real line")

    sp = add("simulate", cmd_simulate, "spectral simulation with breaking detection")
    sp.add_argument("--datum", required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--modes", type=int, default=512)
    sp.add_argument("--tmax", type=float, default=10.0)
    sp.add_argument("--cfl", type=float, default=0.1)
    sp.add_argument("--trajectory", type=float, action="append", help="track q(t, x0); repeatable")
    sp.add_argument("--out", default=None, help="prefix for <out>.csv and <out>.json")

    sp = add("scan", cmd_scan, "gamma values where beta_gamma is finite")
    sp.add_argument("--gamma-min", type=float, required=True)
    sp.add_argument("--gamma-max", type=float, required=True)
    sp.add_argument("--step", type=float, required=True)

    add("materials", cmd_materials, "reproduce the table of thresholds for rod materials")

    sp = add("fig-data", cmd_fig_data, "curve samples as CSV")
    sp.add_argument("--which", choices=FIGURES, required=True)
    sp.add_argument("--points", type=int, default=41)
    sp.add_argument("--out", default=None, help="write CSV here and print a JSON report")
    return p


def _fail(exc, code):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params, results, prov = args.func(args)
    except ValueError as exc:  # includes DatumError, InadmissibleWeightError
        return _fail(exc, 2)
    except Exception as exc:  # noqa: BLE001
        return _fail(exc, 1)
    if params is None:
        sys.stdout.write(results)
        return 0
    report = reports.envelope(args.command, params, results, prov)
    print(reports.dumps(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
