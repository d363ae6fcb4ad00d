"""Sample beta_gamma, its analytic upper bound and the line threshold over gamma; write CSV.

    python scripts/beta_gamma_curve.py --gmin -10 --gmax 10 --points 201 --out curve.csv
"""

import argparse
import csv
import sys

import numpy as np

from rodwaves.thresholds import beta_gamma_nonperiodic, compute_beta_gamma, beta_gamma_upper_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gmin", type=float, default=-10.0)
    ap.add_argument("--gmax", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=201)
    ap.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = ap.parse_args()

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["gamma", "beta_gamma", "upper_bound", "beta_gamma_line"])
    for g in np.linspace(args.gmin, args.gmax, args.points):
        g = float(g)
        if g == 0.0:
            continue
        res = compute_beta_gamma(g)
        bg = res.beta_gamma if res.finite else float("inf")
        ub = beta_gamma_upper_bound(g)
        line = beta_gamma_nonperiodic(g)
        w.writerow([repr(g), repr(bg), "" if ub is None else repr(ub), "" if line is None else repr(line)])
    if args.out:
        fh.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
