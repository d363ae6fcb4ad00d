"""Print the reference tables: I(2, beta), critical constants, materials, applicability.

    python scripts/reproduce_tables.py [--json out.json]
"""

import argparse
import json
import math

from rodwaves import reports
from rodwaves.kernel import BETA_MAX
from rodwaves.thresholds import (
    applicability_alpha_interval,
    beta_infinity,
    compute_beta_gamma,
    compute_critical_constants,
    gamma_of_alpha,
    reproduce_materials,
    beta_gamma_upper_bound,
)
from rodwaves.variational import MinProblem, closed_form_I2, solve_EL_fd


def values_table():
    rows = []
    for label, beta in (("0", 0.0), ("1", 1.0), ("(e+1)/(e-1)", BETA_MAX)):
        rows.append({"beta": label, "closed_form": closed_form_I2(beta).value,
                     "fd": solve_EL_fd(MinProblem(2.0, beta)).value})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", default=None, help="also write all tables to this file")
    args = ap.parse_args()

    vals = values_table()
    print("I(2, beta)")
    for r in vals:
        print(f"  beta={r['beta']:<12} closed={r['closed_form']:.10f}  fd={r['fd']:.10f}")

    cc = compute_critical_constants()
    print("\ncritical constants")
    for k, v in cc.to_dict().items():
        print(f"  {k:<14} {v: .6f}")

    b1 = compute_beta_gamma(1.0).beta_gamma
    binf, binf_bound = beta_infinity()
    print("\nthresholds")
    print(f"  beta_1     = {b1:.6f}   bound {beta_gamma_upper_bound(1.0):.6f}")
    print(f"  beta_inf   = {binf:.6f}   bound {binf_bound:.6f}")

    lo, hi = applicability_alpha_interval()
    print("\napplicability (beta_gamma = +inf strictly inside)")
    print(f"  alpha in [{lo:.5f}, {hi:.5f}]  ->  gamma in ({gamma_of_alpha(lo):.5f}, {gamma_of_alpha(hi):.5f})")

    mats = reproduce_materials()
    print("\nmaterials")
    for r in mats:
        comp = "+inf" if not r["finite"] else f"{r['computed']:.4f}"
        exp = "n/a" if r["expected"] is None else f"{r['expected']:.3f}"
        print(f"  gamma={r['gamma']:>8.3f}  expected={exp:>6}  computed={comp:>7}  {'ok' if r['pass'] else 'MISMATCH'}")

    if args.json:
        payload = reports.envelope("materials", {}, {
            "values": vals,
            "constants": cc.to_dict(),
            "beta_1": b1,
            "beta_infinity": [binf, binf_bound],
            "alpha_interval": [lo, hi],
            "materials": mats,
        }, {"script": "reproduce_tables"})
        with open(args.json, "w") as fh:
            fh.write(reports.dumps(payload))
    return 0 if all(r["pass"] for r in mats) and not math.isnan(b1) else 1


if __name__ == "__main__":
    raise SystemExit(main())
