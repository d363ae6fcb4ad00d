"""Break sine data for several gamma and compare with the criterion's time bound.

    python scripts/simulate_breaking.py --modes 512 1024 --outdir runs/
"""

import argparse
import os

from rodwaves.criteria import check_blowup_periodic
from rodwaves.datum import InitialDatum
from rodwaves.simulator import SimConfig, detect_and_fit_blowup, run, write_run_output

CASES = ((1.0, 1.0), (2.0, 1.0), (3.0, 0.1))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", type=int, nargs="+", default=[512])
    ap.add_argument("--cfl", type=float, default=0.1)
    ap.add_argument("--outdir", default=None, help="write <outdir>/g<gamma>_N<modes>.{csv,json}")
    args = ap.parse_args()
    if args.outdir:
        os.makedirs(args.outdir, exist_ok=True)

    print(f"{'gamma':>6} {'a':>5} {'N':>5} {'stop':>10} {'t_end':>8} {'T*_fit':>8} "
          f"{'T*_bound':>8} {'rate/(2/g)':>10} {'drift':>9}")
    for gamma, a in CASES:
        datum = InitialDatum.sine(a=a)
        bound = check_blowup_periodic(datum, gamma).tstar_bound
        for N in args.modes:
            out = run(datum, SimConfig(gamma, N=N, cfl_safety=args.cfl, trajectories=(0.5,)))
            fit = detect_and_fit_blowup(out)
            t_fit = f"{fit.t_star_est:.4f}" if fit.detected else "-"
            rate = f"{fit.rate_coeff * gamma / 2:.4f}" if fit.detected else "-"
            print(f"{gamma:6.2f} {a:5.2f} {N:5d} {out.stop_reason:>10} {out.final.t:8.4f} {t_fit:>8} "
                  f"{bound:8.4f} {rate:>10} {out.relative_energy_drift():9.2e}")
            if args.outdir:
                write_run_output(out, os.path.join(args.outdir, f"g{gamma:g}_N{N}"), fit)

    out = run(InitialDatum.sine(), SimConfig(0.0, N=min(args.modes), t_max=10.0))
    print(f"\ngamma=0: stop={out.stop_reason} t={out.final.t:.3f} drift={out.relative_energy_drift():.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
