"""Monte-Carlo volume estimates against exact volumes over a range of sample sizes.

For each plan and sample size, reports the mean |z| score and the fraction of
seeds whose estimate lands within 4 standard errors.
"""

import argparse
import csv
import sys

import numpy as np

from screfine.analysis import montecarlo_volumes, volume_table
from screfine.lattice import PLANS


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--plans", nargs="*", default=list(PLANS))
    ap.add_argument("--sizes", nargs="*", type=int, default=[10**4, 10**5, 10**6])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--csv", help="optional output file")
    args = ap.parse_args()

    rows = []
    for name in args.plans:
        plan = PLANS[name]
        exact = volume_table(plan)
        for n in args.sizes:
            z = {cls: [] for cls in plan.classes}
            for seed in range(args.seeds):
                for cls, est in montecarlo_volumes(plan, n, seed).items():
                    err = est.estimate - float(exact.volume(cls))
                    z[cls].append(0.0 if est.stderr == 0 else err / est.stderr)
            for cls, zs in z.items():
                zs = np.abs(zs)
                rows.append((name, cls.name, n, float(zs.mean()), float((zs <= 4).mean())))

    w = csv.writer(open(args.csv, "w", newline="") if args.csv else sys.stdout)
    w.writerow(["plan", "class", "samples", "mean_abs_z", "within_4se"])
    for plan, cls, n, mz, frac in rows:
        w.writerow([plan, cls, n, f"{mz:.3f}", f"{frac:.3f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
