"""Run every golden check and write the text and JSON reports."""

import argparse
import sys
from pathlib import Path

from screfine.analysis import run_golden_checks


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--mc-samples", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    report = run_golden_checks(mc_samples=args.mc_samples, seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    (args.out / "report.json").write_text(report.to_json(), encoding="utf-8")
    sys.stdout.write(report.to_text())
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
