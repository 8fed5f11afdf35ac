#!/usr/bin/env python3
"""Parabolic washboard comparison at one or more corrugation strengths.

Prints the mean improvement ratio, the share of runs that reach the global
minimum to within the target gap, and the mean first-hit iteration.

    python scripts/run_washboard.py --alpha 10 3 --trials 100
"""
import argparse
from pathlib import Path

from qtzopt.config import ExperimentConfig, apply_overrides
from qtzopt.harness import run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, nargs="+", default=[10.0, 3.0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--out", default="results/washboard")
    args = ap.parse_args()

    print(f"{'alpha':>6} {'algo':>5} {'improve%':>9} {'hits%':>6} {'first hit':>10}")
    for a in args.alpha:
        cfg = apply_overrides(ExperimentConfig(experiment="washboard"), {
            "washboard.alpha": a, "trials": args.trials, "budget": args.budget})
        res = run_experiment(cfg, Path(args.out) / f"alpha_{a:g}")
        for row in res.rows:
            fh = row["first_hit_mean"]
            print(f"{a:>6g} {row['algorithm']:>5} {row['improvement_pct']:>9.2f} {row['hit_rate_pct']:>6.0f}"
                  f" {'' if fh is None else f'{fh:.0f}':>10}")


if __name__ == "__main__":
    main()
