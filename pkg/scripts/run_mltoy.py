#!/usr/bin/env python3
"""Steps needed to reach a loss tolerance on a synthetic least-squares task.

Compares plain SGD, the quantized Langevin rule and their Adam-based
counterparts under identical seeds, batch size and learning rate.

    python scripts/run_mltoy.py --trials 10 --steps 5000
"""
import argparse
from pathlib import Path

from qtzopt.config import ExperimentConfig, apply_overrides
from qtzopt.harness import run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rules", default="sgd,qsgld,adam,qsld")
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--steps", type=int, default=5000)
    ap.add_argument("--lr", type=float, default=0.01)
    ap.add_argument("--out", default="results/mltoy")
    args = ap.parse_args()

    cfg = apply_overrides(ExperimentConfig(experiment="mltoy"), {
        "algos": args.rules, "trials": args.trials, "budget": args.steps, "mltoy.lr": args.lr,
        "trace": False})
    res = run_experiment(cfg, Path(args.out))
    print(f"{'rule':>6} {'final loss':>12} {'reached%':>9} {'mean steps':>11}")
    for row in res.rows:
        fh = row["first_hit_mean"]
        print(f"{row['algorithm']:>6} {row['mean']:>12.3e} {row['hit_rate_pct']:>9.0f}"
              f" {'' if fh is None else f'{fh:.0f}':>11}")


if __name__ == "__main__":
    main()
