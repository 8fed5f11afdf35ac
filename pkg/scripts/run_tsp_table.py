#!/usr/bin/env python3
"""Cost table for random Euclidean TSP instances of several sizes.

Runs QTZ, SA and QIA on one instance per city count and prints mean cost,
sample standard deviation and the improvement of QTZ over each other method
and over the nearest-neighbour tour.

    python scripts/run_tsp_table.py --cities 100 150 200 --trials 10 --out results/tsp
"""
import argparse
from pathlib import Path

from qtzopt.config import ExperimentConfig, apply_overrides
from qtzopt.harness import run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cities", type=int, nargs="+", default=[100, 150, 200])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--budget", type=int, default=30_000)
    ap.add_argument("--move", choices=("swap", "2opt"), default="swap")
    ap.add_argument("--incumbent", choices=("stored", "requantize"), default="stored")
    ap.add_argument("--out", default="results/tsp")
    args = ap.parse_args()

    print(f"{'cities':>6} {'NN':>9} {'QTZ':>9} {'sd':>7} {'SA':>9} {'sd':>7} {'QIA':>9} {'sd':>7}"
          f" {'vsSA%':>7} {'vsQIA%':>7} {'vsNN%':>7}")
    for n in args.cities:
        cfg = apply_overrides(ExperimentConfig(experiment="tsp"), {
            "tsp.cities": n, "trials": args.trials, "budget": args.budget, "tsp.move": args.move,
            "qtz.incumbent": args.incumbent, "trace": False})
        res = run_experiment(cfg, Path(args.out) / f"cities_{n}")
        r = {row["algorithm"]: row for row in res.rows}
        q = r["qtz"]
        print(f"{n:>6} {res.baselines['nn']:>9.2f} {q['mean']:>9.2f} {q['stddev']:>7.2f}"
              f" {r['sa']['mean']:>9.2f} {r['sa']['stddev']:>7.2f} {r['qia']['mean']:>9.2f}"
              f" {r['qia']['stddev']:>7.2f} {q['ratio_vs_sa']:>7.2f} {q['ratio_vs_qia']:>7.2f}"
              f" {q['ratio_vs_nn']:>7.2f}")


if __name__ == "__main__":
    main()
