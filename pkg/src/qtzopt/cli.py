"""``qtzopt`` command line: one subcommand per experiment kind."""
from __future__ import annotations

import argparse
import sys

from .config import ExperimentConfig, apply_overrides, load_config, parse_value
from .errors import ConfigError, DomainError
from .harness import run_experiment

# (flag, dotted key, kinds that accept it)
_FLAGS = [
    ("--trials", "trials", None), ("--seeds", "seeds", None), ("--budget", "budget", None),
    ("--algos", "algos", None), ("--out", "out", None), ("--base", "base", None),
    ("--cities", "tsp.cities", {"tsp"}), ("--side", "tsp.side", {"tsp"}),
    ("--instance", "tsp.instance_file", {"tsp"}), ("--instance-seed", "tsp.instance_seed", {"tsp"}),
    ("--move", "tsp.move", {"tsp"}),
    ("--alpha", "washboard.alpha", {"washboard"}), ("--start", "washboard.start", {"washboard"}),
    ("--dim", "bench.dim", {"bench"}),
    ("--method", "algos", {"gradopt"}),
]


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtzopt", description="Quantized search experiments.")
    sub = p.add_subparsers(dest="experiment", required=True)
    helps = {"tsp": "travelling salesman comparison", "bench": "continuous benchmark search",
             "washboard": "parabolic washboard search", "gradopt": "gradient methods, plain and quantized",
             "mltoy": "quantized Langevin training on synthetic least squares",
             "theory": "print the numeric identity checks"}
    for kind, text in helps.items():
        sp = sub.add_parser(kind, help=text)
        sp.add_argument("--config", help="file of 'key = value' lines")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key (repeatable)")
        if kind == "theory":
            sp.add_argument("--out", dest="out")
            continue
        for flag, key, kinds in _FLAGS:
            if kinds is None or kind in kinds:
                sp.add_argument(flag, dest=key.replace(".", "__"), metavar=key.split(".")[-1].upper())
        sp.add_argument("--trace", dest="trace", action="store_const", const="true")
        sp.add_argument("--no-trace", dest="trace", action="store_const", const="false")
        if kind == "bench":
            sp.add_argument("--function", dest="bench__function")
        if kind == "gradopt":
            sp.add_argument("--function", dest="gradopt__function")
            sp.add_argument("--quantized", dest="gradopt__quantized", action="store_const", const="on")
            sp.add_argument("--plain", dest="gradopt__quantized", action="store_const", const="off")
    return p


def build_config(argv=None) -> ExperimentConfig:
    args = _parser().parse_args(argv)
    cfg = ExperimentConfig(experiment=args.experiment)
    if args.config:
        cfg = load_config(args.config, cfg)
        cfg.experiment = args.experiment
    pairs = {}
    for name, value in vars(args).items():
        if name in ("experiment", "config", "set") or value is None:
            continue
        key = name.replace("__", ".")
        pairs[key] = parse_value(key, str(value))
    for item in args.set:
        if "=" not in item:
            raise ConfigError(item, "expected KEY=VALUE")
        key, value = (s.strip() for s in item.split("=", 1))
        pairs[key] = parse_value(key, value)
    return apply_overrides(cfg, pairs)


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cols = list(result.rows[0]) if result.rows else []
    show = [c for c in cols if c in ("algorithm", "inputs", "value", "reference", "n_trials", "mean",
                                     "stddev", "improvement_pct", "hit_rate_pct", "first_hit_mean")
            or c.startswith("ratio_vs_")]
    print("\t".join(show))
    for row in result.rows:
        print("\t".join(_fmt(row.get(c)) for c in show))
    print(f"wrote {result.out_dir}/summary.csv and summary.json", file=sys.stderr)
    return 0


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return "" if v is None else str(v)


if __name__ == "__main__":
    sys.exit(main())
