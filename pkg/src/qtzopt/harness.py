"""Multi-seed experiment orchestration, statistics and report files.

:func:`run_experiment` expands a resolved :class:`ExperimentConfig` into
``(algorithm, seed)`` trials, runs them (optionally across processes, capped by
``QTZOPT_THREADS``), merges the results in seed order and writes:

``summary.csv``
    one row per algorithm (column set in :data:`SUMMARY_COLUMNS`); contains no
    timing information, so reruns are byte-identical.
``trials.csv``
    one row per trial.
``trace_<algo>_<seed>.csv``
    per-iteration trace when tracing is on.
``summary.json``
    everything above plus the config and wall-clock times; validates against
    ``schemas/summary.schema.json``.
"""
from __future__ import annotations

import csv
import functools
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import theory
from .benchfns import grid_optimum, make_function
from .config import ExperimentConfig
from .errors import DomainError
from .gradopt import (LeastSquaresTask, LineSearchParams, QuantSchedule, EnforcementConfig, is_success,
                      minimize)
from .metaheur import BoxProblem, TRACE_COLUMNS, TspProblem, run_qia, run_qtz, run_sa, washboard_problem
from .schedule import AdiabaticSchedule, CoolingSchedule, LogLogPowerSchedule
from .tsp import generate_instance, load_instance, nearest_neighbor

SUMMARY_COLUMNS = ("algorithm", "n_trials", "single_trial", "mean", "stddev", "min", "max",
                   "initial_mean", "improvement_pct", "hit_rate_pct", "first_hit_mean", "budget")
TRIAL_COLUMNS = ("algorithm", "seed", "best_f", "initial_f", "evals", "hit_iter", "status")
SCHEMA_NAME = "summary.schema.json"


# --- statistics ------------------------------------------------------------------


def improvement_ratio(value: float, baseline: float) -> float:
    """``(baseline - value) / baseline * 100``."""
    if baseline == 0:
        raise DomainError("improvement ratio against a zero baseline is undefined")
    return (baseline - value) / baseline * 100.0


@dataclass
class TrialStats:
    algorithm: str
    n_trials: int
    mean: float
    stddev: float
    single_trial: bool
    ratios: dict = field(default_factory=dict)


def summarize(values, baselines: dict | None = None, algorithm: str = "") -> TrialStats:
    """Mean, sample standard deviation and improvement ratios of one algorithm's results.

    ``values`` holds floats or objects with a ``best_f`` attribute.  A single
    trial reports stddev 0 and sets ``single_trial``.
    """
    xs = [float(getattr(v, "best_f", v)) for v in values]
    if not xs:
        raise DomainError("summarize needs at least one record")
    mean = statistics.fmean(xs)
    sd = statistics.stdev(xs) if len(xs) > 1 else 0.0
    ratios = {name: improvement_ratio(mean, b) for name, b in (baselines or {}).items()}
    return TrialStats(algorithm, len(xs), mean, sd, len(xs) == 1, ratios)


# --- problems --------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _tsp_instance(cities, side, seed, path):
    return load_instance(path) if path else generate_instance(cities, side, seed)


ORACLE_TARGETS = ("eggholder", "schaffer_n2", "rosenbrock_modification")


@functools.lru_cache(maxsize=None)
def reference_optimum(name: str, dim: int) -> tuple[tuple, float]:
    """Known optimum used as a search target.

    Three functions are taken from a grid search instead of their printed
    optimum, because the printed point is not the minimiser of the printed formula.
    """
    fn = make_function(name, dim)
    if fn.name in ORACLE_TARGETS:
        x, f = grid_optimum(fn)
        return tuple(float(v) for v in x), f
    return tuple(float(v) for v in fn.optimum_point), float(fn.optimum_value)


def _bench_fn(cfg):
    return make_function(cfg.bench_function, cfg.bench_dim or None)


def build_problem(cfg: ExperimentConfig):
    if cfg.experiment == "tsp":
        inst = _tsp_instance(cfg.tsp_cities, cfg.tsp_side, cfg.tsp_instance_seed, cfg.tsp_instance_file)
        return TspProblem(inst, cfg.tsp_start, cfg.tsp_move)
    if cfg.experiment == "washboard":
        return washboard_problem(cfg.washboard_alpha, cfg.washboard_start, cfg.washboard_shrink,
                                 sampling=cfg.washboard_sampling)
    if cfg.experiment == "bench":
        fn = _bench_fn(cfg)
        _, f_star = reference_optimum(fn.name, fn.dim)
        return BoxProblem(fn.func, fn.lower, fn.upper, target=f_star, shrink=cfg.bench_shrink,
                          sampling=cfg.bench_sampling)
    raise DomainError(f"{cfg.experiment} has no search problem")


# --- trial runners -----------------------------------------------------------------


def _run_search_trial(cfg: ExperimentConfig, algo: str, seed: int):
    problem = build_problem(cfg)
    common = dict(seed=seed, gap=cfg.gap, stop_at_target=cfg.stop_at_target, trace=cfg.trace)
    cooling = CoolingSchedule(cfg.sa_t0, cfg.sa_alpha) if cfg.sa_t0 else None
    try:
        if algo == "qtz":
            return run_qtz(problem, cfg.base, cfg.budget, incumbent=cfg.qtz_incumbent, **common)
        if algo == "sa":
            return run_sa(problem, cooling, cfg.budget, base=cfg.base, level_rule=cfg.sa_level_rule,
                          **common)
        adiabatic = AdiabaticSchedule(cfg.qia_t_final, cfg.qia_shape, cfg.qia_clamp)
        steps = cfg.budget if cfg.qia_clamp else min(cfg.budget, cfg.qia_t_final)
        return run_qia(problem, cooling, adiabatic, max_iter=steps, base=cfg.base,
                       level_rule=cfg.sa_level_rule, **common)
    except DomainError as exc:
        return _failed(algo, seed, exc)


@dataclass
class SimpleRecord:
    """Trial outcome for experiments that are not derivative-free searches."""

    algorithm: str
    seed: int
    best_f: float
    initial_f: float
    evals: int
    hit_iter: int | None
    status: str
    wall_time: float = 0.0
    trace: dict | None = None
    detail: dict = field(default_factory=dict)


def _failed(algo, seed, exc):
    return SimpleRecord(algo, seed, math.nan, math.nan, 0, None, "error", detail={"error": str(exc)})


def _gradopt_trial(cfg: ExperimentConfig, label: str, seed: int):
    method, _, q = label.partition("+")
    name = cfg.gradopt_function
    fn = make_function(name)
    x_star, f_star = reference_optimum(fn.name, fn.dim)
    rng = np.random.default_rng(seed)
    x0 = fn.lower + (fn.upper - fn.lower) * rng.random(fn.dim)
    ls = LineSearchParams(cfg.gradopt_c1, 0.1 if method == "cg" else cfg.gradopt_c2)
    quant = QuantSchedule(cfg.gradopt_bits_start, cfg.gradopt_bits_max, cfg.base) if q else None
    hit = []

    def watch(old, new, _q):
        if not hit and is_success(new.x, new.f, np.array(x_star), f_star, cfg.gradopt_radius, cfg.gap):
            hit.append(new.k)

    t = time.perf_counter()
    f0 = fn.evaluate(x0)
    res = minimize(fn.evaluate, fn.gradient, x0, method, quant, cfg.budget, cfg.gradopt_gtol, ls,
                   callback=watch)
    ok = is_success(res.x, res.f, np.array(x_star), f_star, cfg.gradopt_radius, cfg.gap)
    return SimpleRecord(label, seed, res.f, f0, res.state.evals, hit[0] if hit else None,
                        "ok" if ok else "miss", time.perf_counter() - t,
                        detail={"iterations": res.iterations, "success": ok,
                                "x": [float(v) for v in res.x]})


@functools.lru_cache(maxsize=8)
def _ls_task(dim, cond, rows, seed):
    return LeastSquaresTask.make(dim, cond, rows, seed)


def _mltoy_trial(cfg: ExperimentConfig, rule: str, seed: int):
    from .gradopt import train

    task = _ls_task(cfg.mltoy_dim, cfg.mltoy_cond, cfg.mltoy_rows, 0)
    enforce = (EnforcementConfig(cfg.mltoy_lr, cfg.enforce_kappa, cfg.enforce_tau0)
               if cfg.enforce_enabled else None)
    t = time.perf_counter()
    res = train(task, rule, cfg.mltoy_lr, cfg.budget, seed, cfg.mltoy_batch or None,
                LogLogPowerSchedule(eta=cfg.mltoy_eta, base=cfg.base), enforce, cfg.mltoy_tol)
    trace = None
    if cfg.trace:
        steps = np.arange(len(res.losses))
        trace = {"tau": steps, "f": res.losses, "f_opt": np.minimum.accumulate(res.losses),
                 "qp_or_T": np.zeros(len(steps)), "accepted": np.ones(len(steps), dtype=bool)}
    return SimpleRecord(rule, seed, float(res.losses[-1]), float(res.losses[0]), cfg.budget,
                        res.steps_to_tol, "ok" if res.steps_to_tol is not None else "miss",
                        time.perf_counter() - t, trace)


def run_trial(cfg: ExperimentConfig, algo: str, seed: int):
    if cfg.experiment in ("tsp", "bench", "washboard"):
        return _run_search_trial(cfg, algo, seed)
    if cfg.experiment == "gradopt":
        return _gradopt_trial(cfg, algo, seed)
    if cfg.experiment == "mltoy":
        return _mltoy_trial(cfg, algo, seed)
    raise DomainError(f"{cfg.experiment} has no trials")


def _labels(cfg):
    if cfg.experiment != "gradopt":
        return list(cfg.algos)
    out = []
    for m in cfg.algos:
        if cfg.gradopt_quantized in ("off", "both"):
            out.append(m)
        if cfg.gradopt_quantized in ("on", "both"):
            out.append(m + "+qtz")
    return out


def worker_count() -> int:
    raw = os.environ.get("QTZOPT_THREADS", "")
    cap = os.cpu_count() or 1
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise DomainError(f"QTZOPT_THREADS must be an integer, got {raw!r}") from None
        if n < 1:
            raise DomainError("QTZOPT_THREADS must be >= 1")
        return min(n, cap)
    return cap


def _job(args):
    cfg, algo, seed = args
    return run_trial(cfg, algo, seed)


def run_trials(cfg: ExperimentConfig, workers: int | None = None) -> list:
    """Every ``(label, seed)`` trial, returned in label-major, seed order."""
    jobs = [(cfg, a, s) for a in _labels(cfg) for s in cfg.seed_list()]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_job, jobs))


# --- reporting -------------------------------------------------------------------


def _num(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    return str(x)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    stats: list
    rows: list
    records: list
    baselines: dict
    out_dir: Path | None = None


def _rows_for(cfg, records, baselines):
    by_algo = {}
    for r in records:
        by_algo.setdefault(r.algorithm, []).append(r)
    means = {}
    stats, rows = [], []
    for algo, recs in by_algo.items():
        good = [r for r in recs if r.status != "error" and math.isfinite(r.best_f)]
        if good:
            means[algo] = statistics.fmean(r.best_f for r in good)
    for algo, recs in by_algo.items():
        good = [r for r in recs if r.status != "error" and math.isfinite(r.best_f)]
        if not good:
            continue
        refs = {k: v for k, v in {**means, **baselines}.items() if k != algo and v != 0}
        st = summarize(good, refs, algo)
        stats.append(st)
        hits = [r.hit_iter for r in good if r.hit_iter is not None]
        init = statistics.fmean(r.initial_f for r in good)
        row = {
            "algorithm": algo, "n_trials": st.n_trials, "single_trial": int(st.single_trial),
            "mean": st.mean, "stddev": st.stddev, "min": min(r.best_f for r in good),
            "max": max(r.best_f for r in good), "initial_mean": init,
            "improvement_pct": improvement_ratio(st.mean, init) if init else math.nan,
            "hit_rate_pct": 100.0 * len(hits) / len(recs),
            "first_hit_mean": statistics.fmean(hits) if hits else None,
            "budget": cfg.budget,
        }
        for name in sorted(refs):
            row[f"ratio_vs_{name}"] = st.ratios[name]
        rows.append(row)
    return stats, rows


def _baselines(cfg):
    if cfg.experiment == "tsp":
        inst = _tsp_instance(cfg.tsp_cities, cfg.tsp_side, cfg.tsp_instance_seed, cfg.tsp_instance_file)
        return {"nn": nearest_neighbor(inst, cfg.tsp_start).cost}
    return {}


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_num(row.get(c)) for c in columns])


def write_trace(path, trace):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        cols = [trace[c] for c in TRACE_COLUMNS]
        for tau, f, fo, q, acc in zip(*cols):
            w.writerow([int(tau), repr(float(f)), repr(float(fo)), repr(float(q)), int(bool(acc))])


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, np.generic):
        return _json_safe(x.item())
    return x


def _detail(r):
    keep = {}
    for k, v in (r.detail or {}).items():
        if isinstance(v, (int, float, str, bool, list)) or v is None:
            keep[k] = v
    return keep


def load_schema() -> dict:
    return json.loads(resources.files("qtzopt").joinpath("schemas", SCHEMA_NAME).read_text())


def run_experiment(cfg: ExperimentConfig, out_dir=None, workers: int | None = None,
                   write: bool = True) -> ExperimentResult:
    """Run, aggregate and (unless ``write`` is false) write the report files."""
    cfg = cfg.resolved()
    t0 = time.perf_counter()
    if cfg.experiment == "theory":
        records = []
        rows = [{"algorithm": name, "inputs": inputs, "value": v, "reference": ref,
                 "abs_error": abs(v - ref)} for name, inputs, v, ref in theory.diagnostics()]
        stats, baselines = [], {}
        columns = ("algorithm", "inputs", "value", "reference", "abs_error")
    else:
        records = run_trials(cfg, workers)
        baselines = _baselines(cfg)
        stats, rows = _rows_for(cfg, records, baselines)
        extra = sorted({k for row in rows for k in row} - set(SUMMARY_COLUMNS))
        columns = SUMMARY_COLUMNS + tuple(extra)
    elapsed = time.perf_counter() - t0
    result = ExperimentResult(cfg, stats, rows, records, baselines)
    if not write:
        return result
    out = Path(out_dir if out_dir is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    result.out_dir = out
    _write_csv(out / "summary.csv", columns, rows)
    if records:
        _write_csv(out / "trials.csv", TRIAL_COLUMNS, [
            {"algorithm": r.algorithm, "seed": r.seed, "best_f": r.best_f, "initial_f": r.initial_f,
             "evals": r.evals, "hit_iter": r.hit_iter, "status": r.status} for r in records])
    for r in records:
        if r.trace is not None:
            write_trace(out / f"trace_{r.algorithm}_{r.seed}.csv", r.trace)
    doc = {
        "schema": SCHEMA_NAME,
        "experiment": cfg.experiment,
        "config": cfg.as_dict(),
        "baselines": baselines,
        "columns": list(columns),
        "summary": rows,
        "trials": [{"algorithm": r.algorithm, "seed": r.seed, "best_f": r.best_f,
                    "initial_f": r.initial_f, "evals": r.evals, "hit_iter": r.hit_iter,
                    "status": r.status, "wall_time": r.wall_time, "detail": _detail(r)}
                   for r in records],
        "wall_time": elapsed,
    }
    (out / "summary.json").write_text(json.dumps(_json_safe(doc), indent=2) + "\n")
    return result
