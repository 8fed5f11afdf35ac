"""Experiment configuration: one flat dataclass, read from ``key = value`` text.

Keys are dotted (``sa.alpha = 0.9995``).  Anything not listed in
:data:`KEYS` is rejected with a :class:`~qtzopt.errors.ConfigError` naming it.
Fields left as ``None`` take the per-experiment default from :data:`KIND_DEFAULTS`
when the config is resolved.
"""
from __future__ import annotations

import dataclasses
import math
import typing
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

KINDS = ("tsp", "bench", "washboard", "gradopt", "mltoy", "theory")
ALGOS = {
    "tsp": ("qtz", "sa", "qia"),
    "bench": ("qtz", "sa", "qia"),
    "washboard": ("qtz", "sa", "qia"),
    "gradopt": ("gd", "cg", "bfgs"),
    "mltoy": ("sgd", "qsgld", "adam", "qsld"),
    "theory": (),
}


def _key(name, default=None, help=""):
    return field(default=default, metadata={"key": name, "help": help})


@dataclass
class ExperimentConfig:
    experiment: str = _key("experiment", "tsp", "tsp | bench | washboard | gradopt | mltoy | theory")
    algos: list | None = _key("algos", None, "comma-separated algorithm list")
    trials: int | None = _key("trials", None, "number of seeds when seeds is empty")
    seeds: list | None = _key("seeds", None, "explicit seed list; overrides trials")
    budget: int | None = _key("budget", None, "evaluations (or steps) per trial")
    out: str = _key("out", "results", "output directory")
    trace: bool | None = _key("trace", None, "write trace_<algo>_<seed>.csv files")
    base: int = _key("base", 2, "quantization base")
    gap: float = _key("gap", 2.0**-12, "target gap for the success criterion")
    stop_at_target: bool | None = _key("stop_at_target", None, "stop a trial once it hits the target")

    tsp_cities: int = _key("tsp.cities", 100)
    tsp_side: float = _key("tsp.side", 300.0)
    tsp_instance_seed: int = _key("tsp.instance_seed", 0)
    tsp_instance_file: str = _key("tsp.instance_file", "", "CSV instance; overrides generation")
    tsp_move: str = _key("tsp.move", "swap", "swap | 2opt")
    tsp_start: int = _key("tsp.start", 0, "nearest-neighbour start city")

    bench_function: str = _key("bench.function", "drop_wave")
    bench_dim: int = _key("bench.dim", 0, "0 keeps the function's default dimension")
    bench_shrink: float = _key("bench.shrink", 2.0**-0.5)
    bench_sampling: str = _key("bench.sampling", "local", "local | global")

    washboard_alpha: float = _key("washboard.alpha", 10.0)
    washboard_start: float = _key("washboard.start", -2.3)
    washboard_shrink: float = _key("washboard.shrink", 2.0**-0.5)
    washboard_sampling: str = _key("washboard.sampling", "local", "local | global")

    qtz_incumbent: str = _key("qtz.incumbent", "stored", "stored | requantize")

    sa_t0: float | None = _key("sa.t0", None, "initial temperature; 0 matches it to the start value")
    sa_alpha: float = _key("sa.alpha", 0.9995)
    sa_level_rule: str = _key("sa.level_rule", "temperature", "temperature | accept")

    qia_t_final: int | None = _key("qia.t_final", None, "adiabatic horizon; 0 means the budget")
    qia_shape: str | None = _key("qia.shape", None, "sqrt | linear")
    qia_clamp: bool | None = _key("qia.clamp", None, "keep running past t_final with beta = 0")

    gradopt_function: str = _key("gradopt.function", "rosenbrock2d")
    gradopt_quantized: str = _key("gradopt.quantized", "both", "off | on | both")
    gradopt_bits_start: int = _key("gradopt.bits_start", 5)
    gradopt_bits_max: int = _key("gradopt.bits_max", 17)
    gradopt_c1: float = _key("gradopt.c1", 1e-4)
    gradopt_c2: float = _key("gradopt.c2", 0.9, "curvature constant; CG always uses 0.1")
    gradopt_gtol: float = _key("gradopt.gtol", 1e-8)
    gradopt_radius: float = _key("gradopt.radius", 1e-2, "success radius (inf-norm)")

    mltoy_dim: int = _key("mltoy.dim", 20)
    mltoy_cond: float = _key("mltoy.cond", 100.0)
    mltoy_rows: int = _key("mltoy.rows", 200)
    mltoy_batch: int = _key("mltoy.batch", 20, "0 means full batch")
    mltoy_lr: float = _key("mltoy.lr", 0.01)
    mltoy_tol: float = _key("mltoy.tol", 1e-3)
    mltoy_eta: float = _key("mltoy.eta", 2.0**19, "scale of the resolution schedule")
    enforce_enabled: bool = _key("enforce.enabled", True)
    enforce_kappa: float = _key("enforce.kappa", 0.01)
    enforce_tau0: int = _key("enforce.tau0", 0)

    # --- helpers ---------------------------------------------------------------

    def resolved(self) -> "ExperimentConfig":
        """Copy with kind defaults filled in and every field validated."""
        if self.experiment not in KINDS:
            raise ConfigError("experiment", f"must be one of {KINDS}, got {self.experiment!r}")
        values = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                v = KIND_DEFAULTS[self.experiment].get(f.metadata["key"], None)
            values[f.name] = v
        cfg = ExperimentConfig(**values)
        if cfg.qia_t_final == 0:
            cfg.qia_t_final = cfg.budget
        cfg._validate()
        return cfg

    def _validate(self):
        allowed = ALGOS[self.experiment]
        for a in self.algos or []:
            if a not in allowed:
                raise ConfigError("algos", f"{a!r} is not valid for {self.experiment}; use {allowed}")
        if self.experiment != "theory":
            if not self.seed_list():
                raise ConfigError("seeds", "at least one seed is required")
            if self.budget is None or self.budget < 1:
                raise ConfigError("budget", f"must be >= 1, got {self.budget!r}")
        for s in self.seed_list():
            if not 0 <= s < 2**64:
                raise ConfigError("seeds", f"seed {s} is not a 64-bit unsigned integer")
        choices = {
            "tsp_move": ("swap", "2opt"), "bench_sampling": ("local", "global"),
            "washboard_sampling": ("local", "global"), "qtz_incumbent": ("stored", "requantize"),
            "sa_level_rule": ("temperature", "accept"), "qia_shape": ("sqrt", "linear"),
            "gradopt_quantized": ("off", "on", "both"),
        }
        for name, options in choices.items():
            if getattr(self, name) not in options:
                raise ConfigError(key_of(name), f"must be one of {options}")
        positive = ("tsp_side", "sa_alpha", "gradopt_gtol", "mltoy_lr", "mltoy_eta",
                    "enforce_kappa", "gap", "mltoy_cond")
        for name in positive:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ConfigError(key_of(name), f"must be positive and finite, got {v!r}")
        if not 0 < self.sa_alpha < 1:
            raise ConfigError("sa.alpha", "must lie in (0, 1)")
        if not 0 < self.bench_shrink <= 1 or not 0 < self.washboard_shrink <= 1:
            raise ConfigError("bench.shrink" if not 0 < self.bench_shrink <= 1 else "washboard.shrink",
                              "must lie in (0, 1]")
        if self.tsp_cities < 3:
            raise ConfigError("tsp.cities", "need at least 3 cities")
        if self.base < 2:
            raise ConfigError("base", "must be an integer >= 2")

    def seed_list(self) -> list[int]:
        if self.seeds:
            return [int(s) for s in self.seeds]
        return list(range(self.trials or 0))

    def as_dict(self) -> dict:
        return {f.metadata["key"]: getattr(self, f.name) for f in dataclasses.fields(self)}

    def dumps(self) -> str:
        lines = []
        for key, v in self.as_dict().items():
            if v is None:
                continue
            if isinstance(v, list):
                v = ",".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{key} = {v}")
        return "\n".join(lines) + "\n"


KIND_DEFAULTS = {
    "tsp": {"algos": ["qtz", "sa", "qia"], "trials": 10, "budget": 30_000, "trace": True,
            "stop_at_target": False, "sa.t0": 1000.0, "qia.t_final": 10_000, "qia.shape": "sqrt",
            "qia.clamp": True},
    "washboard": {"algos": ["qtz", "sa", "qia"], "trials": 100, "budget": 100_000, "trace": False,
                  "stop_at_target": True, "sa.t0": 0.0, "qia.t_final": 1000, "qia.shape": "linear",
                  "qia.clamp": False},
    "bench": {"algos": ["qtz", "sa", "qia"], "trials": 20, "budget": 10_000, "trace": False,
              "stop_at_target": True, "sa.t0": 0.0, "qia.t_final": 0, "qia.shape": "linear",
              "qia.clamp": False},
    "gradopt": {"algos": ["gd", "cg", "bfgs"], "trials": 100, "budget": 1000, "trace": False,
                "stop_at_target": False, "sa.t0": 0.0, "qia.t_final": 0, "qia.shape": "linear",
                "qia.clamp": False},
    "mltoy": {"algos": ["sgd", "qsgld"], "trials": 10, "budget": 5000, "trace": False,
              "stop_at_target": False, "sa.t0": 0.0, "qia.t_final": 0, "qia.shape": "linear",
              "qia.clamp": False},
    "theory": {"algos": [], "trials": 1, "budget": 1, "trace": False, "stop_at_target": False,
               "sa.t0": 0.0, "qia.t_final": 0, "qia.shape": "linear", "qia.clamp": False},
}

_FIELDS = {f.metadata["key"]: f for f in dataclasses.fields(ExperimentConfig)}
KEYS = tuple(_FIELDS)


def key_of(field_name: str) -> str:
    for k, f in _FIELDS.items():
        if f.name == field_name:
            return k
    raise KeyError(field_name)


_HINTS = typing.get_type_hints(ExperimentConfig)


def _base_type(hint):
    args = [a for a in typing.get_args(hint) if a is not type(None)]
    return args[0] if args else hint


def parse_value(key: str, text: str):
    """Convert the text of ``key`` to the field's type."""
    if key not in _FIELDS:
        raise ConfigError(key, "unknown configuration key")
    f = _FIELDS[key]
    t = _base_type(_HINTS[f.name])
    text = text.strip()
    try:
        if t is bool:
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(text)
        if t is int:
            return int(text, 0)
        if t is float:
            return float(text)
        if t is list or typing.get_origin(t) is list:
            items = [s.strip() for s in text.split(",") if s.strip()]
            return [int(s, 0) for s in items] if key == "seeds" else items
        return text
    except ValueError:
        raise ConfigError(key, f"cannot parse {text!r} as {getattr(t, '__name__', t)}") from None


def parse_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Apply ``key = value`` lines (``#`` starts a comment) on top of ``base``."""
    cfg = dataclasses.replace(base) if base is not None else ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        setattr(cfg, _FIELDS[key].name if key in _FIELDS else _fail(key), parse_value(key, value))
    return cfg


def _fail(key):
    raise ConfigError(key, "unknown configuration key")


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    return parse_text(Path(path).read_text(), base)


def apply_overrides(cfg: ExperimentConfig, pairs: dict) -> ExperimentConfig:
    """Set values by dotted key; strings are parsed as they would be in a config file."""
    cfg = dataclasses.replace(cfg)
    for key, value in pairs.items():
        if key not in _FIELDS:
            raise ConfigError(key, "unknown configuration key")
        if isinstance(value, str):
            value = parse_value(key, value)
        setattr(cfg, _FIELDS[key].name, value)
    return cfg
