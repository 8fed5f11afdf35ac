"""Quantization-based global search, its annealing baselines, and the tooling to compare them."""

from .errors import ConfigError, DomainError, SaturationError
from .quantize import QuantizerState, initial_gamma, quantize, quantize_array, quantization_error
from .schedule import AdiabaticSchedule, CoolingSchedule, LogLogPowerSchedule, beta, ml_qp, temperature
from .tsp import Tour, TspInstance, generate_instance, nearest_neighbor, random_swap
from .benchfns import BenchmarkFn, make_function, washboard, washboard_min
from .metaheur import BoxProblem, RunRecord, TspProblem, run_qia, run_qtz, run_sa, washboard_problem
from .gradopt import (EnforcementConfig, LineSearchParams, QuantizedStepConfig, armijo_wolfe, enforcement,
                      langevin_step, minimize, qsgld_step, qsld_adam_step, quantized_step, step_bfgs,
                      step_cg, step_gd)
from .theory import TunnelingParams, adiabatic_residual, sup_limit, tunneling_factor, two_level_eigs
from .config import ExperimentConfig, load_config
from .harness import TrialStats, run_experiment, summarize

__version__ = "0.1.0"

__all__ = [
    "AdiabaticSchedule",
    "BenchmarkFn",
    "BoxProblem",
    "ConfigError",
    "CoolingSchedule",
    "DomainError",
    "EnforcementConfig",
    "ExperimentConfig",
    "LineSearchParams",
    "LogLogPowerSchedule",
    "QuantizedStepConfig",
    "QuantizerState",
    "RunRecord",
    "SaturationError",
    "Tour",
    "TrialStats",
    "TspInstance",
    "TspProblem",
    "TunnelingParams",
    "adiabatic_residual",
    "armijo_wolfe",
    "beta",
    "enforcement",
    "generate_instance",
    "initial_gamma",
    "langevin_step",
    "load_config",
    "make_function",
    "minimize",
    "ml_qp",
    "nearest_neighbor",
    "qsgld_step",
    "qsld_adam_step",
    "quantization_error",
    "quantize",
    "quantize_array",
    "quantized_step",
    "random_swap",
    "run_experiment",
    "run_qia",
    "run_qtz",
    "run_sa",
    "step_bfgs",
    "step_cg",
    "step_gd",
    "summarize",
    "sup_limit",
    "temperature",
    "tunneling_factor",
    "two_level_eigs",
    "washboard",
    "washboard_min",
    "washboard_problem",
]
