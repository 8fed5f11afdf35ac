"""Derivative-free search loops: quantized blind random search, simulated annealing and
quantum-inspired annealing, generic over any :class:`SearchProblem`.

Every loop draws from one ``numpy.random.Generator`` seeded by the caller, so a
given ``(problem, seed)`` pair reproduces the same :class:`RunRecord` bit for bit.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Protocol

import numpy as np

from .benchfns import washboard_min
from .errors import DomainError, SaturationError
from .quantize import QuantizerState, initial_gamma, quantize
from .schedule import AdiabaticSchedule, CoolingSchedule
from .tsp import Tour, TspInstance, nearest_neighbor, random_swap, random_two_opt

TARGET_GAP = 2.0**-12
DEFAULT_SHRINK = 2.0**-0.5  # radius factor per level; two levels halve the box

TRACE_COLUMNS = ("tau", "f", "f_opt", "qp_or_T", "accepted")


class SearchProblem(Protocol):
    """What a search loop needs from a problem.

    ``level`` counts how many times the search has tightened (Qp advances for
    quantized search); problems may use it to shrink their neighbourhood.
    ``mixing`` supplies the reference energy blended in by quantum-inspired
    annealing.  ``target`` is the known optimum value, or ``None``.
    """

    target: float | None

    def initial(self, rng: np.random.Generator) -> Any: ...

    def neighbor(self, state: Any, rng: np.random.Generator, level: int = 0) -> Any: ...

    def evaluate(self, state: Any) -> float: ...

    def mixing(self, state: Any, rng: np.random.Generator) -> float: ...


@dataclass
class RunRecord:
    algorithm: str
    seed: int
    best_state: Any
    best_f: float
    initial_f: float
    evals: int
    wall_time: float
    trace: dict[str, np.ndarray] | None = None
    hit_iter: int | None = None
    status: str = "ok"
    detail: dict = field(default_factory=dict)

    @property
    def improvement(self) -> float:
        """Percent reduction of the objective relative to the initial state."""
        return (self.initial_f - self.best_f) / self.initial_f * 100.0


class _Trace:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.rows: list[tuple] = []

    def add(self, tau, f, f_opt, q, accepted):
        if self.enabled:
            self.rows.append((tau, f, f_opt, q, accepted))

    def arrays(self):
        if not self.enabled:
            return None
        if not self.rows:
            return {c: np.empty(0) for c in TRACE_COLUMNS}
        tau, f, f_opt, q, acc = zip(*self.rows)
        return {
            "tau": np.asarray(tau, dtype=np.int64),
            "f": np.asarray(f, dtype=float),
            "f_opt": np.asarray(f_opt, dtype=float),
            "qp_or_T": np.asarray(q, dtype=float),
            "accepted": np.asarray(acc, dtype=bool),
        }


def _hit(problem, f, gap):
    target = getattr(problem, "target", None)
    return target is not None and gap is not None and f - target <= gap


def run_qtz(
    problem: SearchProblem,
    base: int = 2,
    max_iter: int = 10_000,
    seed: int = 0,
    gap: float | None = TARGET_GAP,
    stop_at_target: bool = True,
    trace: bool = True,
    incumbent: str = "stored",
) -> RunRecord:
    """Blind random search on the quantized objective.

    A candidate is accepted when its quantized value is no larger than the
    incumbent's (ties accept), and every acceptance refines the grid by one
    factor of ``base``.  Candidates are drawn around the incumbent at the
    current refinement level.

    ``incumbent="stored"`` compares against the quantized value kept from the
    moment of acceptance, so the recorded sequence can never rise.  With
    ``"requantize"`` the incumbent's raw value is re-rounded on the current
    grid before each comparison; this avoids stalling when an early coarse
    rounding lands below every reachable value, at the price of monotonicity.
    """
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    if incumbent not in ("stored", "requantize"):
        raise DomainError(f"incumbent must be 'stored' or 'requantize', got {incumbent!r}")
    requantize = incumbent == "requantize"
    rng = np.random.default_rng(seed)
    t_start = time.perf_counter()
    x = problem.initial(rng)
    f0 = problem.evaluate(x)
    if not math.isfinite(f0):
        raise DomainError(f"initial objective is not finite: {f0!r}")
    state = QuantizerState(initial_gamma(f0, base), base, 0)
    qp = state.qp
    fq_opt = quantize(f0, qp)
    x_opt, f_opt = x, f0
    tr = _Trace(trace)
    status, hit_iter, evals = "ok", None, 1
    saturated_at = None
    if _hit(problem, f0, gap):
        hit_iter = 0
    tau = 0
    while tau < max_iter and not (stop_at_target and hit_iter is not None):
        tau += 1
        cand = problem.neighbor(x_opt, rng, state.power)
        f = problem.evaluate(cand)
        evals += 1
        if not math.isfinite(f):
            status = "nonfinite"
            tr.add(tau, f, fq_opt, qp, False)
            break
        fq = quantize(f, qp)
        if requantize:
            fq_opt = quantize(f_opt, qp)
        accepted = fq <= fq_opt
        if accepted:
            x_opt, fq_opt, f_opt = cand, fq, f
            if saturated_at is None:
                try:
                    state = state.advance()
                    qp_next = state.qp
                except SaturationError:
                    saturated_at = tau
                    status = "saturated"
                    qp_next = qp
            else:
                qp_next = qp
        tr.add(tau, f, fq_opt, qp, accepted)
        if accepted:
            qp = qp_next
            if hit_iter is None and _hit(problem, f_opt, gap):
                hit_iter = tau
    return RunRecord(
        "qtz", seed, x_opt, f_opt, f0, evals, time.perf_counter() - t_start, tr.arrays(),
        hit_iter, status,
        {"final_qp": qp, "power": state.power, "gamma": state.gamma, "fq_opt": fq_opt,
         "iterations": tau, "saturated_at": saturated_at},
    )


def _accept_prob(delta, temp):
    if temp <= 0:
        return 0.0
    return math.exp(-abs(delta) / temp)


def matched_cooling(f0: float, alpha: float = 0.9995, base: int = 2) -> CoolingSchedule:
    """Cooling whose initial temperature is half the initial quantization step for ``f0``."""
    return CoolingSchedule(0.5 / initial_gamma(max(f0, 0.0), base), alpha)


def _level(t0, temp, base):
    # resolution level implied by cooling, the analogue of the grid power
    return max(int(math.floor(math.log(t0 / temp) / math.log(base) + 1e-12)), 0)


def run_sa(
    problem: SearchProblem,
    cooling: CoolingSchedule | None = None,
    max_iter: int = 10_000,
    seed: int = 0,
    gap: float | None = TARGET_GAP,
    stop_at_target: bool = True,
    trace: bool = True,
    base: int = 2,
    level_rule: str = "temperature",
) -> RunRecord:
    """Simulated annealing with Metropolis acceptance and exponential cooling.

    The neighbourhood level is ``floor(log_base(T0 / T))``, so the search
    region contracts with temperature the way quantized search contracts with
    its grid.  ``cooling=None`` uses :func:`matched_cooling` on the initial
    objective.
    """
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    rng = np.random.default_rng(seed)
    t_start = time.perf_counter()
    x = problem.initial(rng)
    f_cur = problem.evaluate(x)
    if not math.isfinite(f_cur):
        raise DomainError(f"initial objective is not finite: {f_cur!r}")
    f0 = f_cur
    if cooling is None:
        cooling = matched_cooling(f0, base=base)
    best_x, best_f = x, f_cur
    temp = cooling.t0
    level = 0
    tr = _Trace(trace)
    status, hit_iter, evals = "ok", (0 if _hit(problem, f0, gap) else None), 1
    tau = 0
    while tau < max_iter and not (stop_at_target and hit_iter is not None):
        tau += 1
        cand = problem.neighbor(x, rng, level)
        f = problem.evaluate(cand)
        evals += 1
        r = rng.random()
        if not math.isfinite(f):
            status = "nonfinite"
            tr.add(tau, f, best_f, temp, False)
            break
        accepted = f < f_cur or r < _accept_prob(f - f_cur, temp)
        if accepted:
            x, f_cur = cand, f
            if level_rule == "accept":
                level += 1
            if f < best_f:
                best_x, best_f = cand, f
                if hit_iter is None and _hit(problem, best_f, gap):
                    hit_iter = tau
        tr.add(tau, f, best_f, temp, accepted)
        temp = cooling.temperature(tau)
        if level_rule == "temperature":
            level = _level(cooling.t0, temp, base)
    return RunRecord(
        "sa", seed, best_x, best_f, f0, evals, time.perf_counter() - t_start, tr.arrays(),
        hit_iter, status, {"final_T": temp, "final_f": f_cur, "iterations": tau, "level": level},
    )


def run_qia(
    problem: SearchProblem,
    cooling: CoolingSchedule | None = None,
    adiabatic: AdiabaticSchedule = AdiabaticSchedule(),
    seed: int = 0,
    max_iter: int | None = None,
    gap: float | None = TARGET_GAP,
    stop_at_target: bool = True,
    trace: bool = True,
    base: int = 2,
    level_rule: str = "temperature",
) -> RunRecord:
    """Quantum-inspired annealing on the blended energy ``(1-beta) f + beta H_B``.

    ``H_B`` comes from ``problem.mixing``; ``beta`` falls from 1 to 0 over
    ``adiabatic.t_final`` iterations.  The recorded best value is the raw
    objective of the best accepted state.  Neighbourhood level and
    ``cooling=None`` behave as in :func:`run_sa`.
    """
    if max_iter is None:
        max_iter = adiabatic.t_final
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    if max_iter > adiabatic.t_final and not adiabatic.clamp:
        raise DomainError("max_iter exceeds the adiabatic horizon t_final")
    rng = np.random.default_rng(seed)
    t_start = time.perf_counter()
    x = problem.initial(rng)
    f0 = problem.evaluate(x)
    if not math.isfinite(f0):
        raise DomainError(f"initial objective is not finite: {f0!r}")
    if cooling is None:
        cooling = matched_cooling(f0, base=base)
    h_opt = problem.mixing(x, rng)
    best_x, best_f = x, f0
    temp = cooling.t0
    level = 0
    tr = _Trace(trace)
    status, hit_iter, evals = "ok", (0 if _hit(problem, f0, gap) else None), 1
    tau = 0
    while tau < max_iter and not (stop_at_target and hit_iter is not None):
        tau += 1
        cand = problem.neighbor(x, rng, level)
        h_p = problem.evaluate(cand)
        h_b = problem.mixing(cand, rng)
        evals += 1
        b = adiabatic.beta(tau)
        h = (1.0 - b) * h_p + b * h_b
        r = rng.random()
        if not (math.isfinite(h_p) and math.isfinite(h)):
            status = "nonfinite"
            tr.add(tau, h_p, best_f, temp, False)
            break
        accepted = h < h_opt or r < _accept_prob(h - h_opt, temp)
        if accepted:
            x, h_opt = cand, h
            if level_rule == "accept":
                level += 1
            if h_p < best_f:
                best_x, best_f = cand, h_p
                if hit_iter is None and _hit(problem, best_f, gap):
                    hit_iter = tau
        tr.add(tau, h_p, best_f, temp, accepted)
        temp = cooling.temperature(tau)
        if level_rule == "temperature":
            level = _level(cooling.t0, temp, base)
    return RunRecord(
        "qia", seed, best_x, best_f, f0, evals, time.perf_counter() - t_start, tr.arrays(),
        hit_iter, status, {"final_T": temp, "final_H": h_opt, "final_f": problem.evaluate(x),
         "iterations": tau, "level": level},
    )


def blend(h_p: float, h_b: float, beta_value: float) -> float:
    """The quantum-inspired energy ``(1 - beta) h_p + beta h_b``."""
    return (1.0 - beta_value) * h_p + beta_value * h_b


# --- problems -----------------------------------------------------------------


class TspProblem:
    """TSP over closed tours, started from the nearest-neighbour tour.

    The mixing energy is the cost of a fresh random swap of that initial tour.
    """

    target = None

    def __init__(self, inst: TspInstance, start: int = 0, move: str = "swap"):
        if move not in ("swap", "2opt"):
            raise DomainError(f"unknown TSP move {move!r}")
        self.inst = inst
        self.nn_tour = nearest_neighbor(inst, start)
        self._move = random_swap if move == "swap" else random_two_opt

    def initial(self, rng) -> Tour:
        return self.nn_tour

    def neighbor(self, state: Tour, rng, level: int = 0) -> Tour:
        return self._move(state, rng)

    def evaluate(self, state: Tour) -> float:
        return state.cost

    def mixing(self, state: Tour, rng) -> float:
        return random_swap(self.nn_tour, rng).cost


class BoxProblem:
    """Continuous minimisation over a box.

    Candidates are uniform in the box ``incumbent +/- radius`` clipped to the
    domain, with ``radius = half_width * shrink**level``.  Without a ``start``
    point the initial state is uniform in the domain.  ``mixing_fn`` maps a
    point to its reference energy; by default it is the objective at a random
    neighbour of the initial point.
    """

    def __init__(self, func, lower, upper, start=None, target=None, shrink=DEFAULT_SHRINK,
                 mixing_fn=None, min_radius=0.0, sampling="local"):
        self.func = func
        self.lower = np.atleast_1d(np.asarray(lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if self.lower.shape != self.upper.shape or np.any(self.lower >= self.upper):
            raise DomainError("lower must be strictly below upper component-wise")
        if not 0 < shrink <= 1:
            raise DomainError(f"shrink must lie in (0, 1], got {shrink!r}")
        if sampling not in ("local", "global"):
            raise DomainError(f"sampling must be 'local' or 'global', got {sampling!r}")
        self.sampling = sampling
        self.start = None if start is None else np.atleast_1d(np.asarray(start, dtype=float))
        self.target = target
        self.shrink = shrink
        self.mixing_fn = mixing_fn
        self.min_radius = min_radius
        self.half_width = 0.5 * (self.upper - self.lower)
        self.dim = self.lower.size
        self._x0 = None
        self._radius_cache: dict[int, np.ndarray] = {}

    def initial(self, rng):
        x = self.start.copy() if self.start is not None else rng.uniform(self.lower, self.upper)
        self._x0 = x
        return x

    def radius(self, level: int):
        r = self._radius_cache.get(level)
        if r is None:
            r = np.maximum(self.half_width * self.shrink**level, self.min_radius)
            self._radius_cache[level] = r
        return r

    def neighbor(self, state, rng, level: int = 0):
        if self.sampling == "global":
            return self.lower + (self.upper - self.lower) * rng.random(self.dim)
        r = self.radius(level)
        lo = np.maximum(state - r, self.lower)
        hi = np.minimum(state + r, self.upper)
        return lo + (hi - lo) * rng.random(self.dim)

    def evaluate(self, state) -> float:
        return float(self.func(state))

    def mixing(self, state, rng) -> float:
        if self.mixing_fn is not None:
            return float(self.mixing_fn(state))
        return float(self.func(self.neighbor(self._x0, rng, 0)))


WASHBOARD_START = -2.3


def _washboard_scalar(alpha, x):
    return 0.125 * x * x + 2.0 * math.sin(alpha * x) + 2.0


def washboard_problem(alpha: float, start: float = WASHBOARD_START, shrink: float = DEFAULT_SHRINK,
                      lower: float = -20.0, upper: float = 20.0, min_radius: float = 0.0,
                      sampling: str = "local"):
    """The washboard on ``[lower, upper]`` with its primitive parabola as mixing energy."""
    _, f_star = washboard_min(alpha, lower, upper)
    return BoxProblem(
        lambda x: _washboard_scalar(alpha, float(x[0])), [lower], [upper], start=[start],
        target=f_star,
        shrink=shrink, mixing_fn=lambda x: 0.125 * float(x[0]) ** 2, min_radius=min_radius,
        sampling=sampling,
    )
