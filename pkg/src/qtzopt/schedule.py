"""Iteration-indexed control laws: cooling, adiabatic mixing, and the ML resolution schedule.

All schedules are pure functions of the iteration index, so a run can be
replayed exactly from its seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class CoolingSchedule:
    """Exponential cooling ``T(tau) = t0 * alpha**tau``."""

    t0: float = 1000.0
    alpha: float = 0.9995

    def __post_init__(self):
        if not (self.t0 > 0):
            raise DomainError(f"t0 must be positive, got {self.t0!r}")
        if not (0 < self.alpha < 1):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    def temperature(self, tau: int) -> float:
        return self.t0 * self.alpha**tau


@dataclass(frozen=True)
class AdiabaticSchedule:
    """Mixing weight ``beta`` that falls from 1 at ``tau=0`` to 0 at ``tau=t_final``.

    ``shape="sqrt"`` gives ``1 - sqrt(tau/t_final)`` (the TSP setting);
    ``shape="linear"`` gives ``1 - tau/t_final``.  With ``clamp=True`` indices
    past ``t_final`` return 0 instead of raising.
    """

    t_final: int = 10_000
    shape: str = "sqrt"
    clamp: bool = False

    def __post_init__(self):
        if self.t_final < 1:
            raise DomainError(f"t_final must be a positive integer, got {self.t_final!r}")
        if self.shape not in ("sqrt", "linear"):
            raise DomainError(f"unknown adiabatic shape {self.shape!r}")

    def beta(self, tau: int) -> float:
        if tau < 0 or tau > self.t_final:
            if self.clamp and tau > self.t_final:
                return 0.0
            raise DomainError(f"tau={tau} outside [0, {self.t_final}]")
        s = tau / self.t_final
        return 1.0 - (math.sqrt(s) if self.shape == "sqrt" else s)


@dataclass(frozen=True)
class LogLogPowerSchedule:
    """Resolution ``qp(tau) = eta * base**floor(log_base(log(tau + 2)))``.

    The inner logarithm is natural by default; ``inner_log_base`` overrides it.
    ``batches_per_epoch`` only converts iteration counts to epochs for reporting.
    """

    eta: float = 1.0
    base: int = 2
    batches_per_epoch: int = 1
    inner_log_base: float = math.e

    def __post_init__(self):
        if not (self.eta > 0):
            raise DomainError(f"eta must be positive, got {self.eta!r}")
        if int(self.base) != self.base or self.base < 2:
            raise DomainError(f"base must be an integer >= 2, got {self.base!r}")
        if self.batches_per_epoch < 1:
            raise DomainError("batches_per_epoch must be >= 1")

    def power(self, tau: int) -> int:
        inner = math.log(tau + 2) / math.log(self.inner_log_base)
        b = self.base
        p = math.floor(math.log(inner) / math.log(b))
        # log/log in floating point can land one off at exact powers; repair it.
        while float(b) ** (p + 1) <= inner:
            p += 1
        while float(b) ** p > inner:
            p -= 1
        return p

    def qp(self, tau: int) -> float:
        return self.eta * float(self.base) ** self.power(tau)

    def epoch(self, tau: int) -> float:
        return tau / self.batches_per_epoch


def temperature(s: CoolingSchedule, tau: int) -> float:
    return s.temperature(tau)


def beta(s: AdiabaticSchedule, tau: int) -> float:
    return s.beta(tau)


def ml_qp(s: LogLogPowerSchedule, tau: int) -> float:
    return s.qp(tau)
