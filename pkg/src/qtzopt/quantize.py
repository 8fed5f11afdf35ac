"""Objective quantization and the resolution state used by the search loops.

A value ``f`` is snapped to the grid of spacing ``1/qp`` by round-half-up,

    f^Q = floor(qp * f + 1/2) / qp,

so that ``f^Q - f`` always lies in ``[-1/(2 qp), 1/(2 qp))``.  The resolution
``qp = gamma * base**power`` only ever grows, one factor of ``base`` at a time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, SaturationError


def _check(f, qp):
    if not (qp > 0) or not math.isfinite(qp):
        raise DomainError(f"quantization parameter must be positive and finite, got {qp!r}")
    if not math.isfinite(f):
        raise DomainError(f"cannot quantize non-finite value {f!r}")


def quantize(f: float, qp: float) -> float:
    """Round ``f`` half-up onto the grid ``k / qp``."""
    _check(f, qp)
    scaled = qp * f
    if not abs(scaled) < 2.0**52:
        # every float this large is an integer, so f already sits on the grid
        return f
    # floor(scaled + 1/2) computed without the rounding of the addition;
    # scaled - floor(scaled) is exact, and negative halves still round up
    r = math.floor(scaled)
    if scaled - r >= 0.5:
        r += 1
    return r / qp


def quantize_array(f, qp: float) -> np.ndarray:
    """Vectorised :func:`quantize`; ``qp`` may be a scalar or broadcastable array."""
    f = np.asarray(f, dtype=float)
    qp = np.asarray(qp, dtype=float)
    if np.any(~(qp > 0)) or not np.all(np.isfinite(qp)):
        raise DomainError("quantization parameter must be positive and finite")
    if not np.all(np.isfinite(f)):
        raise DomainError("cannot quantize non-finite values")
    scaled = qp * f
    with np.errstate(invalid="ignore"):
        r = np.floor(scaled)
        out = (r + (scaled - r >= 0.5)) / qp
    return np.where(np.abs(scaled) < 2.0**52, out, f)


def quantization_error(f: float, qp: float) -> float:
    """Signed error ``quantize(f, qp) - f``, in ``[-1/(2qp), 1/(2qp))``."""
    return quantize(f, qp) - f


def _floor_log(x: float, base: int) -> int:
    """Exact ``floor(log_base(x))`` for ``x >= 1``, corrected against float log drift."""
    k = int(math.floor(math.log(x, base)))
    while base ** (k + 1) <= x:
        k += 1
    while k > 0 and base**k > x:
        k -= 1
    return k


def initial_gamma(f0: float, base: int = 2) -> float:
    """Coarsest starting resolution ``base**-floor(log_base(f0 + 1))``.

    The objective is assumed nonnegative; ``f0 < 0`` raises :class:`DomainError`.
    """
    if not math.isfinite(f0) or f0 < 0:
        raise DomainError(f"initial objective must be finite and nonnegative, got {f0!r}")
    if int(base) != base or base < 2:
        raise DomainError(f"base must be an integer >= 2, got {base!r}")
    return float(base) ** -_floor_log(f0 + 1.0, int(base))


@dataclass(frozen=True)
class QuantizerState:
    """Resolution ``qp = gamma * base**power`` and its step ``1/qp``.

    ``qp`` is recomputed from the triple on every access rather than
    accumulated, so long runs do not drift.
    """

    gamma: float
    base: int = 2
    power: int = 0

    def __post_init__(self):
        if not (self.gamma > 0) or not math.isfinite(self.gamma):
            raise DomainError(f"gamma must be positive and finite, got {self.gamma!r}")
        if int(self.base) != self.base or self.base < 2:
            raise DomainError(f"base must be an integer >= 2, got {self.base!r}")
        if self.power < 0:
            raise DomainError(f"power must be nonnegative, got {self.power!r}")

    @property
    def qp(self) -> float:
        try:
            value = self.gamma * float(self.base) ** self.power
        except OverflowError:
            value = math.inf
        if not math.isfinite(value):
            raise SaturationError(
                f"qp = {self.gamma!r} * {self.base}**{self.power} exceeds the float range"
            )
        return value

    @property
    def step(self) -> float:
        return 1.0 / self.qp

    def quantize(self, f: float) -> float:
        return quantize(f, self.qp)

    def advance(self) -> "QuantizerState":
        nxt = replace(self, power=self.power + 1)
        nxt.qp  # raises SaturationError when the refined grid is not representable
        return nxt


def advance(state: QuantizerState) -> QuantizerState:
    """Refine the grid by one power of the base."""
    return state.advance()
