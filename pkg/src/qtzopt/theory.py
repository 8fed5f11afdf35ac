"""Small numeric checks of the quantum and thermodynamic identities behind quantized search.

None of these drive an optimizer.  They exist so the identities can be
evaluated, fuzzed and printed (``qtzopt theory``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise DomainError(f"expected a finite number, got {x!r}")
    return Fraction(x)


def truncate_base(f, base: int, t: int) -> Fraction:
    """``f`` cut to ``t`` fractional digits in base ``base`` (exact)."""
    f = _as_fraction(f)
    scale = Fraction(base) ** t
    return Fraction(math.floor(f * scale)) / scale


def adiabatic_residual(f, base: int = 2, t: int = 1, exact: bool = False):
    """Truncated value minus the blend ``(1 - b^-t) f + b^-t floor(f)``.

    The blend is the ground-state reading of a ``t``-digit quantized value.  It
    is only an approximation: for ``f = 5.8125``, ``b = 2``, ``t = 2`` the
    truncation is 5.75 and the blend 5.609375.  The residual always satisfies
    ``|res| < b**-t``.  Arithmetic is done in exact rationals; pass
    ``exact=True`` to get the :class:`~fractions.Fraction` itself.
    """
    if int(base) != base or base < 2:
        raise DomainError(f"base must be an integer >= 2, got {base!r}")
    if int(t) != t or t < 1:
        raise DomainError(f"t must be a positive integer, got {t!r}")
    fr = _as_fraction(f)
    if fr < 0:
        raise DomainError(f"f must be nonnegative, got {f!r}")
    w = Fraction(1, base**t)
    res = truncate_base(fr, base, t) - ((1 - w) * fr + w * math.floor(fr))
    return res if exact else float(res)


def sup_recursion(fq: float, qp_inv: float, base: int, steps: int = 60) -> list[float]:
    """Partial suprema: ``fq + qp_inv/(2b)`` then subtract ``qp_inv b^-k / 2`` for ``k = 2..steps``."""
    if int(base) != base or base < 2:
        raise DomainError(f"base must be an integer >= 2, got {base!r}")
    s = fq + 0.5 * qp_inv / base
    out = [s]
    for k in range(2, steps + 1):
        s -= 0.5 * qp_inv * float(base) ** -k
        out.append(s)
    return out


def sup_limit(fq: float, qp_inv: float, base: int = 2, check: bool = True) -> float:
    """Limit of the supremum of the quantized value under repeated refinement.

    Closed form ``fq + qp_inv/(2b) * (b-2)/(b-1)``; it collapses to ``fq`` at
    ``b = 2``.  With ``check`` the 60-step recursion is replayed and must agree
    to 1e-12 (relative to the magnitude of ``fq``).
    """
    if int(base) != base or base < 2:
        raise DomainError(f"base must be an integer >= 2, got {base!r}")
    if not qp_inv > 0:
        raise DomainError(f"qp_inv must be positive, got {qp_inv!r}")
    limit = fq + 0.5 * qp_inv / base * (base - 2) / (base - 1)
    if check:
        approx = sup_recursion(fq, qp_inv, base)[-1]
        if abs(approx - limit) > 1e-12 * max(1.0, abs(limit)):
            raise ArithmeticError(f"recursion {approx!r} does not reach closed form {limit!r}")
    return limit


@dataclass(frozen=True)
class TunnelingParams:
    hbar: float = 1.0
    mass: float = 0.5
    v0: float = 1.0
    e: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0 and self.width > 0):
            raise DomainError("hbar, mass and width must be positive")
        if self.v0 < self.e:
            raise DomainError(f"no barrier: v0={self.v0!r} is below the state energy e={self.e!r}")


def tunneling_factor(p: TunnelingParams, width_inside: bool = True) -> float:
    """Barrier transmission ``exp(-(2/hbar) sqrt(2 m (v0 - e)) D)``.

    ``width_inside=False`` gives the variant with the width as a prefactor,
    ``exp(-(2/hbar) sqrt(2 m (v0 - e))) * D``, which is not bounded by 1.
    """
    kappa = math.sqrt(2.0 * p.mass * (p.v0 - p.e))
    if width_inside:
        return math.exp(-(2.0 / p.hbar) * kappa * p.width)
    return math.exp(-(2.0 / p.hbar) * kappa) * p.width


def two_level_eigs(e1: float, e2: float, delta: float) -> tuple[float, float]:
    """Eigenvalues ``((e1+e2) -/+ sqrt((e1-e2)^2 + delta^2)) / 2`` of ``[[e1, d/2], [d/2, e2]]``, ascending."""
    mean = 0.5 * (e1 + e2)
    half = 0.5 * math.hypot(e1 - e2, delta)
    return mean - half, mean + half


def diagnostics() -> list[tuple[str, str, float, float]]:
    """Rows ``(name, inputs, value, reference)`` printed by the CLI."""
    rows = [
        ("adiabatic_residual", "f=5.8125 b=2 t=2", adiabatic_residual(5.8125, 2, 2), 0.140625),
        ("adiabatic_residual", "f=7 b=3 t=4", adiabatic_residual(7, 3, 4), 0.0),
        ("sup_limit", "fq=1 qp_inv=0.3 b=3", sup_limit(1.0, 0.3, 3), 1.025),
        ("sup_limit", "fq=1 qp_inv=0.3 b=2", sup_limit(1.0, 0.3, 2), 1.0),
        ("tunneling_factor", "hbar=1 m=0.5 v0-e=1 D=1", tunneling_factor(TunnelingParams()), math.exp(-2)),
        ("tunneling_factor", "v0=e", tunneling_factor(TunnelingParams(v0=0.0)), 1.0),
    ]
    lo, hi = two_level_eigs(0.0, 0.0, 2.0)
    rows += [("two_level_eigs[lo]", "e1=0 e2=0 delta=2", lo, -1.0),
             ("two_level_eigs[hi]", "e1=0 e2=0 delta=2", hi, 1.0)]
    return rows
