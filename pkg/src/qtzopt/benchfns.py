"""Continuous benchmark functions, their search boxes and gradients, plus the washboard potential.

Formulas follow the printed benchmark table even where it departs from the
textbook versions:

* ``eggholder`` uses ``977 - (y+47) sin(sqrt|y + 0.5y + 47|) - x sin(sqrt|x-(y+47)|)``;
  the textbook form has ``x/2`` in the first root and no offset.
* ``whitley`` is printed in the Griewank form and is implemented that way.
* ``rosenbrock_modification`` carries the ``74 + ... - 400 exp(...)`` form.

``optimum_point`` records the printed optimal point.  For EggHolder and
Schaffer N.2 that point is not the minimiser of the printed formula; use
:func:`grid_optimum` to obtain the actual target.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError

ACKLEY_A, ACKLEY_B, ACKLEY_C = 20.0, 0.2, 2.0 * math.pi
ROSEN_A, ROSEN_B = 1.0, 100.0


def central_difference(f, x, rel_step=1e-6):
    """Central differences with step ``rel_step * max(1, |x_i|)`` per component."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (xp[i] - xm[i])
    return g


# --- formulas --------------------------------------------------------------


def ackley(x):
    x = np.asarray(x, dtype=float)
    d = x.size
    r = math.sqrt(float(np.dot(x, x)) / d)
    return float(
        -ACKLEY_A * math.exp(-ACKLEY_B * r)
        - math.exp(float(np.cos(ACKLEY_C * x).sum()) / d)
        + ACKLEY_A
        + math.e
    )


def ackley_grad(x):
    x = np.asarray(x, dtype=float)
    d = x.size
    r = math.sqrt(float(np.dot(x, x)) / d)
    g = np.zeros(d)
    if r > 0:
        g += ACKLEY_A * ACKLEY_B * math.exp(-ACKLEY_B * r) * x / (d * r)
    e = math.exp(float(np.cos(ACKLEY_C * x).sum()) / d)
    g += e * ACKLEY_C * np.sin(ACKLEY_C * x) / d
    return g


def whitley(x):
    # printed in the Griewank form
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.size + 1)
    return float(1.0 + np.dot(x, x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))))


def whitley_grad(x):
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.arange(1, x.size + 1))
    c = np.cos(x / s)
    g = x / 2000.0
    for k in range(x.size):
        others = np.prod(np.delete(c, k))
        g[k] += others * math.sin(x[k] / s[k]) / s[k]
    return g


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(ROSEN_B * (x[1:] - x[:-1] ** 2) ** 2 + (ROSEN_A - x[:-1]) ** 2))


def rosenbrock_grad(x):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    t = x[1:] - x[:-1] ** 2
    g[:-1] += -4.0 * ROSEN_B * x[:-1] * t - 2.0 * (ROSEN_A - x[:-1])
    g[1:] += 2.0 * ROSEN_B * t
    return g


def eggholder(x):
    # 977 offset and the |y + 0.5y + 47| argument are as printed
    x1, y = float(x[0]), float(x[1])
    return (
        977.0
        - (y + 47.0) * math.sin(math.sqrt(abs(1.5 * y + 47.0)))
        - x1 * math.sin(math.sqrt(abs(x1 - (y + 47.0))))
    )


def eggholder_grad(x):
    x1, y = float(x[0]), float(x[1])
    u = 1.5 * y + 47.0
    su = math.sqrt(abs(u))
    v = x1 - y - 47.0
    sv = math.sqrt(abs(v))
    # d sqrt|u| / du = sign(u) / (2 sqrt|u|)
    dsu = math.copysign(1.0, u) / (2.0 * su) if su > 0 else 0.0
    dsv = math.copysign(1.0, v) / (2.0 * sv) if sv > 0 else 0.0
    gx = -math.sin(sv) - x1 * math.cos(sv) * dsv
    gy = -math.sin(su) - (y + 47.0) * math.cos(su) * dsu * 1.5 + x1 * math.cos(sv) * dsv
    return np.array([gx, gy])


def xin_she_yang_n4(x):
    x = np.asarray(x, dtype=float)
    a = float(np.sum(np.sin(x) ** 2))
    b = math.exp(-float(np.dot(x, x)))
    c = math.exp(-float(np.sum(np.sin(np.sqrt(np.abs(x))) ** 2)))
    return 2.0 + (a - b) * c


def rosenbrock_modification(x):
    x1, x2 = float(x[0]), float(x[1])
    return (
        74.0
        + 100.0 * (x2 - x1**2) ** 2
        + (1.0 - x1) ** 2
        - 400.0 * math.exp(-((x1 + 1.0) ** 2 + (x2 + 1.0) ** 2) / 0.1)
    )


def rosenbrock_modification_grad(x):
    x1, x2 = float(x[0]), float(x[1])
    e = math.exp(-((x1 + 1.0) ** 2 + (x2 + 1.0) ** 2) / 0.1)
    gx = -400.0 * x1 * (x2 - x1**2) - 2.0 * (1.0 - x1) + 400.0 * e * 2.0 * (x1 + 1.0) / 0.1
    gy = 200.0 * (x2 - x1**2) + 400.0 * e * 2.0 * (x2 + 1.0) / 0.1
    return np.array([gx, gy])


def salomon(x):
    r = math.sqrt(float(np.dot(x, x)))
    return 1.0 - math.cos(2.0 * math.pi * r) + 0.1 * r


def salomon_grad(x):
    x = np.asarray(x, dtype=float)
    r = math.sqrt(float(np.dot(x, x)))
    if r == 0:
        return np.zeros_like(x)
    return (2.0 * math.pi * math.sin(2.0 * math.pi * r) + 0.1) * x / r


def drop_wave(x):
    r2 = float(x[0]) ** 2 + float(x[1]) ** 2
    return 1.0 - (1.0 + math.cos(12.0 * math.sqrt(r2))) / (0.5 * r2 + 2.0)


def drop_wave_grad(x):
    x = np.asarray(x, dtype=float)
    r2 = float(np.dot(x, x))
    r = math.sqrt(r2)
    den = 0.5 * r2 + 2.0
    num = 1.0 + math.cos(12.0 * r)
    # d/dx_i of -num/den
    dnum = -12.0 * math.sin(12.0 * r) * x / r if r > 0 else np.zeros(2)
    dden = x
    return -(dnum * den - num * dden) / den**2


def powell(x):
    x = np.asarray(x, dtype=float)
    p = np.arange(2, x.size + 2)
    return float(np.sum(np.abs(x) ** p))


def powell_grad(x):
    x = np.asarray(x, dtype=float)
    p = np.arange(2, x.size + 2)
    return p * np.sign(x) * np.abs(x) ** (p - 1)


def schaffer_n2(x):
    x1, x2 = float(x[0]), float(x[1])
    return 0.5 + (math.sin(x1**2 - x2**2) ** 2 - 0.5) / (1.0 + 0.001 * (x1**2 + x2**2)) ** 2


def schaffer_n2_grad(x):
    x1, x2 = float(x[0]), float(x[1])
    u = x1**2 - x2**2
    num = math.sin(u) ** 2 - 0.5
    den = 1.0 + 0.001 * (x1**2 + x2**2)
    dnum = 2.0 * math.sin(u) * math.cos(u)
    gx = dnum * 2.0 * x1 / den**2 - num * 2.0 * den * 0.002 * x1 / den**4
    gy = -dnum * 2.0 * x2 / den**2 - num * 2.0 * den * 0.002 * x2 / den**4
    return np.array([gx, gy])


# --- registry ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BenchmarkFn:
    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    func: Callable = field(repr=False)
    grad_fn: Callable | None = field(default=None, repr=False)
    optimum_point: np.ndarray | None = None
    optimum_value: float | None = None

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"{self.name}: expected a point of shape ({self.dim},), got {x.shape}")
        return x

    def in_domain(self, x) -> bool:
        x = self._check(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def evaluate(self, x) -> float:
        return float(self.func(self._check(x)))

    __call__ = evaluate

    @property
    def has_analytic_gradient(self) -> bool:
        return self.grad_fn is not None

    def gradient(self, x) -> np.ndarray:
        x = self._check(x)
        if self.grad_fn is not None:
            return np.asarray(self.grad_fn(x), dtype=float)
        return central_difference(self.func, x)


def _box(lo, hi, dim):
    return np.full(dim, float(lo)), np.full(dim, float(hi))


def make_function(name: str, dim: int | None = None) -> BenchmarkFn:
    """Build a registered benchmark by name; ``dim`` applies to the dimension-free ones."""
    key = name.lower().replace("-", "_").replace(" ", "_").replace(".", "")
    key = _ALIASES.get(key, key)
    if key not in _SPECS:
        raise DomainError(f"unknown benchmark {name!r}; choose from {sorted(_SPECS)}")
    func, grad, default_dim, fixed, lo, hi, opt = _SPECS[key]
    if dim is None:
        dim = default_dim
    elif fixed and dim != default_dim:
        raise DomainError(f"{key} is only defined for dim={default_dim}")
    if isinstance(lo, tuple):
        lower, upper = np.array(lo, dtype=float), np.array(hi, dtype=float)
    else:
        lower, upper = _box(lo, hi, dim)
    point = opt(dim) if opt is not None else None
    value = float(func(point)) if point is not None else None
    return BenchmarkFn(key, dim, lower, upper, func, grad, point, value)


def _ones(d):
    return np.ones(d)


def _zeros(d):
    return np.zeros(d)


# name: (func, grad, default dim, dim fixed?, lower, upper, printed optimum point)
_SPECS = {
    "ackley": (ackley, ackley_grad, 2, False, -32, 32, _zeros),
    "whitley": (whitley, whitley_grad, 2, False, -512, 512, _zeros),
    "rosenbrock": (rosenbrock, rosenbrock_grad, 2, False, -5, 10, _ones),
    "rosenbrock2d": (rosenbrock, rosenbrock_grad, 2, True, -5, 10, _ones),
    "rosenbrock100d": (rosenbrock, rosenbrock_grad, 100, True, -5, 10, _ones),
    "eggholder": (eggholder, eggholder_grad, 2, True, (400, 300), (600, 500),
                  lambda d: np.array([522.16, 413.31])),
    "xin_she_yang_n4": (xin_she_yang_n4, None, 4, False, -5, 5, _zeros),
    "rosenbrock_modification": (rosenbrock_modification, rosenbrock_modification_grad, 2, True,
                                -1.3, 0.6, lambda d: np.array([-0.91, -0.95])),
    "salomon": (salomon, salomon_grad, 2, False, -1, 1, _zeros),
    "drop_wave": (drop_wave, drop_wave_grad, 2, True, -1, 1, _zeros),
    "powell": (powell, powell_grad, 4, False, -1, 1, _zeros),
    "schaffer_n2": (schaffer_n2, schaffer_n2_grad, 2, True, -4, 4, lambda d: np.array([0.0, 1.25])),
}
_ALIASES = {"powell_d4": "powell", "schaffel_n2": "schaffer_n2", "rosenbrock_2d": "rosenbrock2d"}

FUNCTION_NAMES = (
    "ackley", "whitley", "rosenbrock2d", "rosenbrock100d", "eggholder", "xin_she_yang_n4",
    "rosenbrock_modification", "salomon", "drop_wave", "powell", "schaffer_n2",
)


def grid_optimum(fn: BenchmarkFn, points_per_axis: int = 2001):
    """Brute-force minimiser of a 2-D benchmark over its box, polished by Nelder-Mead.

    Returns ``(x_star, f_star)``; the polish is kept only if it stays in the box
    and improves on the best grid node.
    """
    if fn.dim != 2:
        raise DomainError("grid_optimum is only defined for 2-D benchmarks")
    ax = [np.linspace(fn.lower[k], fn.upper[k], points_per_axis) for k in range(2)]
    X, Y = np.meshgrid(ax[0], ax[1], indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    vals = _vectorised(fn, pts)
    k = int(np.argmin(vals))
    best_x, best_f = pts[k], float(vals[k])
    res = minimize(fn.func, best_x, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    if res.fun < best_f and np.all(res.x >= fn.lower) and np.all(res.x <= fn.upper):
        best_x, best_f = res.x, float(res.fun)
    return np.asarray(best_x, dtype=float), best_f


def _vectorised(fn, pts):
    x, y = pts[:, 0], pts[:, 1]
    name = fn.name
    if name == "eggholder":
        return 977 - (y + 47) * np.sin(np.sqrt(np.abs(1.5 * y + 47))) - x * np.sin(np.sqrt(np.abs(x - (y + 47))))
    if name == "schaffer_n2":
        return 0.5 + (np.sin(x**2 - y**2) ** 2 - 0.5) / (1 + 0.001 * (x**2 + y**2)) ** 2
    if name == "rosenbrock_modification":
        return 74 + 100 * (y - x**2) ** 2 + (1 - x) ** 2 - 400 * np.exp(-((x + 1) ** 2 + (y + 1) ** 2) / 0.1)
    return np.array([fn.func(p) for p in pts])


# --- washboard --------------------------------------------------------------


def washboard(alpha: float, x):
    """``0.125 x^2 + 2 sin(alpha x) + 2``; accepts scalars or arrays."""
    return 0.125 * np.square(x) + 2.0 * np.sin(alpha * np.asarray(x)) + 2.0


def washboard_grad(alpha: float, x):
    return 0.25 * np.asarray(x) + 2.0 * alpha * np.cos(alpha * np.asarray(x))


def washboard_min(alpha: float, lo: float = -20.0, hi: float = 20.0, step: float = 1e-4):
    """Global minimiser of the washboard by dense grid, then bisection on the derivative.

    Returns ``(x_star, f_star)``.
    """
    if not (alpha > 0):
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    xs = np.arange(lo, hi + step / 2, step)
    fs = washboard(alpha, xs)
    k = int(np.argmin(fs))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    ga, gb = washboard_grad(alpha, a), washboard_grad(alpha, b)
    x_star = xs[k]
    if ga < 0 < gb:
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid in (a, b):
                break
            if washboard_grad(alpha, mid) < 0:
                a = mid
            else:
                b = mid
        x_star = 0.5 * (a + b)
    return float(x_star), float(washboard(alpha, x_star))
