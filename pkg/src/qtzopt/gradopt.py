"""Gradient-based optimizers and their quantized counterparts.

Plain methods: gradient descent, Polak-Ribiere+ conjugate gradient and BFGS, all
driven by a weak Wolfe line search.  The quantized variants snap the accepted
step ``alpha * d`` onto the grid of spacing ``1/qbar`` before moving.

Also here: the quantized Langevin/Adam update rules used for learning problems
(``qsgld_step``, ``qsld_adam_step``), their decaying enforcement term, and the
plain Langevin step with temperature ``1/qp``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .quantize import quantize_array
from .schedule import LogLogPowerSchedule


class LineSearchError(DomainError):
    pass


@dataclass(frozen=True)
class LineSearchParams:
    c1: float = 1e-4
    c2: float = 0.9
    max_bracket: int = 60
    step0: float = 1.0
    # try the minimizer of the quadratic through f(0), f'(0), f(step0) before bracketing
    interpolate: bool = False

    def __post_init__(self):
        if not (0 < self.c1 < self.c2 < 1):
            raise DomainError(f"need 0 < c1 < c2 < 1, got c1={self.c1}, c2={self.c2}")


CG_LINE_SEARCH = LineSearchParams(c2=0.1, interpolate=True)


@dataclass
class LineSearchResult:
    step: float
    f: float
    g: np.ndarray
    evals: int
    flagged: bool = False  # True when max_bracket ran out before both conditions held

    def armijo_ok(self, f0, slope0, c1):
        return self.f <= f0 + c1 * self.step * slope0

    def wolfe_ok(self, d, slope0, c2):
        return float(self.g @ d) >= c2 * slope0


def armijo_wolfe(f, grad, x, d, params: LineSearchParams = LineSearchParams(), f0=None, g0=None):
    """Bisection/expansion search for a step meeting Armijo and weak Wolfe conditions.

    Raises :class:`LineSearchError` when ``d`` is not a descent direction.
    If the bracket budget runs out, the largest step known to satisfy Armijo is
    returned with ``flagged=True``.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    f0 = f(x) if f0 is None else f0
    g0 = grad(x) if g0 is None else g0
    slope0 = float(g0 @ d)
    if not slope0 < 0:
        raise LineSearchError(f"direction is not a descent direction (grad . d = {slope0!r} >= 0)")
    lo, hi = 0.0, math.inf
    t = params.step0
    evals = 0
    best = None
    if params.interpolate:
        f1 = f(x + t * d)
        evals += 1
        curv = f1 - f0 - slope0 * t
        if math.isfinite(f1) and curv > 0:
            tq = -slope0 * t * t / (2.0 * curv)
            fq = f(x + tq * d)
            evals += 1
            if fq <= f0 + params.c1 * tq * slope0:
                gq = grad(x + tq * d)
                if float(gq @ d) >= params.c2 * slope0:
                    return LineSearchResult(tq, fq, gq, evals)
    for _ in range(params.max_bracket):
        xt = x + t * d
        ft = f(xt)
        evals += 1
        if not math.isfinite(ft) or ft > f0 + params.c1 * t * slope0:
            hi = t
        else:
            gt = grad(xt)
            best = LineSearchResult(t, ft, gt, evals)
            if float(gt @ d) < params.c2 * slope0:
                lo = t
            else:
                return best
        t = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * lo
        if t == lo or t == hi:
            break
    if best is None:
        # no Armijo point found; fall back to the smallest probed step
        xt = x + t * d
        best = LineSearchResult(t, f(xt), grad(xt), evals + 1)
    best.evals = evals
    best.flagged = True
    return best


# --- plain and quantized steps ------------------------------------------------


@dataclass(frozen=True)
class QuantizedStepConfig:
    """Resolution ``qp`` and step-grid resolution ``qbar`` (default ``sqrt(qp)``)."""

    qp: float
    qbar: float | None = None
    eta: float = 1.0

    def __post_init__(self):
        if not (self.qp > 0):
            raise DomainError(f"qp must be positive, got {self.qp!r}")
        if self.qbar is None:
            object.__setattr__(self, "qbar", math.sqrt(self.qp))
        if not (self.qbar > 0 and self.eta > 0):
            raise DomainError("qbar and eta must be positive")


def quantized_step(x, h, cfg: QuantizedStepConfig):
    """``x + floor(qbar * eta * h + 1/2) / qbar`` component-wise."""
    h = np.asarray(h, dtype=float)
    if not np.all(np.isfinite(h)):
        raise DomainError("quantized_step needs a finite direction")
    return np.asarray(x, dtype=float) + quantize_array(cfg.eta * h, cfg.qbar)


@dataclass
class OptState:
    x: np.ndarray
    f: float
    g: np.ndarray
    k: int = 0
    d: np.ndarray | None = None
    hinv: np.ndarray | None = None
    evals: int = 1
    last_step: float = 0.0
    last_plain: np.ndarray | None = None  # x + step*d before quantization
    flagged: int = 0
    skipped_updates: int = 0


def init_state(f, grad, x0, method="gd") -> OptState:
    x0 = np.asarray(x0, dtype=float)
    g = np.asarray(grad(x0), dtype=float)
    st = OptState(x0, float(f(x0)), g)
    if method == "bfgs":
        st.hinv = np.eye(x0.size)
    return st


def _check_finite(st):
    if not (math.isfinite(st.f) and np.all(np.isfinite(st.g))):
        raise DomainError(f"non-finite objective or gradient at iteration {st.k}")


def _move(f, grad, st, d, ls, quant):
    """Line search along ``d`` then move, quantizing the step if ``quant`` is given."""
    res = armijo_wolfe(f, grad, st.x, d, ls, st.f, st.g)
    plain = st.x + res.step * d
    if quant is None:
        x_new, f_new, g_new, evals = plain, res.f, res.g, res.evals
    else:
        x_new = quantized_step(st.x, res.step * d, quant)
        f_new, g_new, evals = float(f(x_new)), np.asarray(grad(x_new), dtype=float), res.evals + 1
    return x_new, f_new, g_new, evals, res, plain


def step_gd(st: OptState, f, grad, ls=LineSearchParams(), quant=None) -> OptState:
    _check_finite(st)
    d = -st.g
    x, fx, gx, ev, res, plain = _move(f, grad, st, d, ls, quant)
    return replace(st, x=x, f=fx, g=gx, k=st.k + 1, d=d, evals=st.evals + ev,
                   last_step=res.step, last_plain=plain, flagged=st.flagged + res.flagged)


def step_cg(st: OptState, f, grad, ls=CG_LINE_SEARCH, quant=None) -> OptState:
    """Polak-Ribiere+ with a steepest-descent restart whenever ``d`` is not downhill."""
    _check_finite(st)
    d = -st.g if st.d is None else st.d
    if float(st.g @ d) >= 0:
        d = -st.g
    x, fx, gx, ev, res, plain = _move(f, grad, st, d, ls, quant)
    gg = float(st.g @ st.g)
    beta = max(0.0, float(gx @ (gx - st.g)) / gg) if gg > 0 else 0.0
    d_next = -gx + beta * d
    if float(gx @ d_next) >= 0:
        d_next = -gx
    return replace(st, x=x, f=fx, g=gx, k=st.k + 1, d=d_next, evals=st.evals + ev,
                   last_step=res.step, last_plain=plain, flagged=st.flagged + res.flagged)


CURVATURE_GUARD = 1e-10


def step_bfgs(st: OptState, f, grad, ls=LineSearchParams(), quant=None) -> OptState:
    """BFGS on the inverse Hessian; the update is skipped unless ``s.y > 1e-10``."""
    _check_finite(st)
    H = np.eye(st.x.size) if st.hinv is None else st.hinv
    d = -H @ st.g
    if float(st.g @ d) >= 0:
        H = np.eye(st.x.size)
        d = -st.g
    x, fx, gx, ev, res, plain = _move(f, grad, st, d, ls, quant)
    s = x - st.x
    y = gx - st.g
    sy = float(s @ y)
    skipped = st.skipped_updates
    if sy > CURVATURE_GUARD:
        rho = 1.0 / sy
        V = np.eye(s.size) - rho * np.outer(s, y)
        H = V @ H @ V.T + rho * np.outer(s, s)
        H = 0.5 * (H + H.T)
    else:
        skipped += 1
    return replace(st, x=x, f=fx, g=gx, k=st.k + 1, d=d, hinv=H, evals=st.evals + ev,
                   last_step=res.step, last_plain=plain, flagged=st.flagged + res.flagged,
                   skipped_updates=skipped)


STEPPERS = {"gd": step_gd, "cg": step_cg, "bfgs": step_bfgs}


@dataclass
class QuantSchedule:
    """Per-iteration resolution ``qp = base**min(bits_start + k, bits_max)``; ``qbar = sqrt(qp)``."""

    bits_start: int = 5
    bits_max: int = 17
    base: int = 2

    def config(self, k: int) -> QuantizedStepConfig:
        return QuantizedStepConfig(float(self.base) ** min(self.bits_start + k, self.bits_max))

    def saturated(self, k: int) -> bool:
        return self.bits_start + k >= self.bits_max


@dataclass
class MinimizeResult:
    x: np.ndarray
    f: float
    iterations: int
    converged: bool
    history: list = field(repr=False, default_factory=list)
    state: OptState | None = field(repr=False, default=None)


def minimize(f, grad, x0, method="bfgs", quantized: QuantSchedule | None = None, max_iter=1000,
             gtol=1e-8, ls: LineSearchParams | None = None, keep_history=False, callback=None):
    """Run one of ``gd``/``cg``/``bfgs`` until ``|grad|_inf < gtol`` or ``max_iter`` steps."""
    if method not in STEPPERS:
        raise DomainError(f"unknown method {method!r}; choose from {sorted(STEPPERS)}")
    stepper = STEPPERS[method]
    if ls is None:
        ls = CG_LINE_SEARCH if method == "cg" else LineSearchParams()
    st = init_state(f, grad, x0, method)
    hist = [st] if keep_history else []
    converged = bool(np.max(np.abs(st.g)) < gtol)
    still = 0
    while not converged and st.k < max_iter:
        quant = quantized.config(st.k) if quantized is not None else None
        try:
            nxt = stepper(st, f, grad, ls, quant)
        except DomainError:
            break
        if callback is not None:
            callback(st, nxt, quant)
        frozen = quant is not None and quantized.saturated(st.k) and np.array_equal(nxt.x, st.x)
        still = still + 1 if frozen else 0
        st = nxt
        if keep_history:
            hist.append(st)
        converged = bool(np.max(np.abs(st.g)) < gtol)
        if still >= 2:
            # two zero moves in a row at the finest grid: CG has already restarted
            # along -g, and GD/BFGS would repeat the same state, so nothing can change
            break
    return MinimizeResult(st.x, st.f, st.k, converged, hist, st)


def is_success(x, fx, x_star=None, f_star=None, radius=1e-2, gap=2.0**-12) -> bool:
    """Within ``radius`` (inf-norm) of the known optimum, or within ``gap`` of its value."""
    if x_star is not None and np.max(np.abs(np.asarray(x) - x_star)) <= radius:
        return True
    return f_star is not None and fx - f_star <= gap


# --- learning-rule updates -------------------------------------------------------


@dataclass(frozen=True)
class EnforcementConfig:
    lam: float = 0.01
    kappa: float = 0.01
    tau0: int = 0

    def __post_init__(self):
        if not (self.lam > 0 and self.kappa > 0):
            raise DomainError("lam and kappa must be positive")

    def decay(self, tau) -> float:
        z = self.kappa * (tau - self.tau0)
        # exp(-z) / (1 + exp(-z)) evaluated without overflow
        if z >= 0:
            e = math.exp(-z)
            return e / (1.0 + e)
        return 1.0 / (1.0 + math.exp(z))


def enforcement(tau, h, cfg: EnforcementConfig, qp: float):
    """Decaying push along ``h / |h|`` of size ``lam * decay(tau)``, snapped to the ``qp`` grid."""
    h = np.asarray(h, dtype=float)
    norm = float(np.linalg.norm(h))
    if norm == 0 or not math.isfinite(norm):
        return np.zeros_like(h)
    return quantize_array(cfg.lam * cfg.decay(tau) * h / norm, qp)


def _quantized_update(x, h, lam, r, qp):
    return np.asarray(x, dtype=float) + quantize_array(lam * h + r, qp)


def qsgld_step(x, grad, tau, schedule: LogLogPowerSchedule, lam=0.01,
               enforce: EnforcementConfig | None = None):
    """``x + Q^-1 floor(Q (lam h + r) + 1/2)`` with ``h = -grad`` and ``Q = schedule.qp(tau)``."""
    h = -np.asarray(grad, dtype=float)
    qp = schedule.qp(tau)
    r = enforcement(tau, h, enforce, qp) if enforce is not None else 0.0
    return _quantized_update(x, h, lam, r, qp)


@dataclass
class AdamState:
    x: np.ndarray
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def start(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x, np.zeros_like(x), np.zeros_like(x), 0)


def adam_direction(st: AdamState, grad, beta1=0.9, beta2=0.999, eps=1e-8):
    """Update the moments with ``grad``; return ``(new_state, h)`` with ``h = -mhat/(sqrt(vhat)+eps)``."""
    g = np.asarray(grad, dtype=float)
    t = st.t + 1
    m = beta1 * st.m + (1 - beta1) * g
    v = beta2 * st.v + (1 - beta2) * g * g
    mhat = m / (1 - beta1**t)
    vhat = v / (1 - beta2**t)
    return AdamState(st.x, m, v, t), -mhat / (np.sqrt(vhat) + eps)


def qsld_adam_step(st: AdamState, grad, tau, schedule: LogLogPowerSchedule, lam=0.01,
                   enforce: EnforcementConfig | None = None, beta1=0.9, beta2=0.999, eps=1e-8):
    st, h = adam_direction(st, grad, beta1, beta2, eps)
    qp = schedule.qp(tau)
    r = enforcement(tau, h, enforce, qp) if enforce is not None else 0.0
    st.x = _quantized_update(st.x, h, lam, r, qp)
    return st


def langevin_step(x, grad, eta, qp, rng: np.random.Generator):
    """``x - eta grad + sqrt(2 eta / qp) xi`` with ``xi ~ N(0, I)``."""
    x = np.asarray(x, dtype=float)
    xi = rng.standard_normal(x.shape)
    return x - eta * np.asarray(grad, dtype=float) + math.sqrt(2.0 * eta / qp) * xi


# --- synthetic learning task -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class LeastSquaresTask:
    """Consistent least squares ``0.5/n |A x - b|^2`` whose Hessian has a chosen condition number.

    The Hessian ``A^T A / n`` has eigenvalues log-spaced on ``[1, cond]`` and the
    minimum loss is exactly zero.
    """

    A: np.ndarray
    b: np.ndarray
    x_star: np.ndarray

    @classmethod
    def make(cls, dim=20, cond=100.0, n=200, seed=0):
        if n < dim:
            raise DomainError("need at least as many rows as unknowns")
        rng = np.random.default_rng(seed)
        U, _ = np.linalg.qr(rng.standard_normal((n, dim)))
        V, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        eig = np.geomspace(1.0, cond, dim)
        A = U @ np.diag(np.sqrt(n * eig)) @ V.T
        x_star = rng.standard_normal(dim)
        return cls(A, A @ x_star, x_star)

    @property
    def n(self):
        return self.A.shape[0]

    def loss(self, x) -> float:
        r = self.A @ x - self.b
        return 0.5 * float(r @ r) / self.n

    def grad(self, x, rows=None):
        if rows is None:
            return self.A.T @ (self.A @ x - self.b) / self.n
        A = self.A[rows]
        return A.T @ (A @ x - self.b[rows]) / len(rows)


@dataclass
class TrainResult:
    rule: str
    losses: np.ndarray
    x: np.ndarray
    steps_to_tol: int | None


def train(task: LeastSquaresTask, rule="sgd", lr=0.01, steps=5000, seed=0, batch=None,
          schedule: LogLogPowerSchedule | None = None, enforce: EnforcementConfig | None = None,
          tol=1e-3, x0=None, stop_at_tol=False) -> TrainResult:
    """Minibatch training with ``rule`` in ``sgd``, ``qsgld``, ``adam`` or ``qsld``.

    The minibatch stream depends only on ``seed``, so two rules run with the
    same seed see identical batches.  ``batch=None`` uses the full data set.
    """
    if rule not in ("sgd", "qsgld", "adam", "qsld"):
        raise DomainError(f"unknown rule {rule!r}")
    if schedule is None:
        schedule = LogLogPowerSchedule(eta=2.0**19)
    rng = np.random.default_rng(seed)
    x = np.zeros(task.A.shape[1]) if x0 is None else np.asarray(x0, dtype=float).copy()
    adam = AdamState.start(x)
    losses = np.empty(steps + 1)
    losses[0] = task.loss(x)
    hit = 0 if losses[0] < tol else None
    for tau in range(steps):
        rows = None if batch is None else rng.choice(task.n, size=batch, replace=False)
        g = task.grad(x, rows)
        if rule == "sgd":
            x = x - lr * g
        elif rule == "qsgld":
            x = qsgld_step(x, g, tau, schedule, lr, enforce)
        else:
            adam.x = x
            if rule == "adam":
                adam, h = adam_direction(adam, g)
                x = x + lr * h
            else:
                adam = qsld_adam_step(adam, g, tau, schedule, lr, enforce)
                x = adam.x
        losses[tau + 1] = task.loss(x)
        if hit is None and losses[tau + 1] < tol:
            hit = tau + 1
            if stop_at_tol:
                losses = losses[: tau + 2]
                break
    return TrainResult(rule, losses, x, hit)
