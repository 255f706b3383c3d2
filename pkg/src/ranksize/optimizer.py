"""Levenberg-Marquardt least squares for the rank-size families.

The objective is the plain sum of squared linear-space residuals
``sum (y - f(x))^2``. Starting values come from an ordinary least-squares
fit of ``ln y`` on each family's log-linear design (:func:`init_guess`),
which is exact for noiseless data.

The damped normal equations are

    (J^T J + mu * diag(J^T J)) delta = J^T r

i.e. Marquardt's scaling, so an amplitude rescaling of the data maps the
whole iteration onto itself. mu is multiplied by ``damping_up`` on a
rejected step and divided by ``damping_down`` on an accepted one; a step
is accepted only if it strictly lowers the SSR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, ModelDomainError, SingularDesignError
from .ingest import RankedSeries, UniversalSeries
from .models import ModelSpec, ParamVector, default_bounds, evaluate, family_info, log_design, log_jacobian

TERMINATIONS = ("ssr-stalled", "gradient-small", "max-iterations", "singular-normal-equations")
CONVERGED_TERMINATIONS = ("ssr-stalled", "gradient-small")

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 200
    damping_init: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 10.0
    tol_ssr_rel: float = 1e-12
    tol_grad: float = 1e-10
    damping_max: float = 1e16

    def __post_init__(self):
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")
        for name in ("damping_init", "tol_ssr_rel", "tol_grad", "damping_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (self.damping_up > 1 and self.damping_down > 1):
            raise ValueError("damping factors must exceed 1")


@dataclass(frozen=True)
class FitResult:
    model: ModelSpec
    params: ParamVector
    chi_square: float
    r_squared: float | None
    dof: int
    dof_conventional: int
    iterations: int
    converged: bool
    termination: str
    n_points: int
    rank_offset: int = 0
    ssr_history: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def predict(self, x):
        """Model value at the model's own variable (local rank or u)."""
        return evaluate(self.model, self.params, x)

    def predict_ranks(self, ranks):
        """Model value at ranks of the original series (before any offset)."""
        local = np.asarray(ranks, dtype=float) - self.rank_offset
        return evaluate(self.model, self.params, self.model.x_from_ranks(local))

    @property
    def chi_square_per_dof(self) -> float:
        if self.dof_conventional > 0:
            return self.chi_square / self.dof_conventional
        return 0.0 if self.chi_square == 0 else math.inf

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "params": self.params.as_dict(),
            "chi_square": self.chi_square,
            "r_squared": self.r_squared,
            "dof": self.dof,
            "dof_conventional": self.dof_conventional,
            "iterations": self.iterations,
            "converged": self.converged,
            "termination": self.termination,
            "n_points": self.n_points,
            "rank_offset": self.rank_offset,
        }


def prepare_data(model, data) -> tuple[ModelSpec, np.ndarray, np.ndarray]:
    """Resolve ``model`` and ``data`` into (spec, x, y).

    ``data`` is a RankedSeries, a UniversalSeries, or a ``(ranks, sizes)``
    pair. A family name is turned into a ModelSpec with N = len(data).
    """
    if isinstance(data, RankedSeries):
        ranks, y, n = data.ranks, np.asarray(data.sizes), data.n
        u = None
    elif isinstance(data, UniversalSeries):
        ranks, y, n = data.ranks().astype(float), np.asarray(data.sizes), data.n
        u = np.asarray(data.u)
    else:
        ranks, y = (np.asarray(a, dtype=float) for a in data)
        if ranks.shape != y.shape or ranks.ndim != 1:
            raise FitError("ranks and sizes must be 1-d arrays of equal length")
        n, u = y.size, None
    if isinstance(model, ModelSpec):
        spec = model
    else:
        spec = ModelSpec(model, n if family_info(model).needs_n else None)
    if spec.variable == "u" and u is not None and spec.n_context == n:
        x = u
    else:
        x = spec.x_from_ranks(ranks)
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise FitError("sizes must be positive and finite")
    return spec, x, np.array(y, dtype=float)


def _init_from_xy(spec: ModelSpec, x: np.ndarray, y: np.ndarray) -> ParamVector:
    if y.size < spec.n_params:
        raise SingularDesignError(
            f"{spec.family} has {spec.n_params} parameters but only {y.size} points"
        )
    design = log_design(spec, x)
    logy = np.log(y)
    if spec.family == "zeta_pareto":
        # intercept absorbs -ln zeta(gamma); only the slope is kept
        design = np.column_stack([np.ones_like(x), design[:, 0]])
    coef, _, rank, _ = np.linalg.lstsq(design, logy, rcond=None)
    if rank < design.shape[1]:
        raise SingularDesignError(f"log-linear design for {spec.family} is rank deficient")
    if spec.family == "zeta_pareto":
        values = [max(coef[1], 1.0 + 1e-3)]  # keep clear of the pole at 1
    else:
        values = [math.exp(coef[0]), *coef[1:]]
    bounds = default_bounds(spec)
    lo = [b[0] for b in bounds]
    hi = [b[1] for b in bounds]
    return ParamVector(spec.param_names, tuple(np.clip(values, lo, hi)), bounds)


def init_guess(model, series) -> ParamVector:
    """Log-space OLS starting point for ``model`` on ``series``."""
    spec, x, y = prepare_data(model, series)
    return _init_from_xy(spec, x, y)


def _r_squared(y: np.ndarray, ssr: float) -> float | None:
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0:
        return None
    return 1.0 - ssr / tss


def _lm(spec: ModelSpec, x: np.ndarray, y: np.ndarray, init: ParamVector,
        options: FitOptions, rank_offset: int = 0) -> FitResult:
    p = init.array
    if not np.array_equal(init.clamp(p), p):
        raise FitError("initial parameters outside bounds")

    def model_values(values):
        return evaluate(spec, init.replace(values), x)

    try:
        yhat = model_values(p)
    except ModelDomainError as exc:
        raise FitError(f"model cannot be evaluated at the initial parameters: {exc}") from exc
    r = y - yhat
    ssr = float(r @ r)
    history = [ssr]
    mu = options.damping_init
    # residuals this small are rounding noise
    ssr_floor = (64 * _EPS) ** 2 * float(y @ y)

    termination = "max-iterations"
    iterations = 0
    if ssr <= ssr_floor:
        termination = "ssr-stalled"
    else:
        for iterations in range(1, options.max_iterations + 1):
            jac = yhat[:, None] * log_jacobian(spec, init.replace(p), x)
            grad = jac.T @ r
            hess = jac.T @ jac
            scale = np.diag(hess).copy()
            positive = scale > 0
            if not positive.any():
                termination = "singular-normal-equations"
                break
            scale[~positive] = scale[positive].max() * _EPS
            cosine = np.max(np.abs(grad) / np.sqrt(scale * ssr))
            if cosine <= options.tol_grad:
                termination = "gradient-small"
                break

            accepted = solved = False
            while mu <= options.damping_max:
                try:
                    step = np.linalg.solve(hess + mu * np.diag(scale), grad)
                except np.linalg.LinAlgError:
                    step = None
                if step is None or not np.all(np.isfinite(step)):
                    mu *= options.damping_up
                    continue
                solved = True
                trial = init.clamp(p + step)
                try:
                    yhat_trial = model_values(trial)
                except ModelDomainError:
                    mu *= options.damping_up
                    continue
                r_trial = y - yhat_trial
                ssr_trial = float(r_trial @ r_trial)
                if ssr_trial < ssr:
                    accepted = True
                    mu = max(mu / options.damping_down, _EPS)
                    break
                mu *= options.damping_up

            if not accepted:
                termination = "ssr-stalled" if solved else "singular-normal-equations"
                break
            improvement = (ssr - ssr_trial) / ssr
            p, yhat, r, ssr = trial, yhat_trial, r_trial, ssr_trial
            history.append(ssr)
            if improvement <= options.tol_ssr_rel or ssr <= ssr_floor:
                termination = "ssr-stalled"
                break

    n = y.size
    return FitResult(
        model=spec,
        params=init.replace(p),
        chi_square=ssr,
        r_squared=_r_squared(y, ssr),
        dof=n - 1,
        dof_conventional=n - spec.n_params,
        iterations=iterations,
        converged=termination in CONVERGED_TERMINATIONS,
        termination=termination,
        n_points=n,
        rank_offset=rank_offset,
        ssr_history=tuple(history),
    )


def lm_fit(model, series, init: ParamVector, options: FitOptions | None = None,
           rank_offset: int = 0) -> FitResult:
    """Levenberg-Marquardt fit of ``model`` to ``series`` from ``init``."""
    spec, x, y = prepare_data(model, series)
    if init.names != spec.param_names:
        raise FitError(f"initial parameters {init.names} do not match {spec.family}")
    return _lm(spec, x, y, init, options or FitOptions(), rank_offset)


def fit(model, series, options: FitOptions | None = None, rank_offset: int = 0) -> FitResult:
    """Initialise by log-space OLS, then refine with :func:`lm_fit`."""
    spec, x, y = prepare_data(model, series)
    init = _init_from_xy(spec, x, y)
    return _lm(spec, x, y, init, options or FitOptions(), rank_offset)
