"""Rank-size model families.

Every family is written as ``amplitude * g(x; exponents)`` except
``zeta_pareto`` whose normalisation is fixed by zeta(gamma). All families
are log-linear in their exponents, which :mod:`ranksize.optimizer` uses for
initialisation.

==================== ========================================== ==============
family               formula                                    parameters
==================== ========================================== ==============
zipf                 a r^-alpha                                 a, alpha
zeta_pareto          r^-gamma / zeta(gamma)                     gamma
exponential          b exp(-beta r)                             b, beta
lavalette2           kappa2 [N r / (N - r + 1)]^-gamma          kappa2, gamma
power_cutoff         c r^-lambda exp(-zeta_rate r)              c, lambda, zeta_rate
lavalette3           kappa3 (N r)^-gamma (N - r + 1)^xi         kappa3, gamma, xi
universal_lavalette  lambda_hat u^-phi (1 - u)^psi, u=r/(N+1)   lambda_hat, phi, psi
==================== ========================================== ==============
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ModelDomainError
from .zeta import zeta, zeta_with_derivative

AMPLITUDE_FLOOR = float(np.finfo(float).tiny)
GAMMA_FLOOR = float(np.nextafter(1.0, 2.0))


@dataclass(frozen=True)
class _Family:
    name: str
    param_names: tuple[str, ...]
    needs_n: bool
    variable: str  # "rank" or "u"
    has_amplitude: bool
    value: Callable
    dlog: Callable  # -> list of arrays, one per parameter


def _zeta_value(p, x, n):
    (g,) = p
    return x ** -g / zeta(g)


def _zeta_dlog(p, x, n):
    (g,) = p
    z, dz = zeta_with_derivative(g)
    return [-np.log(x) - dz / z]


def _ones_like(x, v):
    return np.full_like(x, v, dtype=float)


_FAMILIES = {
    f.name: f
    for f in [
        _Family(
            "zipf", ("a", "alpha"), False, "rank", True,
            lambda p, x, n: p[0] * x ** -p[1],
            lambda p, x, n: [_ones_like(x, 1 / p[0]), -np.log(x)],
        ),
        _Family("zeta_pareto", ("gamma",), False, "rank", False, _zeta_value, _zeta_dlog),
        _Family(
            "exponential", ("b", "beta"), False, "rank", True,
            lambda p, x, n: p[0] * np.exp(-p[1] * x),
            lambda p, x, n: [_ones_like(x, 1 / p[0]), -x],
        ),
        _Family(
            "lavalette2", ("kappa2", "gamma"), True, "rank", True,
            lambda p, x, n: p[0] * (n * x / (n - x + 1)) ** -p[1],
            lambda p, x, n: [_ones_like(x, 1 / p[0]), -np.log(n * x / (n - x + 1))],
        ),
        _Family(
            "power_cutoff", ("c", "lambda", "zeta_rate"), False, "rank", True,
            lambda p, x, n: p[0] * x ** -p[1] * np.exp(-p[2] * x),
            lambda p, x, n: [_ones_like(x, 1 / p[0]), -np.log(x), -x],
        ),
        _Family(
            "lavalette3", ("kappa3", "gamma", "xi"), True, "rank", True,
            lambda p, x, n: p[0] * (n * x) ** -p[1] * (n - x + 1) ** p[2],
            lambda p, x, n: [_ones_like(x, 1 / p[0]), -np.log(n * x), np.log(n - x + 1)],
        ),
        _Family(
            "universal_lavalette", ("lambda_hat", "phi", "psi"), True, "u", True,
            lambda p, x, n: p[0] * x ** -p[1] * (1 - x) ** p[2],
            lambda p, x, n: [_ones_like(x, 1 / p[0]), -np.log(x), np.log1p(-x)],
        ),
    ]
}

FAMILIES = tuple(_FAMILIES)


def family_info(name: str) -> _Family:
    try:
        return _FAMILIES[name]
    except KeyError:
        raise ModelDomainError(
            f"unknown model family {name!r}; valid families: {', '.join(FAMILIES)}"
        ) from None


@dataclass(frozen=True)
class ModelSpec:
    family: str
    n_context: int | None = None

    def __post_init__(self):
        info = family_info(self.family)
        if info.needs_n:
            if self.n_context is None or int(self.n_context) != self.n_context or self.n_context < 1:
                raise ModelDomainError(f"{self.family} needs a positive integer n_context")
            object.__setattr__(self, "n_context", int(self.n_context))
        else:
            object.__setattr__(self, "n_context", None)

    @property
    def param_names(self) -> tuple[str, ...]:
        return _FAMILIES[self.family].param_names

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    @property
    def variable(self) -> str:
        return _FAMILIES[self.family].variable

    @property
    def has_amplitude(self) -> bool:
        return _FAMILIES[self.family].has_amplitude

    def x_from_ranks(self, ranks, n: int | None = None) -> np.ndarray:
        """Map ranks to this family's independent variable (u for universal_lavalette)."""
        ranks = np.asarray(ranks, dtype=float)
        if self.variable == "u":
            n = self.n_context if n is None else n
            return ranks / (n + 1)
        return ranks

    def to_dict(self) -> dict:
        return {"family": self.family, "n_context": self.n_context}


def default_bounds(spec: ModelSpec) -> tuple[tuple[float, float], ...]:
    if spec.family == "zeta_pareto":
        return ((GAMMA_FLOOR, math.inf),)
    return ((AMPLITUDE_FLOOR, math.inf),) + ((-math.inf, math.inf),) * (spec.n_params - 1)


@dataclass(frozen=True)
class ParamVector:
    names: tuple[str, ...]
    values: tuple[float, ...]
    bounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not (len(self.names) == len(self.values) == len(self.bounds)):
            raise ModelDomainError("names, values and bounds must have equal length")
        for name, v, (lo, hi) in zip(self.names, self.values, self.bounds):
            if not math.isfinite(v):
                raise ModelDomainError(f"parameter {name} is not finite: {v}")
            if not lo <= v <= hi:
                raise ModelDomainError(f"parameter {name}={v} outside bounds [{lo}, {hi}]")

    @classmethod
    def for_model(cls, spec: ModelSpec, values: Sequence[float] | Mapping[str, float],
                  bounds=None) -> "ParamVector":
        if isinstance(values, Mapping):
            missing = set(spec.param_names) - set(values)
            extra = set(values) - set(spec.param_names)
            if missing or extra:
                raise ModelDomainError(
                    f"{spec.family} expects parameters {spec.param_names}, got {tuple(values)}"
                )
            values = [values[k] for k in spec.param_names]
        values = tuple(values)
        if len(values) != spec.n_params:
            raise ModelDomainError(
                f"{spec.family} takes {spec.n_params} parameters {spec.param_names}, got {len(values)}"
            )
        return cls(spec.param_names, values, tuple(bounds) if bounds else default_bounds(spec))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]

    def clamp(self, values) -> np.ndarray:
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return np.clip(np.asarray(values, dtype=float), lo, hi)

    def replace(self, values) -> "ParamVector":
        return ParamVector(self.names, tuple(values), self.bounds)


def _as_params(spec: ModelSpec, params) -> ParamVector:
    if isinstance(params, ParamVector):
        if params.names != spec.param_names:
            raise ModelDomainError(f"parameters {params.names} do not belong to {spec.family}")
        return params
    return ParamVector.for_model(spec, params)


def _check_domain(spec: ModelSpec, x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise ModelDomainError("x must be finite")
    if spec.variable == "u":
        if np.any((x <= 0) | (x >= 1)):
            raise ModelDomainError("u must lie in the open interval (0, 1)")
        return
    if np.any(x < 1):
        raise ModelDomainError("rank must be >= 1")
    if spec.n_context is not None and np.any(x > spec.n_context):
        raise ModelDomainError(f"rank must be <= N = {spec.n_context}")


def evaluate(spec: ModelSpec, params, x):
    """Model prediction at ``x`` (rank, or u for universal_lavalette).

    Returns a float for scalar ``x``, else an array. Raises
    ModelDomainError for out-of-domain x or a non-finite result.
    """
    p = _as_params(spec, params).values
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    _check_domain(spec, xa)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        y = _FAMILIES[spec.family].value(p, xa, spec.n_context)
    if not np.all(np.isfinite(y)):
        raise ModelDomainError(f"{spec.family} evaluation overflowed for parameters {p}")
    return float(y[0]) if scalar else y


def log_jacobian(spec: ModelSpec, params, x) -> np.ndarray:
    """Partial derivatives of ln(model) with respect to each parameter.

    Shape (len(x), n_params), or (n_params,) for scalar x.
    """
    p = _as_params(spec, params).values
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    _check_domain(spec, xa)
    cols = _FAMILIES[spec.family].dlog(p, xa, spec.n_context)
    jac = np.column_stack([np.broadcast_to(c, xa.shape) for c in cols])
    return jac[0] if scalar else jac


def log_design(spec: ModelSpec, x) -> np.ndarray:
    """Columns c_i such that ln y = ln(amplitude) + sum_i exponent_i * c_i."""
    info = _FAMILIES[spec.family]
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    _check_domain(spec, xa)
    dummy = [1.0] * spec.n_params
    if spec.family == "zeta_pareto":
        return np.column_stack([-np.log(xa)])
    cols = info.dlog(dummy, xa, spec.n_context)[1:]
    return np.column_stack([np.ones_like(xa)] + cols)


# -- universal form helpers -------------------------------------------------

def _universal(params) -> tuple[float, float, float]:
    if isinstance(params, ParamVector):
        if params.names != _FAMILIES["universal_lavalette"].param_names:
            raise ModelDomainError("expected universal_lavalette parameters")
        return params.values
    if isinstance(params, Mapping):
        return params["lambda_hat"], params["phi"], params["psi"]
    return tuple(params)


def central_log_slope(params, u: float = 0.5) -> float:
    """d ln y / d ln u of the universal form: -phi - psi u/(1-u).

    At u = 1/2 this is -(phi + psi).
    """
    _, phi, psi = _universal(params)
    if not 0 < u < 1:
        raise ModelDomainError("u must lie in (0, 1)")
    return -phi - psi * u / (1 - u)


def relative_slope(params, u: float = 0.5) -> float:
    """(1/y) dy/du of the universal form: -phi/u - psi/(1-u)."""
    _, phi, psi = _universal(params)
    if not 0 < u < 1:
        raise ModelDomainError("u must lie in (0, 1)")
    return -phi / u - psi / (1 - u)


def central_relative_slope(params) -> float:
    """-2 (phi + psi): the relative slope at the centre u = 1/2.

    This is the figure usually quoted as the "central slope"; note it is
    twice the log-log slope returned by :func:`central_log_slope`.
    """
    _, phi, psi = _universal(params)
    return -2.0 * (phi + psi)


def reduce_to_power_law(params, n: int) -> ParamVector:
    """Zipf parameters equal to a universal form with psi == 0 on ranks 1..n."""
    lam, phi, psi = _universal(params)
    if psi != 0:
        raise ModelDomainError(f"reduction to a power law needs psi == 0, got {psi}")
    return ParamVector.for_model(ModelSpec("zipf"), (lam * (n + 1) ** phi, phi))
