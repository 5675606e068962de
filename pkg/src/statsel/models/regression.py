"""Generators for the seven-model regression selector task.

Each law draws x ~ Uniform(0,1) i.i.d. and y from its conditional law
at eta = b0 + b1 x:

  linear             y = eta + Normal(0, 1)
  poisson            y ~ Poisson(exp(eta))
  logistic           y ~ Bernoulli(expit(eta))
  negative-binomial  y ~ NB(mean exp(eta), dispersion r=3)
  lognormal          log y = eta + Normal(0, 0.5)
  loglinear          y = exp(eta) + Normal(0, 1)
  multinomial        y in {1,2,3}, softmax over class scores (0, eta, 2 eta)
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from ..errors import DomainError, UnknownModelError
from ..rng import stream


@dataclass(frozen=True)
class RegressionModelSpec:
    """One conditional law with coefficient ranges and fixed nuisances."""

    model_id: int
    name: str
    nuisance: dict = field(default_factory=dict)
    b0_range: tuple = (-2.0, 2.0)
    b1_range: tuple = (-2.0, 2.0)

    def contains(self, beta) -> bool:
        b0, b1 = float(beta[0]), float(beta[1])
        return (
            self.b0_range[0] <= b0 <= self.b0_range[1]
            and self.b1_range[0] <= b1 <= self.b1_range[1]
        )


def _y_linear(spec, eta, rng):
    return eta + spec.nuisance["sd"] * rng.standard_normal(eta.shape)


def _y_poisson(spec, eta, rng):
    return rng.poisson(np.exp(eta)).astype(np.float64)


def _y_logistic(spec, eta, rng):
    return (rng.random(eta.shape) < special.expit(eta)).astype(np.float64)


def _y_negative_binomial(spec, eta, rng):
    r = spec.nuisance["r"]
    mu = np.exp(eta)
    return rng.negative_binomial(r, r / (r + mu)).astype(np.float64)


def _y_lognormal(spec, eta, rng):
    return np.exp(eta + spec.nuisance["sdlog"] * rng.standard_normal(eta.shape))


def _y_loglinear(spec, eta, rng):
    return np.exp(eta) + spec.nuisance["sd"] * rng.standard_normal(eta.shape)


def _y_multinomial(spec, eta, rng):
    scores = np.stack([np.zeros_like(eta), eta, 2.0 * eta], axis=-1)
    scores -= scores.max(axis=-1, keepdims=True)
    p = np.exp(scores)
    p /= p.sum(axis=-1, keepdims=True)
    u = rng.random(eta.shape)[..., None]
    return (np.cumsum(p, axis=-1) < u).sum(axis=-1) + 1.0


_LAWS = {
    "linear": _y_linear,
    "poisson": _y_poisson,
    "logistic": _y_logistic,
    "negative-binomial": _y_negative_binomial,
    "lognormal": _y_lognormal,
    "loglinear": _y_loglinear,
    "multinomial": _y_multinomial,
}

REGRESSION_MODELS = (
    RegressionModelSpec(1, "linear", {"sd": 1.0}),
    RegressionModelSpec(2, "poisson"),
    RegressionModelSpec(3, "logistic"),
    RegressionModelSpec(4, "negative-binomial", {"r": 3.0}),
    RegressionModelSpec(5, "lognormal", {"sdlog": 0.5}),
    RegressionModelSpec(6, "loglinear", {"sd": 1.0}),
    RegressionModelSpec(7, "multinomial"),
)


def get_regression_model(ref) -> RegressionModelSpec:
    """Spec by 1-based id or name."""
    for spec in REGRESSION_MODELS:
        if spec.model_id == ref or spec.name == ref:
            return spec
    raise UnknownModelError(f"unknown regression model {ref!r}")


def coefficient_grid(spec: RegressionModelSpec, n: int) -> np.ndarray:
    """(n*n, 2) array of evenly spaced (b0, b1) pairs, row-major in b0."""
    b0 = np.linspace(*spec.b0_range, n)
    b1 = np.linspace(*spec.b1_range, n)
    g0, g1 = np.meshgrid(b0, b1, indexing="ij")
    return np.column_stack([g0.ravel(), g1.ravel()])


def sample_regression(spec: RegressionModelSpec, beta, n: int, seed=None, rng=None):
    """n pairs (x, y); deterministic given (spec, beta, n, seed)."""
    if not spec.contains(beta):
        raise DomainError(f"{spec.name}: coefficients {beta!r} outside declared ranges")
    if n < 1:
        raise DomainError("sample size must be >= 1")
    if rng is None:
        rng = stream(0 if seed is None else seed)
    x = rng.random(n)
    eta = float(beta[0]) + float(beta[1]) * x
    y = _LAWS[spec.name](spec, eta, rng)
    return x, y
