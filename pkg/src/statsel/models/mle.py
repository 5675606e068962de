"""Numeric maximum likelihood for the candidate models.

A 200-point grid scan locates the best bracket and golden-section
search refines it to 1e-6, which tolerates the multimodal likelihoods
some of the less regular laws produce. Integer parameter spaces use
exhaustive argmax instead.
"""

import math

import numpy as np

from ..errors import DomainError, EstimationFailedError
from .spec import Model

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

GRID_POINTS = 200
TOL = 1e-6


def loglik(model: Model, sample, theta) -> float:
    """Sum of log densities; -inf when any point falls outside support."""
    y = np.asarray(sample, dtype=np.float64)
    return float(np.sum(model._masked_log_density(y, theta)))


def check_support(model: Model, sample) -> np.ndarray:
    """Sample as f64 array; error if any value can never occur under the model."""
    y = np.asarray(sample, dtype=np.float64)
    if y.size == 0:
        raise DomainError("empty sample")
    lo, hi = model.support_union()
    bad = (y < lo) | (y > hi) | ~np.isfinite(y)
    if model.discrete:
        bad = bad | (y != np.floor(y))
    if np.any(bad):
        raise DomainError(f"{model.name}: sample values outside the support")
    return y


def mle(model: Model, sample) -> float:
    """theta maximizing the sample log likelihood over model.space."""
    y = check_support(model, sample)
    space = model.space
    if space.integer:
        grid = space.grid(int(space.hi - space.lo) + 1)
        ll = np.array([model._masked_log_density(y, float(t)).sum() for t in grid])
    else:
        grid = space.grid(GRID_POINTS)
        ll = model._masked_log_density(y[None, :], grid[:, None]).sum(axis=1)
    if not np.any(ll > -np.inf):
        if space.integer:
            raise EstimationFailedError(
                f"{model.name}: likelihood is -inf over the whole parameter space"
            )
        # theta-dependent support can hide the feasible window between
        # grid points; recover it by inverting the support bounds
        lo, hi = _feasible_interval(model, y)
        if lo >= hi or not np.isfinite(loglik(model, y, 0.5 * (lo + hi))):
            raise EstimationFailedError(
                f"{model.name}: likelihood is -inf over the whole parameter space"
            )
        return golden_max(lambda t: model._masked_log_density(y, t).sum(), lo, hi)
    best = int(np.argmax(ll))
    if space.integer:
        return float(grid[best])
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    return golden_max(lambda t: model._masked_log_density(y, t).sum(), lo, hi)


def _feasible_interval(model: Model, y) -> tuple:
    """Largest theta interval whose support covers all of y.

    Assumes both support bounds are nondecreasing in theta, which holds
    for every built-in model with theta-dependent support.
    """
    ymin, ymax = float(np.min(y)), float(np.max(y))
    a, b = model.space.lo, model.space.hi

    def covers_lo(t):
        return model.support(t)[0] <= ymin

    def covers_hi(t):
        return model.support(t)[1] >= ymax

    hi = b if covers_lo(b) else _bisect_edge(covers_lo, a, b)
    lo = a if covers_hi(a) else _bisect_edge(lambda t: not covers_hi(t), a, b)
    pad = 1e-9 * (b - a)
    return lo + pad, hi - pad


def _bisect_edge(pred, a: float, b: float, iters: int = 80) -> float:
    """Boundary between pred true at a and false at b."""
    for _ in range(iters):
        mid = 0.5 * (a + b)
        if pred(mid):
            a = mid
        else:
            b = mid
    return a


def golden_max(f, lo: float, hi: float, tol: float = TOL) -> float:
    """Golden-section maximizer of a unimodal f on [lo, hi]."""
    a, b = float(lo), float(hi)
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    return 0.5 * (a + b)
