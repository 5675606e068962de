"""Stochastic gradient descent with classical momentum.

v <- mu * v + g ; w <- w - lr * v. Velocities live in the optimizer and
are created lazily as zeros, so the first step moves by lr * g. An
optional global-norm clip rescales the whole gradient when its L2 norm
exceeds clip_norm, which keeps occasional extreme minibatches (heavy
tailed samples reach 1e18 in raw value) from destroying the weights.
"""

import math

import numpy as np

from ..errors import ConfigError, TrainingDivergedError


class SGD:
    def __init__(self, params: list, grads: list, lr: float = 0.01,
                 momentum: float = 0.9, clip_norm: float = 0.0):
        if lr <= 0:
            raise ConfigError(f"lr must be positive, got {lr}")
        if not 0 <= momentum < 1:
            raise ConfigError(f"momentum must lie in [0, 1), got {momentum}")
        if clip_norm < 0:
            raise ConfigError(f"clip_norm must be >= 0, got {clip_norm}")
        if len(params) != len(grads):
            raise ConfigError(f"{len(params)} params vs {len(grads)} grads")
        self.params = params
        self.grads = grads
        self.lr = lr
        self.momentum = momentum
        self.clip_norm = clip_norm
        self.velocity = [np.zeros_like(p) for p in params]

    def step(self, iteration: int = 0):
        """Apply one update; fails fast on non-finite gradients."""
        if self.clip_norm > 0:
            sumsq = 0.0
            for g in self.grads:
                sumsq += float(np.sum(np.square(g, dtype=np.float64)))
            if sumsq > self.clip_norm * self.clip_norm:
                scale = self.clip_norm / math.sqrt(sumsq)
                for g in self.grads:
                    g *= scale
        for g in self.grads:
            if not np.all(np.isfinite(g)):
                raise TrainingDivergedError(
                    iteration, f"non-finite gradient at iteration {iteration}"
                )
        for p, g, v in zip(self.params, self.grads, self.velocity):
            v *= self.momentum
            v += g
            p -= self.lr * v
