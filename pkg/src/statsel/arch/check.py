"""Finite-difference check of the assembled multi-task network.

Builds the requested architecture in float64, inserts the kink guards
from the layer-level checker, and compares analytic gradients of the
combined loss (cross-entropy plus lambda * Huber) against central
differences on a random subsample of each parameter tensor.
"""

import numpy as np

from ..nn import (guard_sequential, huber, layer_param_triples, sampled_errors,
                  softmax_xent)
from ..rng import stream
from .builder import BuildSpec, build


def multitask_check(spec: BuildSpec, seed: int = 0, h: float = 1e-3,
                    frac: float = 0.01, batch: int = 4,
                    lam: float = 1.0, delta: float = 1.0) -> dict:
    """Per-tensor worst relative gradient error for a full network."""
    net = build(spec, seed=seed, dtype=np.float64)
    rng = stream(seed, "mt-gradcheck")
    side, ch = spec.input_side, spec.channels
    x = rng.standard_normal((batch, ch, side, side))
    labels = rng.integers(0, spec.k, size=batch)

    trunk = guard_sequential(net.trunk, x, h)
    mid = trunk.forward(x)
    selector = guard_sequential(net.selector, mid, h)
    estimator = guard_sequential(net.estimator, mid, h)

    theta0 = estimator.forward(mid)[:, 0]
    gap = np.where(rng.random(batch) < 0.5, 0.5, 2.0)
    targets = theta0 - gap * rng.choice(np.array([-1.0, 1.0]), size=batch)

    def total_loss() -> float:
        m = trunk.forward(x)
        sel = softmax_xent(selector.forward(m), labels)[0]
        est = huber(estimator.forward(m)[:, 0], targets, delta)[0]
        return sel + lam * est

    logits = selector.forward(mid)
    theta = estimator.forward(mid)[:, 0]
    _, dlogits = softmax_xent(logits, labels)
    _, dtheta = huber(theta, targets, delta)
    dsel = selector.backward(dlogits)
    dest = estimator.backward((lam * dtheta)[:, None])
    if trunk.layers:
        trunk.backward(dsel + dest)

    triples = (layer_param_triples(trunk, "shared.")
               + layer_param_triples(selector, "selector.")
               + layer_param_triples(estimator, "estimator."))
    triples = [(name, p, g.copy()) for name, p, g in triples]
    return sampled_errors(total_loss, triples, h=h, frac=frac, seed=seed)


def per_layer(errors: dict) -> dict:
    """Collapse per-tensor errors onto their owning layer."""
    out = {}
    for name, err in errors.items():
        layer = name.rsplit(".", 1)[0]
        out[layer] = max(out.get(layer, 0.0), err)
    return out
