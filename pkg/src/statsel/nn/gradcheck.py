"""Finite-difference verification of analytic gradients.

Checks run in float64 with central differences (default h = 1e-3) and
report, per parameter tensor, the worst relative error
|a - n| / max(|a|, |n|, 1e-8) over a random subsample of entries.
Piecewise-linear kinks are moved out of the perturbation neighbourhood
first: relu inputs are pushed away from zero and near-tied max-pool
windows get their leading entry boosted, so the checked function is
smooth wherever the finite differences probe it.
"""

import numpy as np

from ..rng import stream
from .layers import (AvgPool2, Conv5x5, Dense, MaxPool2, Relu, Sequential,
                     _pool_view)
from .losses import huber, softmax_xent


def rel_err(a: float, n: float) -> float:
    """|a - n| scaled by the larger magnitude, floored at 1e-8."""
    return abs(a - n) / max(abs(a), abs(n), 1e-8)


class Offset:
    """Fixed additive shift; backward is the identity."""

    def __init__(self, off: np.ndarray):
        self.off = off

    def params(self):
        return []

    def grads(self):
        return []

    def forward(self, x):
        return x + self.off

    def backward(self, dout):
        return dout


def relu_offset(x: np.ndarray, margin: float) -> np.ndarray:
    """Shift that pushes every entry to at least +-margin, keeping sign."""
    target = np.where(x >= 0, margin, -margin)
    return np.where(np.abs(x) < margin, target - x, 0.0)


def tie_offset(x: np.ndarray, margin: float) -> np.ndarray:
    """Boost each near-tied 2x2 window's leading max by margin."""
    v, (ho, wo) = _pool_view(x)
    idx = v.argmax(axis=-1)
    top = np.take_along_axis(v, idx[..., None], axis=-1)[..., 0]
    rest = v.copy()
    np.put_along_axis(rest, idx[..., None], -np.inf, axis=-1)
    boost = np.where(top - rest.max(axis=-1) < margin, margin, 0.0)
    flat = np.zeros_like(v)
    np.put_along_axis(flat, idx[..., None], boost[..., None], axis=-1)
    b, c, _, _ = x.shape
    off = np.zeros_like(x)
    off[:, :, : 2 * ho, : 2 * wo] = (
        flat.reshape(b, c, ho, wo, 2, 2).transpose(0, 1, 2, 4, 3, 5)
        .reshape(b, c, 2 * ho, 2 * wo)
    )
    return off


def guard_sequential(seq: Sequential, x: np.ndarray, h: float) -> Sequential:
    """Twin of seq (same weight arrays) with kink guards inserted."""
    layers = []
    cur = x
    for layer in seq.layers:
        if isinstance(layer, (Relu, MaxPool2)):
            margin = 10.0 * h * max(1.0, float(np.abs(cur).max()))
            off = (relu_offset(cur, margin) if isinstance(layer, Relu)
                   else tie_offset(cur, margin))
            if np.any(off):
                guard = Offset(off)
                layers.append(guard)
                cur = cur + off
        layers.append(layer)
        cur = layer.forward(cur)
    return Sequential(layers)


def layer_param_triples(seq: Sequential, prefix: str = "") -> list:
    """(name, param, grad) for every parameter tensor, layer order."""
    triples = []
    for i, layer in enumerate(seq.layers):
        ps, gs = layer.params(), layer.grads()
        for j, (p, g) in enumerate(zip(ps, gs)):
            tag = "wb"[j] if j < 2 else str(j)
            triples.append((f"{prefix}{i}:{type(layer).__name__}.{tag}", p, g))
    return triples


def sampled_errors(loss_fn, triples: list, h: float = 1e-3,
                   frac: float = 0.01, seed: int = 0) -> dict:
    """Worst relative error per tensor over a random entry subsample.

    loss_fn recomputes the scalar objective from current array values;
    analytic gradients in the triples must already be populated.
    """
    errs = {}
    for t, (name, p, analytic) in enumerate(triples):
        rng = stream(seed, "gradcheck", t)
        k = min(p.size, max(1, int(np.ceil(frac * p.size))))
        idx = rng.choice(p.size, size=k, replace=False)
        analytic = np.asarray(analytic)
        worst = 0.0
        for j in idx:
            pos = np.unravel_index(j, p.shape)
            old = p[pos]
            p[pos] = old + h
            lp = loss_fn()
            p[pos] = old - h
            lm = loss_fn()
            p[pos] = old
            worst = max(worst, rel_err(analytic[pos], (lp - lm) / (2.0 * h)))
        errs[name] = worst
    return errs


def check_sequential(seq: Sequential, x: np.ndarray, objective,
                     h: float = 1e-3, frac: float = 0.01, seed: int = 0,
                     guard: bool = True) -> dict:
    """Gradient check of every parameter in a layer chain.

    objective(out) must return (scalar loss, dout). Arrays are expected
    in float64; the guard pass freezes relu masks and pool routings in
    the finite-difference neighbourhood.
    """
    net = guard_sequential(seq, x, h) if guard else seq
    out = net.forward(x)
    _, dout = objective(out)
    net.backward(dout)
    triples = [(n, p, g.copy()) for n, p, g in layer_param_triples(net)]

    def loss_fn():
        return objective(net.forward(x))[0]

    return sampled_errors(loss_fn, triples, h=h, frac=frac, seed=seed)


def check_input_gradient(layer, x: np.ndarray, h: float = 1e-3,
                         frac: float = 0.05, seed: int = 0) -> float:
    """Check dx of a single layer against a random projection objective."""
    out = layer.forward(x)
    r = stream(seed, "gradcheck-proj").standard_normal(out.shape)
    dx = layer.backward(r)

    def loss_fn():
        return float((layer.forward(x) * r).sum())

    errs = sampled_errors(loss_fn, [("input", x, dx)], h=h, frac=frac,
                          seed=seed)
    return errs["input"]


def _loss_grad_errors(seed: int, h: float) -> dict:
    """Finite-difference checks of both loss gradients."""
    rng = stream(seed, "gradcheck-losses")
    logits = rng.standard_normal((4, 20))
    labels = rng.integers(0, 20, size=4)
    _, dlogits = softmax_xent(logits, labels)

    def xent_loss():
        return softmax_xent(logits, labels)[0]

    out = sampled_errors(xent_loss, [("softmax-xent", logits, dlogits)],
                         h=h, frac=1.0, seed=seed)

    pred = rng.standard_normal(32)
    target = pred + np.where(rng.random(32) < 0.5, 0.4, 2.0) * rng.choice([-1.0, 1.0], 32)
    _, dpred = huber(pred, target, delta=1.0)

    def huber_loss():
        return huber(pred, target, delta=1.0)[0]

    out.update(sampled_errors(huber_loss, [("huber", pred, dpred)],
                              h=1e-4, frac=1.0, seed=seed))
    return out


def layer_battery(seed: int = 0, h: float = 1e-3) -> dict:
    """Per-layer and per-loss finite-difference checks.

    Returns {check name: worst relative error}; every entry is expected
    below 1e-4, and the purely linear ones far below.
    """
    rng = stream(seed, "gradcheck-battery")
    results = {}

    conv = Sequential([Conv5x5(3, 4, rng, dtype=np.float64)])
    x = rng.standard_normal((2, 3, 8, 8))
    r = stream(seed, "gradcheck-conv").standard_normal((2, 4, 8, 8))
    proj = lambda out: (float((out * r).sum()), r)
    errs = check_sequential(conv, x, proj, h=h, frac=0.05, seed=seed)
    results["conv.w"] = errs["0:Conv5x5.w"]
    results["conv.b"] = errs["0:Conv5x5.b"]
    results["conv.dx"] = check_input_gradient(conv.layers[0], x, h=h, seed=seed)

    dense = Dense(16, 8, rng, dtype=np.float64)
    xd = rng.standard_normal((4, 16))
    rd = stream(seed, "gradcheck-dense").standard_normal((4, 8))
    net = Sequential([dense])
    errs = check_sequential(net, xd, lambda o: (float((o * rd).sum()), rd),
                            h=h, frac=1.0, seed=seed)
    results["dense.w"] = errs["0:Dense.w"]
    results["dense.b"] = errs["0:Dense.b"]
    results["dense.dx"] = check_input_gradient(dense, xd, h=h, frac=1.0, seed=seed)

    margin = 10.0 * h
    xr = rng.standard_normal((3, 2, 6, 6))
    xr += relu_offset(xr, margin)
    results["relu.dx"] = check_input_gradient(Relu(), xr, h=h, seed=seed)

    xm = rng.standard_normal((3, 2, 7, 7))
    xm += tie_offset(xm, margin)
    results["maxpool.dx"] = check_input_gradient(MaxPool2(), xm, h=h, seed=seed)

    xa = rng.standard_normal((3, 2, 7, 7))
    results["avgpool.dx"] = check_input_gradient(AvgPool2(), xa, h=h, seed=seed)

    results.update(_loss_grad_errors(seed, h))
    return results
