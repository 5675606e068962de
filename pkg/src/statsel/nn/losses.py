"""Training losses with analytic input gradients.

Both losses return the batch mean together with the gradient of that
mean, so the backward pass can start directly from the returned array.
"""

import numpy as np

from ..errors import DomainError


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction for overflow safety."""
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_xent(logits: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy -log p_label and its logit gradient.

    The gradient is (softmax - onehot) / B, which sums to zero over
    classes for every sample.
    """
    b, k = logits.shape
    labels = np.asarray(labels)
    if labels.shape != (b,):
        raise DomainError(f"labels must have shape ({b},), got {labels.shape}")
    if labels.min() < 0 or labels.max() >= k:
        raise DomainError(f"labels must lie in [0, {k}), got range "
                          f"[{labels.min()}, {labels.max()}]")
    p = softmax(logits.astype(np.float64))
    rows = np.arange(b)
    loss = float(-np.log(np.maximum(p[rows, labels], 1e-300)).mean())
    grad = p
    grad[rows, labels] -= 1.0
    grad /= b
    return loss, grad.astype(logits.dtype)


def huber(pred: np.ndarray, target: np.ndarray, delta: float = 1.0):
    """Mean Huber loss and its gradient in pred.

    L(d) = d^2/2 for |d| <= delta, else delta*(|d| - delta/2), with
    d = pred - target; the per-sample gradient is clip(d, -delta, delta).
    """
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise DomainError(f"pred shape {pred.shape} != target shape {target.shape}")
    d = pred - target
    ad = np.abs(d)
    quad = ad <= delta
    loss = float(np.where(quad, 0.5 * d * d, delta * (ad - 0.5 * delta)).mean())
    grad = np.clip(d, -delta, delta) / d.size
    return loss, grad
