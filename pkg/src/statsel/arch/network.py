"""Multi-task container: shared trunk plus selector and estimator towers."""

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..nn import Sequential, softmax
from .builder import BuildSpec


@dataclass
class SelectionResult:
    """Class probabilities and raw parameter estimate for one sample."""
    probs: np.ndarray
    theta: float

    @property
    def top_class(self) -> int:
        """Argmax with lowest-index tie-break."""
        return int(np.argmax(self.probs))


@dataclass
class MultiTaskNetwork:
    trunk: Sequential
    selector: Sequential
    estimator: Sequential
    spec: BuildSpec
    layer_table: list

    def params(self) -> list:
        return self.trunk.params() + self.selector.params() + self.estimator.params()

    def grads(self) -> list:
        return self.trunk.grads() + self.selector.grads() + self.estimator.grads()

    def forward(self, x: np.ndarray) -> tuple:
        """(logits (B, K), theta_hat (B,)) for a batch of matrices."""
        mid = self.trunk.forward(x)
        logits = self.selector.forward(mid)
        theta = self.estimator.forward(mid)[:, 0]
        return logits, theta

    def backward(self, dlogits: np.ndarray, dtheta: np.ndarray) -> None:
        """Backpropagate both heads; shared-layer gradients are the sum
        of the two task gradients."""
        dsel = self.selector.backward(dlogits)
        dest = self.estimator.backward(dtheta[:, None])
        if self.trunk.layers:
            self.trunk.backward(dsel + dest)

    def batch_input(self, values: np.ndarray) -> np.ndarray:
        """(count, floats) record block -> (count, C, side, side).

        Values pass through arcsinh, the network's fixed input encoding:
        identity-like near zero, logarithmic in the tails. Raw samples
        from heavy-tailed candidates reach 1e18, which saturates f32
        arithmetic and makes gradient magnitude track input magnitude;
        the compression keeps both bounded while staying monotone, so
        no sample information is lost.
        """
        side, ch = self.spec.input_side, self.spec.channels
        want = ch * side * side
        if values.ndim != 2 or values.shape[1] != want:
            raise ShapeError(
                f"network expects (B, {want}) values, got {values.shape}"
            )
        return np.arcsinh(values).reshape(values.shape[0], ch, side, side)

    def predict(self, matrix: np.ndarray) -> SelectionResult:
        """Pure function of (weights, one sample matrix)."""
        side, ch = self.spec.input_side, self.spec.channels
        ok = (ch, side, side) if ch > 1 or matrix.ndim == 3 else (side, side)
        if matrix.shape != ok:
            raise ShapeError(
                f"expected matrix of shape ({ch}, {side}, {side}), "
                f"got {matrix.shape}"
            )
        x = np.arcsinh(matrix).reshape(1, ch, side, side).astype(np.float32)
        logits, theta = self.forward(x)
        return SelectionResult(probs=softmax(logits.astype(np.float64))[0],
                               theta=float(theta[0]))


def predict_batch(net: MultiTaskNetwork, values: np.ndarray,
                  batch: int = 512) -> tuple:
    """(probs (count, K), theta (count,)) over a record block, chunked."""
    x = net.batch_input(values)
    probs = np.empty((x.shape[0], net.spec.k), dtype=np.float64)
    theta = np.empty(x.shape[0], dtype=np.float64)
    for lo in range(0, x.shape[0], batch):
        hi = min(lo + batch, x.shape[0])
        logits, th = net.forward(np.asarray(x[lo:hi], dtype=np.float32))
        probs[lo:hi] = softmax(logits.astype(np.float64))
        theta[lo:hi] = th
    return probs, theta
