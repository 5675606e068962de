"""From-scratch CNN layers on NCHW numpy arrays.

Convolutions are 5x5 stride-1 with SAME padding, lowered to a single
GEMM through an im2col buffer; pooling windows are 2x2 stride-2 with
right/bottom truncation on odd inputs. Weights live in the dtype the
layer is built with (f32 for training, f64 for gradient checking).
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeError

KERNEL = 5
PAD = KERNEL // 2


class Layer:
    """Stateless-by-default node: params/grads are parallel lists."""

    def params(self) -> list:
        return []

    def grads(self) -> list:
        return []

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def he_init(rng: np.random.Generator, shape: tuple, fan_in: int, dtype) -> np.ndarray:
    """Zero-mean Gaussian with sd sqrt(2/fan_in)."""
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(dtype)


class Conv5x5(Layer):
    """5x5 same-padding convolution, weights (out_c, in_c, 5, 5)."""

    def __init__(self, in_c: int, out_c: int, rng: np.random.Generator,
                 dtype=np.float32):
        self.in_c = in_c
        self.out_c = out_c
        self.w = he_init(rng, (out_c, in_c, KERNEL, KERNEL), in_c * KERNEL * KERNEL, dtype)
        self.b = np.zeros(out_c, dtype=dtype)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._col = None
        self._shape = None

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.dw, self.db]

    def forward(self, x):
        if x.ndim != 4 or x.shape[1] != self.in_c:
            raise ShapeError(
                f"conv expects (B, {self.in_c}, H, W), got {x.shape}"
            )
        b, c, h, w = x.shape
        pad = np.zeros((b, c, h + 2 * PAD, w + 2 * PAD), dtype=self.w.dtype)
        pad[:, :, PAD:PAD + h, PAD:PAD + w] = x
        win = sliding_window_view(pad, (KERNEL, KERNEL), axis=(2, 3))
        col = win.transpose(0, 2, 3, 1, 4, 5).reshape(
            b * h * w, c * KERNEL * KERNEL
        )
        out = col @ self.w.reshape(self.out_c, -1).T
        out += self.b
        self._col = col
        self._shape = (b, c, h, w)
        return out.reshape(b, h, w, self.out_c).transpose(0, 3, 1, 2)

    def backward(self, dout):
        b, c, h, w = self._shape
        dmat = np.ascontiguousarray(dout.transpose(0, 2, 3, 1)).reshape(
            b * h * w, self.out_c
        )
        self.dw[:] = (dmat.T @ self._col).reshape(self.w.shape)
        self.db[:] = dmat.sum(axis=0)
        dcol = (dmat @ self.w.reshape(self.out_c, -1)).reshape(
            b, h, w, c, KERNEL, KERNEL
        )
        dpad = np.zeros((b, h + 2 * PAD, w + 2 * PAD, c), dtype=self.w.dtype)
        for ki in range(KERNEL):
            for kj in range(KERNEL):
                dpad[:, ki:ki + h, kj:kj + w, :] += dcol[:, :, :, :, ki, kj]
        self._col = None
        return dpad[:, PAD:PAD + h, PAD:PAD + w, :].transpose(0, 3, 1, 2)


def _pool_view(x):
    """(B, C, Ho, Wo, 4) window view, truncating odd right/bottom edges."""
    b, c, h, w = x.shape
    ho, wo = h // 2, w // 2
    if ho < 1 or wo < 1:
        raise ShapeError(f"pooling needs spatial dims >= 2, got {x.shape}")
    v = x[:, :, : 2 * ho, : 2 * wo].reshape(b, c, ho, 2, wo, 2)
    return v.transpose(0, 1, 2, 4, 3, 5).reshape(b, c, ho, wo, 4), (ho, wo)


class MaxPool2(Layer):
    """2x2 stride-2 max; gradient routes to the first maximum in
    window scan order (row-major within the window)."""

    def __init__(self):
        self._idx = None
        self._shape = None

    def forward(self, x):
        v, (ho, wo) = _pool_view(x)
        self._idx = v.argmax(axis=-1)
        self._shape = x.shape
        return np.take_along_axis(v, self._idx[..., None], axis=-1)[..., 0]

    def backward(self, dout):
        b, c, h, w = self._shape
        ho, wo = h // 2, w // 2
        flat = np.zeros((b, c, ho, wo, 4), dtype=dout.dtype)
        np.put_along_axis(flat, self._idx[..., None], dout[..., None], axis=-1)
        dx = np.zeros(self._shape, dtype=dout.dtype)
        dx[:, :, : 2 * ho, : 2 * wo] = (
            flat.reshape(b, c, ho, wo, 2, 2).transpose(0, 1, 2, 4, 3, 5)
            .reshape(b, c, 2 * ho, 2 * wo)
        )
        return dx


class AvgPool2(Layer):
    """2x2 stride-2 mean; gradient spreads equally over the window."""

    def __init__(self):
        self._shape = None

    def forward(self, x):
        v, _ = _pool_view(x)
        self._shape = x.shape
        return v.mean(axis=-1)

    def backward(self, dout):
        b, c, h, w = self._shape
        ho, wo = h // 2, w // 2
        flat = np.broadcast_to((dout / 4.0)[..., None], (b, c, ho, wo, 4))
        dx = np.zeros(self._shape, dtype=dout.dtype)
        dx[:, :, : 2 * ho, : 2 * wo] = (
            flat.reshape(b, c, ho, wo, 2, 2).transpose(0, 1, 2, 4, 3, 5)
            .reshape(b, c, 2 * ho, 2 * wo)
        )
        return dx


class Relu(Layer):
    """max(0, x); subgradient at 0 is 0."""

    def __init__(self):
        self._mask = None

    def forward(self, x):
        self._mask = x > 0
        return np.where(self._mask, x, 0)

    def backward(self, dout):
        return np.where(self._mask, dout, 0)


class Flatten(Layer):
    """(B, C, H, W) -> (B, C*H*W)."""

    def __init__(self):
        self._shape = None

    def forward(self, x):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout):
        return dout.reshape(self._shape)


class Dense(Layer):
    """Affine map, weights (in_f, out_f)."""

    def __init__(self, in_f: int, out_f: int, rng: np.random.Generator,
                 dtype=np.float32):
        self.in_f = in_f
        self.out_f = out_f
        self.w = he_init(rng, (in_f, out_f), in_f, dtype)
        self.b = np.zeros(out_f, dtype=dtype)
        self.dw = np.zeros_like(self.w)
        self.db = np.zeros_like(self.b)
        self._x = None

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.dw, self.db]

    def forward(self, x):
        if x.ndim != 2 or x.shape[1] != self.in_f:
            raise ShapeError(f"dense expects (B, {self.in_f}), got {x.shape}")
        self._x = x
        return x @ self.w + self.b

    def backward(self, dout):
        self.dw[:] = self._x.T @ dout
        self.db[:] = dout.sum(axis=0)
        self._x = None
        return dout @ self.w.T


class Sequential(Layer):
    """Ordered layer chain sharing the Layer protocol."""

    def __init__(self, layers: list):
        self.layers = list(layers)

    def params(self):
        return [p for layer in self.layers for p in layer.params()]

    def grads(self):
        return [g for layer in self.layers for g in layer.grads()]

    def forward(self, x):
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, dout):
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout
