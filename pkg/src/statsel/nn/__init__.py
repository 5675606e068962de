"""Minimal CNN engine: layers, losses, SGD, and gradient checking."""

from .checkpoint import bytes_to_weights, weights_to_bytes
from .gradcheck import (check_input_gradient, check_sequential, guard_sequential,
                        layer_battery, layer_param_triples, rel_err,
                        relu_offset, sampled_errors, tie_offset)
from .layers import (AvgPool2, Conv5x5, Dense, Flatten, Layer, MaxPool2, Relu,
                     Sequential, he_init)
from .losses import huber, softmax, softmax_xent
from .optim import SGD

__all__ = [
    "AvgPool2", "Conv5x5", "Dense", "Flatten", "Layer", "MaxPool2", "Relu",
    "SGD", "Sequential", "bytes_to_weights", "check_input_gradient",
    "check_sequential", "guard_sequential", "he_init", "huber",
    "layer_battery", "layer_param_triples", "rel_err", "relu_offset",
    "sampled_errors", "softmax", "softmax_xent", "tie_offset",
    "weights_to_bytes",
]
