"""Architecture assembly, multi-task training, and checkpointing."""

from .builder import (INPUT_SIDES, SIZES, BuildSpec, CnnSize, backbone_depth,
                      build, parameter_count)
from .check import multitask_check, per_layer
from .checkpoint import load_checkpoint, save_checkpoint
from .network import MultiTaskNetwork, SelectionResult, predict_batch
from .train import TrainConfig, class_labels, evaluate, train

__all__ = [
    "INPUT_SIDES", "SIZES", "BuildSpec", "CnnSize", "MultiTaskNetwork",
    "SelectionResult", "TrainConfig", "backbone_depth", "build",
    "class_labels", "evaluate", "load_checkpoint", "multitask_check",
    "parameter_count", "per_layer", "predict_batch", "save_checkpoint",
    "train",
]
