"""CNN builders for the three sizes and three weight-sharing schemes.

A network is a shared trunk plus a selector tower (dense -> K logits)
and an estimator tower (dense -> 1 linear). NSA keeps the trunk empty
and duplicates the full backbone per task, FSA shares the whole
backbone, PSA-l shares the first l trainable layers. Trainable layers
are counted in forward order (convs then hidden denses); pooling,
relu, and flatten attach to the preceding trainable layer. Pooling
placement: small has maxpool after conv1/conv2 and avgpool after
conv3, medium has maxpool after conv2/conv4, large has maxpool after
conv2/conv4 and avgpool after conv5.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..nn import AvgPool2, Conv5x5, Dense, Flatten, MaxPool2, Relu, Sequential
from ..rng import stream

INPUT_SIDES = (10, 20, 30)
SA_TAGS = ("nsa", "fsa", "psa")


@dataclass(frozen=True)
class CnnSize:
    """Filter counts and dense widths for one architecture size."""
    tag: str
    conv: tuple
    dense: tuple
    maxpool_after: tuple
    avgpool_after: tuple


SIZES = {
    "small": CnnSize("small", (64, 128, 128), (512, 256), (1, 2), (3,)),
    "medium": CnnSize("medium", (64, 64, 64, 64, 64), (64, 64), (2, 4), ()),
    "large": CnnSize("large", (64, 64, 128, 128, 128), (1024, 512), (2, 4), (5,)),
}


@dataclass(frozen=True)
class BuildSpec:
    """Everything needed to rebuild a network layout."""
    size: str
    sa: str
    k: int
    input_side: int
    channels: int = 1
    shared: int = 0

    def __post_init__(self):
        if self.size not in SIZES:
            raise ConfigError(f"unknown size '{self.size}'")
        if self.sa not in SA_TAGS:
            raise ConfigError(f"unknown sharing scheme '{self.sa}'")
        if self.input_side not in INPUT_SIDES:
            raise ConfigError(
                f"input side must be one of {INPUT_SIDES}, got {self.input_side}"
            )
        if self.k < 1:
            raise ConfigError(f"K must be >= 1, got {self.k}")
        if self.channels not in (1, 2):
            raise ConfigError(f"channels must be 1 or 2, got {self.channels}")
        total = backbone_depth(self.size)
        if self.sa == "psa":
            if not 1 <= self.shared <= total:
                raise ConfigError(
                    f"psa shares 1..{total} layers for size "
                    f"'{self.size}', got {self.shared}"
                )
        elif self.shared:
            raise ConfigError(f"shared layers only apply to psa, got {self.sa}")

    def n_shared(self) -> int:
        """Shared trainable-layer count implied by the scheme."""
        if self.sa == "nsa":
            return 0
        if self.sa == "fsa":
            return backbone_depth(self.size)
        return self.shared


def backbone_depth(size_tag: str) -> int:
    """Trainable layers in the backbone (convs plus hidden denses)."""
    size = SIZES[size_tag]
    return len(size.conv) + len(size.dense)


def _backbone_plan(spec: BuildSpec) -> list:
    """Per-trainable-layer descriptors with attached pool/flatten info."""
    size = SIZES[spec.size]
    plan = []
    side = spec.input_side
    in_c = spec.channels
    for i, out_c in enumerate(size.conv, start=1):
        pool = ("max" if i in size.maxpool_after
                else "avg" if i in size.avgpool_after else None)
        plan.append({"kind": "conv5x5", "in": in_c, "out": out_c, "pool": pool})
        if pool:
            side //= 2
        in_c = out_c
    width = in_c * side * side
    for j, out_w in enumerate(size.dense):
        plan.append({"kind": "dense", "in": width, "out": out_w,
                     "flatten": j == 0})
        width = out_w
    return plan


def _instantiate(plan_slice: list, part: str, seed: int, dtype) -> tuple:
    """Build layer objects for one network part.

    Weights are drawn from streams keyed by (part, position) so that
    identical layouts get identical weights regardless of how the
    backbone was split between trunk and towers.
    """
    layers = []
    table = []
    for pos, entry in enumerate(plan_slice):
        rng = stream(seed, "init", part, pos)
        if entry["kind"] == "conv5x5":
            layers.append(Conv5x5(entry["in"], entry["out"], rng, dtype=dtype))
            table.append({"part": part, "kind": "conv5x5",
                          "in": entry["in"], "out": entry["out"]})
            layers.append(Relu())
            table.append({"part": part, "kind": "relu"})
            if entry["pool"] == "max":
                layers.append(MaxPool2())
                table.append({"part": part, "kind": "maxpool2"})
            elif entry["pool"] == "avg":
                layers.append(AvgPool2())
                table.append({"part": part, "kind": "avgpool2"})
        else:
            if entry.get("flatten"):
                layers.append(Flatten())
                table.append({"part": part, "kind": "flatten"})
            layers.append(Dense(entry["in"], entry["out"], rng, dtype=dtype))
            table.append({"part": part, "kind": "dense",
                          "in": entry["in"], "out": entry["out"]})
            if entry.get("head"):
                continue
            layers.append(Relu())
            table.append({"part": part, "kind": "relu"})
    return layers, table


def build(spec: BuildSpec, seed: int = 0, dtype=np.float32):
    """Assemble the multi-task network for a build spec."""
    from .network import MultiTaskNetwork

    plan = _backbone_plan(spec)
    hidden = plan[-1]["out"]
    n_shared = spec.n_shared()
    sel_head = {"kind": "dense", "in": hidden, "out": spec.k, "head": True}
    est_head = {"kind": "dense", "in": hidden, "out": 1, "head": True}

    trunk_layers, trunk_table = _instantiate(plan[:n_shared], "shared",
                                             seed, dtype)
    sel_layers, sel_table = _instantiate(plan[n_shared:] + [sel_head],
                                         "selector", seed, dtype)
    est_layers, est_table = _instantiate(plan[n_shared:] + [est_head],
                                         "estimator", seed, dtype)
    return MultiTaskNetwork(
        trunk=Sequential(trunk_layers),
        selector=Sequential(sel_layers),
        estimator=Sequential(est_layers),
        spec=spec,
        layer_table=trunk_table + sel_table + est_table,
    )


def parameter_count(spec: BuildSpec) -> int:
    """Trainable parameter total as a pure function of the layout."""
    def layer_params(entry) -> int:
        if entry["kind"] == "conv5x5":
            return 25 * entry["in"] * entry["out"] + entry["out"]
        return entry["in"] * entry["out"] + entry["out"]

    plan = _backbone_plan(spec)
    hidden = plan[-1]["out"]
    n_shared = spec.n_shared()
    shared = sum(layer_params(e) for e in plan[:n_shared])
    per_task = sum(layer_params(e) for e in plan[n_shared:])
    heads = (hidden * spec.k + spec.k) + (hidden * 1 + 1)
    return shared + 2 * per_task + heads
