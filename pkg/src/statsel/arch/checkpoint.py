"""Checkpoint io: model.json next to weights.bin.

model.json holds the ordered layer table with shapes, the sharing
scheme, K, the sample size N, the seed, the training hyperparameters,
and the byte length of weights.bin; weights.bin is the little-endian
f32 concatenation of every parameter tensor in layer order (shared
trunk, then selector tower, then estimator tower).
"""

import json
import os
from dataclasses import asdict

import numpy as np

from ..errors import CheckpointError
from ..nn import bytes_to_weights, weights_to_bytes
from .builder import BuildSpec, build, parameter_count
from .network import MultiTaskNetwork
from .train import TrainConfig

FORMAT = "statsel-checkpoint"
VERSION = 1


def save_checkpoint(net: MultiTaskNetwork, out_dir: str, seed: int,
                    cfg: TrainConfig, class_ids, extra: dict = None) -> None:
    """Write model.json and weights.bin atomically into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    blob = weights_to_bytes(net.params())
    spec = net.spec
    meta = {
        "format": FORMAT,
        "version": VERSION,
        "size": spec.size,
        "sa": spec.sa,
        "shared": spec.shared,
        "k": spec.k,
        "n": spec.input_side * spec.input_side,
        "input_side": spec.input_side,
        "channels": spec.channels,
        "seed": seed,
        "class_ids": [int(c) for c in class_ids],
        "hyperparameters": asdict(cfg),
        "parameter_count": parameter_count(spec),
        "layers": net.layer_table,
        "weights_bytes": len(blob),
    }
    if extra:
        meta.update(extra)
    tmp = os.path.join(out_dir, "weights.bin.tmp")
    with open(tmp, "wb") as fh:
        fh.write(blob)
    os.replace(tmp, os.path.join(out_dir, "weights.bin"))
    tmp = os.path.join(out_dir, "model.json.tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, os.path.join(out_dir, "model.json"))


def load_checkpoint(ckpt_dir: str) -> tuple:
    """Rebuild the network and return (network, metadata)."""
    path = os.path.join(ckpt_dir, "model.json")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except FileNotFoundError:
        raise CheckpointError(f"missing {path}")
    except json.JSONDecodeError as err:
        raise CheckpointError(f"unreadable {path}: {err}")
    if meta.get("format") != FORMAT:
        raise CheckpointError(f"{path} is not a checkpoint description")
    if meta.get("version") != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {meta.get('version')}")
    missing = [key for key in ("size", "sa", "k", "input_side", "channels",
                               "shared", "seed", "weights_bytes",
                               "hyperparameters", "class_ids")
               if key not in meta]
    if missing:
        raise CheckpointError(f"{path} is missing fields {missing}")
    spec = BuildSpec(size=meta["size"], sa=meta["sa"], k=meta["k"],
                     input_side=meta["input_side"],
                     channels=meta["channels"], shared=meta["shared"])
    seed = meta["seed"]
    declared = meta["weights_bytes"]
    net = build(spec, seed=seed, dtype=np.float32)
    wpath = os.path.join(ckpt_dir, "weights.bin")
    try:
        with open(wpath, "rb") as fh:
            blob = fh.read()
    except FileNotFoundError:
        raise CheckpointError(f"missing {wpath}")
    if len(blob) != declared:
        raise CheckpointError(
            f"{wpath} holds {len(blob)} bytes, model.json declares {declared}"
        )
    bytes_to_weights(blob, net.params())
    return net, meta
