"""Multi-task SGD training loop with validation curve emission.

Each iteration draws the next minibatch from a per-epoch seeded
permutation, so NSA's two towers and any sharing scheme consume the
identical data stream. The total loss is softmax cross-entropy plus
lambda times the Huber loss; shared layers receive the sum of both
task gradients. Every eval_interval iterations the validation top-1
accuracy and mean Huber loss are recorded and, when a path is given,
appended to curves.jsonl as {"iter", "val_acc", "val_huber"}.
"""

import json
from dataclasses import dataclass

import numpy as np

from ..data import Split
from ..errors import ConfigError, TrainingDivergedError
from ..nn import SGD, huber, softmax_xent
from ..rng import stream
from .network import MultiTaskNetwork


@dataclass
class TrainConfig:
    iterations: int = 20000
    batch: int = 64
    lr: float = 0.01
    momentum: float = 0.9
    lam: float = 1.0
    huber_delta: float = 1.0
    seed: int = 0
    eval_interval: int = 0
    decay_milestones: tuple = (0.5, 0.75)
    decay_factor: float = 0.1
    clip_norm: float = 0.0

    def __post_init__(self):
        if self.iterations < 1 or self.batch < 1:
            raise ConfigError("iterations and batch must be positive")
        if self.lr <= 0 or not 0 <= self.momentum < 1:
            raise ConfigError("need lr > 0 and momentum in [0, 1)")
        if self.lam < 0 or self.huber_delta <= 0:
            raise ConfigError("need lambda >= 0 and huber delta > 0")
        if self.clip_norm < 0:
            raise ConfigError("clip_norm must be >= 0")

    def interval(self) -> int:
        return self.eval_interval or max(1, self.iterations // 20)

    def lr_at(self, iteration: int) -> float:
        """Step schedule: lr scaled by decay_factor at each milestone."""
        lr = self.lr
        for frac in self.decay_milestones:
            if iteration >= frac * self.iterations:
                lr *= self.decay_factor
        return lr


class _BatchStream:
    """Seeded per-epoch permutations consumed in batch-size slices."""

    def __init__(self, count: int, batch: int, seed: int):
        self.count = count
        self.batch = batch
        self.seed = seed
        self.epoch = -1
        self.pos = 0
        self.perm = np.empty(0, dtype=np.int64)

    def next(self) -> np.ndarray:
        if self.pos >= len(self.perm):
            self.epoch += 1
            self.perm = stream(self.seed, "order", self.epoch).permutation(self.count)
            self.pos = 0
        idx = self.perm[self.pos:self.pos + self.batch]
        self.pos += self.batch
        return idx


def class_labels(model_ids: np.ndarray, class_ids: np.ndarray) -> np.ndarray:
    """Map registry model ids onto contiguous class indices."""
    labels = np.searchsorted(class_ids, model_ids)
    bad = (labels >= len(class_ids)) | (class_ids[np.minimum(labels, len(class_ids) - 1)] != model_ids)
    if np.any(bad):
        missing = sorted(set(np.asarray(model_ids)[bad].tolist()))
        raise ConfigError(f"model ids {missing} not in the class set")
    return labels.astype(np.int64)


def evaluate(net: MultiTaskNetwork, values: np.ndarray, labels: np.ndarray,
             thetas: np.ndarray, delta: float, batch: int = 512) -> tuple:
    """(top-1 accuracy, mean Huber loss) over one split."""
    x = net.batch_input(values)
    hits = 0
    huber_sum = 0.0
    for lo in range(0, x.shape[0], batch):
        hi = min(lo + batch, x.shape[0])
        logits, theta = net.forward(np.asarray(x[lo:hi], dtype=np.float32))
        hits += int((logits.argmax(axis=1) == labels[lo:hi]).sum())
        loss, _ = huber(theta, thetas[lo:hi], delta)
        huber_sum += loss * (hi - lo)
    n = x.shape[0]
    return hits / n, huber_sum / n


def train(net: MultiTaskNetwork, train_split: Split, val_split: Split,
          cfg: TrainConfig, curves_path=None, class_ids=None) -> list:
    """Train both heads; returns the learning-curve records."""
    if class_ids is None:
        class_ids = np.unique(np.asarray(train_split.model_ids))
    class_ids = np.asarray(class_ids, dtype=np.int64)
    if len(class_ids) != net.spec.k:
        raise ConfigError(
            f"network has K={net.spec.k} but the data holds "
            f"{len(class_ids)} model ids"
        )
    if len(train_split) == 0 or len(val_split) == 0:
        raise ConfigError("train and validation splits must be nonempty")

    x_train = net.batch_input(train_split.values)
    y_train = class_labels(train_split.model_ids, class_ids)
    t_train = np.asarray(train_split.thetas, dtype=np.float64)
    val_labels = class_labels(val_split.model_ids, class_ids)
    val_thetas = np.asarray(val_split.thetas, dtype=np.float64)

    opt = SGD(net.params(), net.grads(), lr=cfg.lr, momentum=cfg.momentum,
              clip_norm=cfg.clip_norm)
    batches = _BatchStream(len(train_split), cfg.batch, cfg.seed)
    interval = cfg.interval()
    curves = []
    sink = open(curves_path, "a", encoding="utf-8") if curves_path else None
    try:
        for it in range(1, cfg.iterations + 1):
            idx = batches.next()
            xb = np.ascontiguousarray(x_train[idx], dtype=np.float32)
            logits, theta = net.forward(xb)
            sel_loss, dlogits = softmax_xent(logits, y_train[idx])
            est_loss, dtheta = huber(theta, t_train[idx], cfg.huber_delta)
            if not np.isfinite(sel_loss + cfg.lam * est_loss):
                raise TrainingDivergedError(it)
            net.backward(dlogits.astype(np.float32),
                         (cfg.lam * dtheta).astype(np.float32))
            opt.lr = cfg.lr_at(it)
            opt.step(it)
            if it % interval == 0 or it == cfg.iterations:
                acc, hub = evaluate(net, val_split.values, val_labels,
                                    val_thetas, cfg.huber_delta)
                point = {"iter": it, "val_acc": acc, "val_huber": hub}
                if not curves or curves[-1]["iter"] != it:
                    curves.append(point)
                    if sink:
                        sink.write(json.dumps(point) + "\n")
                        sink.flush()
    finally:
        if sink:
            sink.close()
    return curves
