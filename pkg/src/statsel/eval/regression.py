"""Seven-family regression selector: medium CNN over (x, y) channel pairs.

Records come from generate_regression: channel 0 holds the covariate
values, channel 1 the responses, both in raw draw order. Selection is
the only trained objective; the estimator head is present but weighted
zero because the theta slot carries a coefficient-cell index, not a
parameter of interest.
"""

from dataclasses import replace

import numpy as np

from ..errors import ConfigError
from ..data.records import matrix_side
from ..arch.builder import BuildSpec, build
from ..arch.train import train
from .metrics import EvalReport, evaluate_selector

__all__ = ["train_regression_selector"]


def train_regression_selector(splits: dict, cfg, curves_path=None) -> tuple:
    """Train the medium-CNN selector on regression records.

    splits is the {"train", "val", "test"} mapping from
    generate_regression. Returns (network, EvalReport) with the report
    evaluated on the test split.
    """
    for name in ("train", "val", "test"):
        if name not in splits:
            raise ConfigError(f"regression dataset is missing the {name} split")
    train_split = splits["train"]
    if train_split.n % 2 != 0:
        raise ConfigError(
            f"regression records need two channels, got {train_split.n} values"
        )
    side = matrix_side(train_split.n // 2)
    class_ids = np.unique(np.asarray(train_split.model_ids))

    spec = BuildSpec(size="medium", sa="fsa", k=len(class_ids),
                     input_side=side, channels=2)
    net = build(spec, seed=cfg.seed)
    cfg = replace(cfg, lam=0.0)  # selector-only: silence the theta head
    train(net, train_split, splits["val"], cfg, curves_path=curves_path,
          class_ids=class_ids)

    meta = {"size": spec.size, "sa": spec.sa, "k": spec.k,
            "n": side * side, "channels": 2, "seed": cfg.seed}
    report = evaluate_selector(net, splits["test"], class_ids=class_ids,
                               meta=meta)
    return net, report
