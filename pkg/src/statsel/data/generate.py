"""Systematic generation of labeled training, test, and regression datasets.

Every record draws from its own counter-based stream keyed by
(seed, role, model_id, cell, replicate), so generation order and worker
count never change the data.
"""

import numpy as np

from ..errors import ConfigError
from ..models import sample_regression
from ..rng import stream
from .records import Split, matrix_side

TRAIN_FRACTION = 0.8
SNAP_GUARD = 1e-9


def _val_count(d: int) -> int:
    """Validation records per grid cell under the 80/20 rule."""
    if d < 2:
        return 0  # single replicate: cells alternate by parity instead
    return min(d - 1, max(1, d // 5))  # floor(0.2 d) in exact integer math


def _record_id(model_id: int, cell: int, rep: int) -> int:
    return (model_id * 10_000 + cell) * 1_000_000 + rep


def _alloc(count: int, n: int) -> Split:
    return Split(
        n=n,
        model_ids=np.zeros(count, dtype=np.int64),
        thetas=np.zeros(count, dtype=np.float64),
        values=np.zeros((count, n), dtype=np.float32),
        record_ids=np.zeros(count, dtype=np.int64),
    )


class _Filler:
    def __init__(self, split: Split):
        self.split = split
        self.at = 0

    def put(self, model_id: int, theta: float, values, record_id: int) -> None:
        s, i = self.split, self.at
        s.model_ids[i] = model_id
        s.thetas[i] = theta
        s.values[i] = values
        s.record_ids[i] = record_id
        self.at += 1


def generate_labeled(models, n: int, n_k: int, d: int, seed: int,
                     sort_values: bool = False):
    """Grid-labeled samples split 80/20 per (model, grid point) cell.

    Returns ({"train": Split, "val": Split}, manifest). Each of the K
    models contributes exactly n_k * d records. Cells with a single
    replicate alternate between the splits by cell parity. Records keep
    raw draw order unless sort_values is set.
    """
    matrix_side(n)
    if n_k < 2:
        raise ConfigError("grid size must be >= 2")
    if d < 1:
        raise ConfigError("replicate count must be >= 1")
    models = list(models)
    n_val = _val_count(d)
    cells = len(models) * n_k
    if d == 1:
        train_total = (cells + 1) // 2
        val_total = cells // 2
    else:
        train_total = cells * (d - n_val)
        val_total = cells * n_val
    train = _Filler(_alloc(train_total, n))
    val = _Filler(_alloc(val_total, n))

    cell = 0
    for model in models:
        grid = model.space.grid(n_k)
        for l, theta in enumerate(grid):
            theta = float(theta)
            for rep in range(d):
                rng = stream(seed, "labeled", model.model_id, l, rep)
                y = model.sample(theta, n, rng=rng)
                if sort_values:
                    y = np.sort(y)
                if d == 1:
                    dest = train if cell % 2 == 0 else val
                else:
                    dest = train if rep < d - n_val else val
                dest.put(model.model_id, theta, y, _record_id(model.model_id, l, rep))
            cell += 1

    manifest = {
        "kind": "labeled",
        "model_set": [m.model_id for m in models],
        "model_names": [m.name for m in models],
        "sample_size": n,
        "channels": 1,
        "grid_size": n_k,
        "replicates": d,
        "split_ratios": {"train": TRAIN_FRACTION, "val": 1.0 - TRAIN_FRACTION},
        "sorted_values": bool(sort_values),
        "seed": seed,
    }
    return {"train": train.split, "val": val.split}, manifest


def _test_thetas(model, count: int, rng, grid_n: int) -> np.ndarray:
    """Uniform parameter draws avoiding the size-grid_n training grid.

    Integer spaces cannot avoid their own grid; the disjointness contract
    applies to continuous spaces only.
    """
    if model.space.integer:
        return model.space.draw(rng, count)
    grid = model.space.grid(grid_n)
    guard = SNAP_GUARD * (model.space.hi - model.space.lo)
    out = np.empty(count)
    for i in range(count):
        while True:
            t = float(model.space.draw(rng, 1)[0])
            if np.min(np.abs(grid - t)) > guard:
                out[i] = t
                break
    return out


def generate_test(models, n: int, n_test_params: int = 100, reps: int = 10,
                  seed: int = 0, grid_n: int = 11, sort_values: bool = False):
    """Held-out records: per model, fresh parameter draws x reps samples."""
    matrix_side(n)
    if n_test_params < 1 or reps < 1:
        raise ConfigError("test parameter count and reps must be >= 1")
    models = list(models)
    test = _Filler(_alloc(len(models) * n_test_params * reps, n))
    for model in models:
        thetas = _test_thetas(model, n_test_params, stream(seed, "test-theta", model.model_id), grid_n)
        for j, theta in enumerate(thetas):
            theta = float(theta)
            for rep in range(reps):
                rng = stream(seed, "test", model.model_id, j, rep)
                y = model.sample(theta, n, rng=rng)
                if sort_values:
                    y = np.sort(y)
                test.put(model.model_id, theta, y, _record_id(model.model_id, j, rep))

    manifest = {
        "kind": "test",
        "model_set": [m.model_id for m in models],
        "model_names": [m.name for m in models],
        "sample_size": n,
        "channels": 1,
        "n_test_params": n_test_params,
        "reps": reps,
        "train_grid_size": grid_n,
        "sorted_values": bool(sort_values),
        "seed": seed,
    }
    return {"test": test.split}, manifest


def generate_regression(specs, n: int, coef_grid: int, d: int, seed: int):
    """Two-channel (x, y) records split 70/20/10 per coefficient-grid cell.

    The record theta slot stores the flattened coefficient cell index;
    the label of interest is the model id.
    """
    from ..models import coefficient_grid as coefficient_grid_fn

    matrix_side(n)
    if coef_grid < 2:
        raise ConfigError("coefficient grid must be >= 2 per axis")
    if d < 3:
        raise ConfigError("70/20/10 splitting needs at least 3 replicates per cell")
    specs = list(specs)
    n_test = max(1, d // 10)  # floor(0.1 d)
    n_val = max(1, d // 5)  # floor(0.2 d)
    n_train = d - n_val - n_test
    if n_train < 1:
        raise ConfigError(f"no training records left from {d} replicates")
    cells = coef_grid * coef_grid
    train = _Filler(_alloc(len(specs) * cells * n_train, 2 * n))
    val = _Filler(_alloc(len(specs) * cells * n_val, 2 * n))
    test = _Filler(_alloc(len(specs) * cells * n_test, 2 * n))

    for spec in specs:
        grid = coefficient_grid_fn(spec, coef_grid)
        for cell, beta in enumerate(grid):
            for rep in range(d):
                rng = stream(seed, "reg", spec.model_id, cell, rep)
                x, y = sample_regression(spec, beta, n, rng=rng)
                if rep < n_train:
                    dest = train
                elif rep < n_train + n_val:
                    dest = val
                else:
                    dest = test
                dest.put(
                    spec.model_id,
                    float(cell),
                    np.concatenate([x, y]).astype(np.float32),
                    _record_id(spec.model_id, cell, rep),
                )

    manifest = {
        "kind": "regression",
        "model_set": [s.model_id for s in specs],
        "model_names": [s.name for s in specs],
        "sample_size": n,
        "channels": 2,
        "coef_grid": coef_grid,
        "replicates": d,
        "split_ratios": {"train": n_train / d, "val": n_val / d, "test": n_test / d},
        "seed": seed,
    }
    return {"train": train.split, "val": val.split, "test": test.split}, manifest
