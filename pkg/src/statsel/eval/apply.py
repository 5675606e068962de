"""Apply a trained checkpoint to one numeric column of real data.

The flow mirrors the package's evaluation path: draw one deterministic
size-N subsample from the column, run the network on its square matrix,
and report the selected model, the parameter estimate, and a density
overlay (histogram bins plus fitted curve) for plotting.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, InputError
from ..models import get_model
from ..data.records import reshape_sample
from ..arch.checkpoint import load_checkpoint

__all__ = ["ApplyResult", "read_numeric_column", "apply_sample", "apply_csv"]

_MISSING = {"", "na", "n/a", "null", "nan", "?"}
_CURVE_POINTS = 201


@dataclass
class ApplyResult:
    """Selected model, estimate, and overlay table for one column.

    theta is the raw estimator output; theta_fit is the value the curve
    was drawn with (theta snapped to the model's parameter domain when
    the raw output falls outside it). curve_density is empty when no
    finite density exists even after snapping.
    """

    model_id: int
    model_name: str
    theta: float
    theta_fit: float
    probs: dict
    indices: np.ndarray
    skipped: int
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    curve_y: np.ndarray
    curve_density: np.ndarray
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        out = {
            "model_id": self.model_id, "model_name": self.model_name,
            "theta": self.theta, "theta_fit": self.theta_fit,
            "probs": self.probs, "skipped": self.skipped,
            "indices": [int(i) for i in self.indices],
            "hist_edges": [float(e) for e in self.hist_edges],
            "hist_counts": [int(c) for c in self.hist_counts],
            "curve_y": [float(y) for y in self.curve_y],
            "curve_density": [float(d) for d in self.curve_density],
            "meta": self.meta,
        }
        return json.dumps(out, sort_keys=True)


def read_numeric_column(path, column: str) -> tuple:
    """(values, skipped) from a UTF-8 CSV with a header row.

    Cells that are empty or carry a missing-value marker (NA, null,
    nan, ?) are skipped and counted; any other non-numeric cell is an
    error naming its rows (the header is row 1).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file, expected a header row")
        if column not in header:
            raise InputError(
                f"{path}: no column {column!r} in header {header}"
            )
        col = header.index(column)
        values, skipped, bad = [], 0, []
        for rownum, row in enumerate(reader, start=2):
            cell = row[col].strip() if col < len(row) else ""
            if cell.lower() in _MISSING:
                skipped += 1
                continue
            try:
                y = float(cell)
            except ValueError:
                bad.append(rownum)
                continue
            if math.isfinite(y):
                values.append(y)
            else:
                skipped += 1
    if bad:
        shown = ", ".join(str(r) for r in bad[:10])
        more = f" and {len(bad) - 10} more" if len(bad) > 10 else ""
        raise InputError(
            f"{path}: non-numeric values in column {column!r} "
            f"at rows {shown}{more}"
        )
    return np.asarray(values, dtype=np.float64), skipped


def _snap_theta(model, theta: float) -> float:
    """theta when valid, else the nearest point of a fine domain grid."""
    if model.theta_valid(theta):
        return float(theta)
    grid = model.space.grid(min(257, _grid_capacity(model)))
    return float(grid[np.argmin(np.abs(grid - theta))])


def _grid_capacity(model) -> int:
    space = model.space
    if not space.integer:
        return 257
    return max(2, int(space.hi - space.lo) + 1)


def _density_curve(model, theta: float, sample: np.ndarray) -> tuple:
    """(y, density) points across the sample range at parameter theta."""
    lo, hi = float(sample.min()), float(sample.max())
    if model.discrete:
        span = np.arange(math.floor(lo), math.ceil(hi) + 1, dtype=np.float64)
        if span.size > 2048:
            span = np.unique(np.rint(np.linspace(span[0], span[-1], 2048)))
        y = span
    else:
        if hi <= lo:
            hi = lo + 1.0
        y = np.linspace(lo, hi, _CURVE_POINTS)
    with np.errstate(all="ignore"):
        dens = np.exp(model.log_density(y, theta))
    keep = np.isfinite(dens)
    return y[keep], dens[keep]


def apply_sample(ckpt_dir, values: np.ndarray, seed: int = 0,
                 bins: int = 30) -> ApplyResult:
    """Select a model for one numeric column using a trained checkpoint.

    Draws a deterministic size-N subsample (N from the checkpoint's
    input side), so repeated runs with the same seed pick the same rows.
    """
    net, meta = load_checkpoint(ckpt_dir)
    if meta["channels"] != 1:
        raise ConfigError(
            f"apply needs a univariate checkpoint, this one has "
            f"{meta['channels']} channels"
        )
    n = meta["input_side"] ** 2
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise InputError(f"expected a 1-d column, got shape {values.shape}")
    if len(values) < n:
        raise InputError(
            f"checkpoint needs samples of size {n}, column has only "
            f"{len(values)} usable values"
        )
    rng = np.random.default_rng(seed)
    indices = rng.choice(len(values), size=n, replace=False)
    sample = values[indices]

    result = net.predict(reshape_sample(sample))
    class_ids = meta["class_ids"]
    model = get_model(int(class_ids[result.top_class]))
    theta_fit = _snap_theta(model, result.theta)
    curve_y, curve_density = _density_curve(model, theta_fit, sample)
    counts, edges = np.histogram(sample, bins=bins)

    return ApplyResult(
        model_id=model.model_id, model_name=model.name,
        theta=float(result.theta), theta_fit=theta_fit,
        probs={str(int(cid)): float(p)
               for cid, p in zip(class_ids, result.probs)},
        indices=indices, skipped=0,
        hist_edges=edges, hist_counts=counts,
        curve_y=curve_y, curve_density=curve_density,
        meta={"n": n, "seed": seed, "column_values": len(values)},
    )


def apply_csv(ckpt_dir, csv_path, column: str, seed: int = 0,
              bins: int = 30) -> ApplyResult:
    """CSV front end of apply_sample; missing-cell count is recorded."""
    values, skipped = read_numeric_column(csv_path, column)
    out = apply_sample(ckpt_dir, values, seed=seed, bins=bins)
    out.skipped = skipped
    out.meta["column"] = column
    return out
