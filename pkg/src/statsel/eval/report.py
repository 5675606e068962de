"""Learning-curve loading and CSV table rendering for run reports.

Tables are rendered from machine-first report JSON: selection tables
group replicate runs by (k, size, sa, n) and show mean accuracy with
sample sd, estimation tables do the same for Huber loss, and baseline
tables tally top-1/top-2 rates from ranking JSONL files.
"""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DataFormatError
from .metrics import EvalReport, aggregate_runs

__all__ = ["LearningCurves", "load_curves", "selection_rows",
           "estimation_rows", "baseline_rows", "write_csv"]

_CURVE_KEYS = ("iter", "val_acc", "val_huber")


@dataclass
class LearningCurves:
    """One run's validation series against the iteration axis."""

    iterations: np.ndarray
    val_acc: np.ndarray
    val_huber: np.ndarray

    def __post_init__(self):
        if len(self.iterations) and np.any(np.diff(self.iterations) <= 0):
            raise DataFormatError("curve iterations must be strictly increasing")

    def __len__(self) -> int:
        return len(self.iterations)

    @property
    def val_log_huber(self) -> np.ndarray:
        """log loss axis used by accuracy-vs-iteration plots."""
        with np.errstate(divide="ignore"):
            return np.log(self.val_huber)


def load_curves(path) -> LearningCurves:
    """Parse a curves.jsonl file written by train."""
    its, accs, hubs = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                point = json.loads(line)
            except json.JSONDecodeError as err:
                raise DataFormatError(f"{path}:{lineno}: {err}")
            missing = [k for k in _CURVE_KEYS if k not in point]
            if missing:
                raise DataFormatError(
                    f"{path}:{lineno}: curve point is missing {missing}"
                )
            its.append(int(point["iter"]))
            accs.append(float(point["val_acc"]))
            hubs.append(float(point["val_huber"]))
    return LearningCurves(np.asarray(its, dtype=np.int64),
                          np.asarray(accs), np.asarray(hubs))


def _group(reports, keys):
    groups = {}
    for rep in reports:
        tag = tuple(rep.meta.get(k) for k in keys)
        groups.setdefault(tag, []).append(rep)
    return sorted(groups.items(), key=lambda kv: str(kv[0]))


def _fmt(x, digits: int = 4) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return ""
    return f"{x:.{digits}f}"


_GROUP_KEYS = ("k", "size", "sa", "n")


def selection_rows(reports) -> list:
    """Accuracy table rows: one per (k, size, sa, n) group of runs."""
    rows = [list(_GROUP_KEYS) + ["runs", "top1_mean", "top1_sd",
                                 "top2_mean", "top2_sd"]]
    for tag, group in _group(reports, _GROUP_KEYS):
        agg = group[0] if len(group) == 1 else aggregate_runs(group)
        rows.append([*tag, len(group), _fmt(agg.top1_acc), _fmt(agg.top1_sd),
                     _fmt(agg.top2_acc), _fmt(agg.top2_sd)])
    return rows


def estimation_rows(reports) -> list:
    """Huber-loss table rows, grouped like selection_rows."""
    rows = [list(_GROUP_KEYS) + ["runs", "huber_mean", "huber_sd"]]
    for tag, group in _group(reports, _GROUP_KEYS):
        agg = group[0] if len(group) == 1 else aggregate_runs(group)
        rows.append([*tag, len(group), _fmt(agg.huber), _fmt(agg.huber_sd)])
    return rows


def baseline_rows(named_paths) -> list:
    """Top-1/top-2 rates per labeled ranking file [(label, path), ...]."""
    rows = [["method", "records", "top1", "top2"]]
    for label, path in named_paths:
        hits1 = hits2 = count = 0
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    hits1 += bool(rec["top1_hit"])
                    hits2 += bool(rec["top2_hit"])
                except (json.JSONDecodeError, KeyError) as err:
                    raise DataFormatError(f"{path}:{lineno}: {err}")
                count += 1
        if count == 0:
            raise DataFormatError(f"{path}: no ranking records")
        rows.append([label, count, _fmt(hits1 / count), _fmt(hits2 / count)])
    return rows


def write_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh).writerows(rows)
