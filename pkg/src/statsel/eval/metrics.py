"""Evaluation reports: top-k accuracy, confusion counts, Huber, RMSE.

A report is machine-first: `to_json` emits the canonical form and
`report_from_json` restores it losslessly. Selection metrics come from
any predictor producing class scores (a trained network or a classical
ranking method); estimation metrics need the network's theta head.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..nn.losses import huber
from ..arch.network import MultiTaskNetwork, predict_batch
from ..arch.train import class_labels

__all__ = ["EvalReport", "evaluate_selector", "evaluate_estimator",
           "aggregate_runs", "baseline_scorer", "report_from_json"]


@dataclass
class EvalReport:
    """Metrics over one test split, or the mean across replicate runs.

    confusion rows are true classes, columns predicted; rmse maps model
    id to the root-mean-square error of theta-hat on that model's
    records. Fields a given evaluation does not produce stay None, and
    the *_sd slots are filled only by aggregate_runs.
    """

    top1_acc: float = None
    top2_acc: float = None
    huber: float = None
    confusion: np.ndarray = None
    rmse: dict = None
    meta: dict = field(default_factory=dict)
    top1_sd: float = None
    top2_sd: float = None
    huber_sd: float = None

    def to_json(self) -> str:
        out = {
            "top1_acc": self.top1_acc, "top2_acc": self.top2_acc,
            "huber": self.huber,
            "confusion": None if self.confusion is None
            else [[int(c) for c in row] for row in self.confusion],
            "rmse": None if self.rmse is None
            else {str(k): v for k, v in sorted(self.rmse.items())},
            "meta": self.meta,
            "top1_sd": self.top1_sd, "top2_sd": self.top2_sd,
            "huber_sd": self.huber_sd,
        }
        return json.dumps(out, sort_keys=True)


def report_from_json(text: str) -> EvalReport:
    """Inverse of EvalReport.to_json."""
    raw = json.loads(text)
    conf = raw.get("confusion")
    rmse = raw.get("rmse")
    return EvalReport(
        top1_acc=raw.get("top1_acc"), top2_acc=raw.get("top2_acc"),
        huber=raw.get("huber"),
        confusion=None if conf is None else np.asarray(conf, dtype=np.int64),
        rmse=None if rmse is None else {int(k): v for k, v in rmse.items()},
        meta=raw.get("meta", {}),
        top1_sd=raw.get("top1_sd"), top2_sd=raw.get("top2_sd"),
        huber_sd=raw.get("huber_sd"),
    )


def _scores(predictor, values) -> np.ndarray:
    """(count, K) class-score matrix from a network or a callable."""
    if isinstance(predictor, MultiTaskNetwork):
        probs, _ = predict_batch(predictor, values)
        return probs
    out = np.asarray(predictor(values), dtype=np.float64)
    if out.ndim != 2 or out.shape[0] != values.shape[0]:
        raise ConfigError(
            f"predictor returned shape {out.shape} for {values.shape[0]} records"
        )
    return out


def evaluate_selector(predictor, split, class_ids=None, meta=None) -> EvalReport:
    """Selection metrics: top-1/top-2 accuracy and the confusion matrix.

    predictor is a MultiTaskNetwork or a callable mapping a (count, n)
    value block to (count, K) scores, higher = more plausible. Ties
    resolve to the lower class index, matching argmax.
    """
    if len(split) == 0:
        raise ConfigError("test split is empty")
    if class_ids is None:
        class_ids = np.unique(np.asarray(split.model_ids))
    class_ids = np.asarray(class_ids, dtype=np.int64)
    labels = class_labels(split.model_ids, class_ids)
    scores = _scores(predictor, split.values)
    k = scores.shape[1]
    if k != len(class_ids):
        raise ConfigError(f"{k} score columns for {len(class_ids)} classes")

    order = np.argsort(-scores, axis=1, kind="stable")
    pred = order[:, 0]
    hits1 = pred == labels
    hits2 = hits1 if k == 1 else hits1 | (order[:, 1] == labels)
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (labels, pred), 1)

    report = EvalReport(
        top1_acc=float(hits1.mean()), top2_acc=float(hits2.mean()),
        confusion=confusion, meta=dict(meta or {}),
    )
    report.meta.setdefault("records", len(split))
    report.meta.setdefault("class_ids", [int(c) for c in class_ids])
    return report


def evaluate_estimator(predictor, split, delta: float = 1.0,
                       meta=None) -> EvalReport:
    """Estimation metrics: mean Huber loss and per-model RMSE of theta-hat.

    predictor is a MultiTaskNetwork (theta head) or a callable mapping a
    (count, n) value block to (count,) estimates. delta is the Huber
    threshold the network trained with.
    """
    if len(split) == 0:
        raise ConfigError("test split is empty")
    if isinstance(predictor, MultiTaskNetwork):
        _, theta_hat = predict_batch(predictor, split.values)
    else:
        theta_hat = np.asarray(predictor(split.values), dtype=np.float64)
        if theta_hat.shape != (len(split),):
            raise ConfigError(
                f"estimator returned shape {theta_hat.shape} for {len(split)} records"
            )
    truth = np.asarray(split.thetas, dtype=np.float64)
    loss, _ = huber(theta_hat, truth, delta)

    rmse = {}
    for mid in np.unique(np.asarray(split.model_ids)):
        rows = np.asarray(split.model_ids) == mid
        err = theta_hat[rows] - truth[rows]
        rmse[int(mid)] = float(np.sqrt(np.mean(np.square(err))))

    report = EvalReport(huber=float(loss), rmse=rmse, meta=dict(meta or {}))
    report.meta.setdefault("records", len(split))
    report.meta.setdefault("huber_delta", delta)
    return report


def _mean_sd(values) -> tuple:
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std(ddof=1))


def aggregate_runs(reports) -> EvalReport:
    """Mean and sample sd per metric across R >= 2 replicate runs.

    Confusion counts are summed (row sums then total records across all
    runs); rmse is averaged per model. A metric is aggregated only when
    every report carries it.
    """
    reports = list(reports)
    if len(reports) < 2:
        raise ConfigError(f"need >= 2 replicate reports, got {len(reports)}")
    out = EvalReport(meta={"runs": len(reports)})
    if all(r.top1_acc is not None for r in reports):
        out.top1_acc, out.top1_sd = _mean_sd([r.top1_acc for r in reports])
        out.top2_acc, out.top2_sd = _mean_sd([r.top2_acc for r in reports])
    if all(r.huber is not None for r in reports):
        out.huber, out.huber_sd = _mean_sd([r.huber for r in reports])
    if all(r.confusion is not None for r in reports):
        out.confusion = np.sum([r.confusion for r in reports], axis=0)
    if all(r.rmse is not None for r in reports):
        keys = sorted({k for r in reports for k in r.rmse})
        out.rmse = {k: float(np.mean([r.rmse[k] for r in reports if k in r.rmse]))
                    for k in keys}
    seeds = [r.meta.get("seed") for r in reports]
    if all(s is not None for s in seeds):
        out.meta["seeds"] = seeds
    return out


def baseline_scorer(method: str, models, **kwargs):
    """Adapter turning a classical selector into a score-matrix callable.

    The returned callable maps a value block to (count, K) scores where
    score = -(ranking position), so argsort descending reproduces the
    method's ranking exactly, tie-breaks included.
    """
    from .. import baselines

    models = list(models)
    index = {m.model_id: j for j, m in enumerate(models)}

    def score(values) -> np.ndarray:
        ranked = baselines.rank_batch(values, models, methods=(method,),
                                      **kwargs)[method]
        out = np.empty((len(ranked), len(models)), dtype=np.float64)
        for i, ranking in enumerate(ranked):
            for pos, mid in enumerate(ranking.model_ids()):
                out[i, index[mid]] = -float(pos)
        return out

    return score
