"""Sequential training queue for the acceptance benchmark runs.

Trains every network tests/test_acceptance.py consumes and writes
checkpoint + curves.jsonl + result.json under .acceptance/runs/<name>/.
A run whose result.json already exists is skipped, so the queue can be
re-launched after an interruption and only does the remaining work.
"""

import json
import os
import sys
import time

import numpy as np

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "src"))

from statsel.arch import (BuildSpec, TrainConfig, build, class_labels,
                          evaluate, save_checkpoint, train)
from statsel.data import generate_labeled, generate_regression, generate_test
from statsel.models import REGRESSION_MODELS, top_models

RUNS_DIR = os.path.join(ROOT, ".acceptance", "runs")

TRAIN_SEED_K5 = 11
TRAIN_SEED_K20 = 12
TRAIN_SEED_REG = 13
TEST_SEED = 0


def _splits_k(k: int, seed: int):
    models = top_models(k)
    splits, _ = generate_labeled(models, n=100, n_k=10, d=200, seed=seed)
    tests, _ = generate_test(models, n=100, seed=TEST_SEED)
    return splits["train"], splits["val"], tests["test"], [m.model_id for m in models]


def _splits_reg(n: int):
    splits, _ = generate_regression(REGRESSION_MODELS, n=n, coef_grid=5,
                                    d=200, seed=TRAIN_SEED_REG)
    ids = [s.model_id for s in REGRESSION_MODELS]
    return splits["train"], splits["val"], splits["test"], ids


def run_one(name: str, spec: BuildSpec, cfg: TrainConfig, data_fn, log) -> None:
    out = os.path.join(RUNS_DIR, name)
    if os.path.exists(os.path.join(out, "result.json")):
        log(f"skip {name}: already complete")
        return
    os.makedirs(out, exist_ok=True)
    curves_path = os.path.join(out, "curves.jsonl")
    if os.path.exists(curves_path):
        os.remove(curves_path)
    t0 = time.time()
    train_split, val_split, test_split, ids = data_fn()
    log(f"{name}: data ready ({len(train_split)} train) {time.time() - t0:.0f}s")
    net = build(spec, seed=cfg.seed)
    curves = train(net, train_split, val_split, cfg,
                   curves_path=curves_path, class_ids=ids)
    ids_arr = np.asarray(ids, dtype=np.int64)
    top1, hub = evaluate(net, test_split.values,
                         class_labels(test_split.model_ids, ids_arr),
                         np.asarray(test_split.thetas), cfg.huber_delta)
    save_checkpoint(net, out, cfg.seed, cfg, ids,
                    extra={"val_acc": curves[-1]["val_acc"]})
    result = {
        "name": name,
        "test_top1": top1,
        "test_huber": hub,
        "val_acc": curves[-1]["val_acc"],
        "minutes": (time.time() - t0) / 60.0,
    }
    with open(os.path.join(out, "result.json"), "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=1)
    log(f"done {name}: top1={top1:.4f} huber={hub:.4f} "
        f"({result['minutes']:.1f} min)")


def main() -> None:
    os.makedirs(RUNS_DIR, exist_ok=True)
    log_path = os.path.join(ROOT, ".acceptance", "queue_log.txt")
    sink = open(log_path, "a", encoding="utf-8", buffering=1)

    def log(msg: str) -> None:
        stamp = time.strftime("%H:%M:%S")
        sink.write(f"[{stamp}] {msg}\n")
        print(msg, flush=True)

    k5 = lambda: _splits_k(5, TRAIN_SEED_K5)
    k20 = lambda: _splits_k(20, TRAIN_SEED_K20)
    queue = []
    for seed in (0, 1, 2):
        queue.append((f"c2_nsa_k5_s{seed}",
                      BuildSpec("small", "nsa", 5, 10),
                      TrainConfig(seed=seed), k5))
    for seed in (0, 1, 2):
        queue.append((f"c3_psa3_k5_s{seed}",
                      BuildSpec("small", "psa", 5, 10, shared=3),
                      TrainConfig(seed=seed), k5))
    queue.append(("c6_psa3_k20_s0",
                  BuildSpec("small", "psa", 20, 10, shared=3),
                  TrainConfig(seed=0, clip_norm=10.0), k20))
    queue.append(("c7_reg_n100",
                  BuildSpec("medium", "fsa", 7, 10, channels=2),
                  TrainConfig(seed=0, lam=0.0, clip_norm=10.0),
                  lambda: _splits_reg(100)))
    queue.append(("c7_reg_n400",
                  BuildSpec("medium", "fsa", 7, 20, channels=2),
                  TrainConfig(seed=0, lam=0.0, clip_norm=10.0),
                  lambda: _splits_reg(400)))

    log(f"queue start: {len(queue)} runs")
    for name, spec, cfg, data_fn in queue:
        try:
            run_one(name, spec, cfg, data_fn, log)
        except Exception as err:
            log(f"FAILED {name}: {type(err).__name__}: {err}")
    log("queue finished")
    sink.close()


if __name__ == "__main__":
    main()
