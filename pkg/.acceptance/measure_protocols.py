"""Full-test-set accuracy for every baseline fit variant (protocol pick)."""

import json
import sys
import time

sys.path.insert(0, "/root/pkg/src")
import numpy as np

from statsel.baselines import rank_batch
from statsel.data import generate_test
from statsel.models import top_models

OUT = "/root/pkg/.acceptance/protocols.json"


def top1(rankings, true_ids):
    return float(np.mean([r.order[0][0] == t for r, t in zip(rankings, true_ids)]))


def main():
    models = top_models(20)
    results = {}
    t_all = time.time()

    tests, _ = generate_test(models, n=100, seed=0)
    split = tests["test"]
    vals = split.values.astype(np.float64)
    true = split.model_ids

    jobs = [
        ("ks_mle", ("ks",), dict(ks_fit="mle")),
        ("ks_grid_r1", ("ks",), dict(ks_fit="grid", refine=1)),
        ("bic_grid", ("bic",), dict(bic_fit="grid")),
        ("bf", ("bf",), dict()),
        ("ks_grid_r5", ("ks",), dict(ks_fit="grid", refine=5)),
        ("bic_mle", ("bic",), dict(bic_fit="mle")),
    ]
    for name, methods, kw in jobs:
        t0 = time.time()
        got = rank_batch(vals, models, methods=methods, **kw)
        acc = top1(got[methods[0]], true)
        top2 = float(np.mean([r.hit(t, 2) for r, t in zip(got[methods[0]], true)]))
        results[name] = {"top1": acc, "top2": top2, "minutes": (time.time() - t0) / 60}
        print(name, results[name], flush=True)
        with open(OUT, "w") as fh:
            json.dump(results, fh, indent=1)

    tests9, _ = generate_test(models, n=900, seed=0)
    split9 = tests9["test"]
    vals9 = split9.values.astype(np.float64)
    true9 = split9.model_ids
    for name, methods, kw in [
        ("ks900_mle", ("ks",), dict(ks_fit="mle")),
        ("ks900_grid_r1", ("ks",), dict(ks_fit="grid", refine=1)),
    ]:
        t0 = time.time()
        got = rank_batch(vals9, models, methods=methods, **kw)
        acc = top1(got[methods[0]], true9)
        results[name] = {"top1": acc, "minutes": (time.time() - t0) / 60}
        print(name, results[name], flush=True)
        with open(OUT, "w") as fh:
            json.dump(results, fh, indent=1)

    results["total_minutes"] = (time.time() - t_all) / 60
    with open(OUT, "w") as fh:
        json.dump(results, fh, indent=1)
    print("done", results["total_minutes"])


if __name__ == "__main__":
    main()
