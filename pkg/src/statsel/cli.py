"""Command-line front end: dataset generation, training, evaluation.

Every verb reads or writes machine-first artifacts (binary datasets,
checkpoint directories, JSON reports, JSONL rankings); tables for
humans are rendered from those by `report`. STATSEL_THREADS caps the
worker count of parallel evaluation.
"""

import argparse
import glob
import json
import os
import sys
import time

import numpy as np

from . import baselines
from .errors import ConfigError, StatselError
from .models import REGRESSION_MODELS, registry_json, top_models
from .data import generate_labeled, generate_regression, generate_test
from .data.binio import load_manifest, load_split, save_dataset
from .data.records import matrix_side
from .arch import BuildSpec, TrainConfig, build, multitask_check, train
from .arch.checkpoint import load_checkpoint, save_checkpoint
from .nn import layer_battery
from . import eval as harness


def _model_set(tag: str):
    """Roster named on the command line: top5, top20, top50."""
    if tag.startswith("top") and tag[3:].isdigit():
        return top_models(int(tag[3:]))
    raise ConfigError(f"unknown model set {tag!r}, expected e.g. top5|top20|top50")


def _workers(requested: int) -> int:
    cap = os.environ.get("STATSEL_THREADS")
    if cap:
        return max(1, min(requested, int(cap)))
    return max(1, requested)


def cmd_gen(args) -> int:
    splits, manifest = generate_labeled(_model_set(args.models), n=args.n,
                                        n_k=args.grid, d=args.reps,
                                        seed=args.seed)
    manifest = save_dataset(args.out, manifest, **splits)
    print(json.dumps({"out": args.out,
                      "records": manifest["record_counts"]}))
    return 0


def cmd_gen_test(args) -> int:
    splits, manifest = generate_test(_model_set(args.models), n=args.n,
                                     n_test_params=args.params,
                                     reps=args.reps, seed=args.seed,
                                     grid_n=args.grid)
    manifest = save_dataset(args.out, manifest, **splits)
    print(json.dumps({"out": args.out,
                      "records": manifest["record_counts"]}))
    return 0


def cmd_gen_reg(args) -> int:
    splits, manifest = generate_regression(REGRESSION_MODELS, n=args.n,
                                           coef_grid=args.grid, d=args.reps,
                                           seed=args.seed)
    manifest = save_dataset(args.out, manifest, **splits)
    print(json.dumps({"out": args.out,
                      "records": manifest["record_counts"]}))
    return 0


def _train_config(args) -> TrainConfig:
    return TrainConfig(iterations=args.iters, batch=args.batch, lr=args.lr,
                       lam=args.lam, seed=args.seed,
                       clip_norm=args.clip_norm)


def cmd_train(args) -> int:
    train_split = load_split(args.data, "train")
    val_split = load_split(args.data, "val")
    manifest = load_manifest(args.data)
    side = matrix_side(train_split.n // manifest.get("channels", 1))
    spec = BuildSpec(size=args.arch, sa=args.sa, k=args.k, input_side=side,
                     channels=manifest.get("channels", 1),
                     shared=args.shared)
    cfg = _train_config(args)
    net = build(spec, seed=cfg.seed)
    class_ids = np.unique(np.asarray(train_split.model_ids))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    started = time.time()
    curves = train(net, train_split, val_split, cfg,
                   curves_path=os.path.join(args.out, "curves.jsonl")
                   if args.out else None, class_ids=class_ids)
    if args.out:
        save_checkpoint(net, args.out, cfg.seed, cfg, class_ids)
    last = curves[-1] if curves else {}
    print(json.dumps({"out": args.out, "iterations": cfg.iterations,
                      "val_acc": last.get("val_acc"),
                      "val_huber": last.get("val_huber"),
                      "minutes": round((time.time() - started) / 60.0, 2)}))
    return 0


def cmd_train_reg(args) -> int:
    splits = {name: load_split(args.data, name)
              for name in ("train", "val", "test")}
    cfg = _train_config(args)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    started = time.time()
    net, report = harness.train_regression_selector(
        splits, cfg, curves_path=os.path.join(args.out, "curves.jsonl")
        if args.out else None)
    if args.out:
        class_ids = [int(c) for c in report.meta["class_ids"]]
        save_checkpoint(net, args.out, cfg.seed, cfg, class_ids)
    print(json.dumps({"out": args.out, "test_top1": report.top1_acc,
                      "test_top2": report.top2_acc,
                      "minutes": round((time.time() - started) / 60.0, 2)}))
    return 0


def cmd_eval(args) -> int:
    net, meta = load_checkpoint(args.ckpt)
    test = load_split(args.test, "test")
    run_meta = {key: meta[key] for key in ("size", "sa", "k", "n", "seed")}
    report = harness.evaluate_selector(net, test, class_ids=meta["class_ids"],
                                       meta=run_meta)
    delta = meta["hyperparameters"].get("huber_delta", 1.0)
    est = harness.evaluate_estimator(net, test, delta=delta)
    report.huber, report.rmse = est.huber, est.rmse
    report.meta["huber_delta"] = delta
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def cmd_baseline(args) -> int:
    models = _model_set(args.models)
    test = load_split(args.test, "test")
    ranked = baselines.rank_batch(test.values, models,
                                  methods=(args.method,), grid_n=args.grid_n,
                                  workers=_workers(args.workers),
                                  refine=args.refine, ks_fit=args.ks_fit,
                                  bic_fit=args.bic_fit)[args.method]
    lines = baselines.ranking_lines(ranked, test.model_ids)
    with open(args.out, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(json.dumps(line) + "\n")
    hits1 = sum(bool(line["top1_hit"]) for line in lines)
    hits2 = sum(bool(line["top2_hit"]) for line in lines)
    print(json.dumps({"method": args.method, "records": len(lines),
                      "top1": hits1 / len(lines), "top2": hits2 / len(lines),
                      "out": args.out}))
    return 0


def cmd_gradcheck(args) -> int:
    tol = args.tol
    errs = layer_battery(seed=args.seed)
    spec = BuildSpec(size=args.arch, sa=args.sa, k=args.k,
                     input_side=matrix_side(args.n), shared=args.shared)
    for name, err in multitask_check(spec, seed=args.seed).items():
        errs[f"network.{name}"] = err
    worst = max(errs.values())
    for name in sorted(errs):
        flag = "ok" if errs[name] < tol else "FAIL"
        print(f"{flag:4s} {name:40s} {errs[name]:.3e}")
    print(f"max relative error: {worst:.3e} (tolerance {tol:g})")
    return 0 if worst < tol else 1


def cmd_apply(args) -> int:
    result = harness.apply_csv(args.ckpt, args.csv, args.column,
                               seed=args.seed, bins=args.bins)
    text = result.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(json.dumps({"model": result.model_name, "theta": result.theta,
                      "skipped": result.skipped}))
    return 0


def cmd_list_models(args) -> int:
    if args.json:
        print(json.dumps(registry_json(), indent=2))
        return 0
    for row in registry_json():
        space = f"[{row['param_space']['lo']:g}, {row['param_space']['hi']:g}]"
        print(f"{row['model_id']:3d} {row['name']:28s} "
              f"{row['param_name']:12s} {space}")
    print(f"regression families: "
          f"{', '.join(s.name for s in REGRESSION_MODELS)}")
    return 0


def cmd_report(args) -> int:
    reports = []
    for pattern in args.reports or []:
        for path in sorted(glob.glob(pattern)):
            with open(path, encoding="utf-8") as fh:
                reports.append(harness.report_from_json(fh.read()))
    if args.selection:
        if not reports:
            raise ConfigError("selection table needs --reports files")
        harness.write_csv(args.selection, harness.selection_rows(reports))
        print(f"wrote {args.selection}")
    if args.estimation:
        if not reports:
            raise ConfigError("estimation table needs --reports files")
        harness.write_csv(args.estimation, harness.estimation_rows(reports))
        print(f"wrote {args.estimation}")
    if args.baseline:
        named = []
        for item in args.baseline:
            if "=" not in item:
                raise ConfigError(f"--baseline wants NAME=PATH, got {item!r}")
            named.append(tuple(item.split("=", 1)))
        harness.write_csv(args.baselines_out, harness.baseline_rows(named))
        print(f"wrote {args.baselines_out}")
    return 0


def _add_gen_flags(p, reps_default: int):
    p.add_argument("--models", default="top5")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--grid", type=int, default=11)
    p.add_argument("--reps", type=int, default=reps_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)


def _add_train_flags(p):
    p.add_argument("--data", required=True)
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--clip-norm", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statsel",
        description="Neural model selection with classical baselines")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="labeled training/validation dataset")
    _add_gen_flags(p, reps_default=1000)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("gen-test", help="held-out test dataset")
    _add_gen_flags(p, reps_default=10)
    p.add_argument("--params", type=int, default=100)
    p.set_defaults(fn=cmd_gen_test)

    p = sub.add_parser("gen-reg", help="regression-selector dataset")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--grid", type=int, default=5)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen_reg)

    p = sub.add_parser("train", help="train selector + estimator")
    p.add_argument("--arch", choices=("small", "medium", "large"),
                   default="small")
    p.add_argument("--sa", choices=("nsa", "fsa", "psa"), default="nsa")
    p.add_argument("--shared", type=int, default=0)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, default=100)
    _add_train_flags(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("train-reg", help="train the regression selector")
    _add_train_flags(p)
    p.set_defaults(fn=cmd_train_reg)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a test set")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", default="")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("baseline", help="classical selector rankings")
    p.add_argument("--method", choices=baselines.METHODS, required=True)
    p.add_argument("--models", default="top20")
    p.add_argument("--test", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grid-n", type=int, default=10)
    p.add_argument("--refine", type=int, default=baselines.REFINE)
    p.add_argument("--ks-fit", choices=baselines.FIT_MODES, default="grid")
    p.add_argument("--bic-fit", choices=baselines.FIT_MODES, default="mle")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("gradcheck", help="finite-difference gradient checks")
    p.add_argument("--arch", choices=("small", "medium", "large"),
                   default="small")
    p.add_argument("--sa", choices=("nsa", "fsa", "psa"), default="nsa")
    p.add_argument("--shared", type=int, default=0)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(fn=cmd_gradcheck)

    p = sub.add_parser("apply", help="apply a checkpoint to a CSV column")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--column", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--out", default="")
    p.set_defaults(fn=cmd_apply)

    p = sub.add_parser("list-models", help="print the model registry")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_list_models)

    p = sub.add_parser("report", help="render CSV tables from run reports")
    p.add_argument("--reports", nargs="*", help="report JSON globs")
    p.add_argument("--selection", default="")
    p.add_argument("--estimation", default="")
    p.add_argument("--baseline", action="append",
                   help="NAME=results.jsonl, repeatable")
    p.add_argument("--baselines-out", default="baselines.csv")
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except StatselError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
