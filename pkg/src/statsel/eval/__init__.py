"""Evaluation harness: reports, regression pipeline, real-data apply."""

from .metrics import (EvalReport, evaluate_selector, evaluate_estimator,
                      aggregate_runs, baseline_scorer, report_from_json)
from .regression import train_regression_selector
from .apply import ApplyResult, read_numeric_column, apply_sample, apply_csv
from .report import (LearningCurves, load_curves, selection_rows,
                     estimation_rows, baseline_rows, write_csv)

__all__ = [
    "EvalReport", "evaluate_selector", "evaluate_estimator",
    "aggregate_runs", "baseline_scorer", "report_from_json",
    "train_regression_selector",
    "ApplyResult", "read_numeric_column", "apply_sample", "apply_csv",
    "LearningCurves", "load_curves", "selection_rows", "estimation_rows",
    "baseline_rows", "write_csv",
]
