"""Error metrics and report serialization.

MAPE follows the percentage convention 100/T * sum |(y - yhat)/y| and is
reported as None (undefined) whenever any target is exactly zero; the other
metrics are always defined. std_dev_error is the population (1/n) standard
deviation of the signed residuals.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import os

import numpy as np

__all__ = [
    "MetricsReport",
    "compute_metrics",
    "metrics_to_dict",
    "save_metrics_json",
    "append_comparison_row",
]


@dataclass
class MetricsReport:
    mse: float
    mape_percent: float | None
    max_abs_error: float
    std_dev_error: float
    n: int


def compute_metrics(pred, target) -> MetricsReport:
    """Metrics over paired scalar sequences."""
    pred = np.asarray(pred, dtype=float).ravel()
    target = np.asarray(target, dtype=float).ravel()
    if pred.shape != target.shape:
        raise ValueError(f"length mismatch: pred {pred.shape} vs target {target.shape}")
    if pred.size == 0:
        raise ValueError("empty input")
    resid = pred - target
    mse = float(np.mean(resid**2))
    if (target == 0.0).any():
        mape = None
    else:
        mape = float(100.0 * np.mean(np.abs(resid / target)))
    return MetricsReport(
        mse=mse,
        mape_percent=mape,
        max_abs_error=float(np.max(np.abs(resid))),
        std_dev_error=float(np.std(resid)),
        n=int(pred.size),
    )


def metrics_to_dict(report: MetricsReport, model_id: str = "", dataset_id: str = "") -> dict:
    return {
        "mse": report.mse,
        "mape_percent": report.mape_percent,
        "max_abs_error": report.max_abs_error,
        "std_dev_error": report.std_dev_error,
        "n": report.n,
        "model_id": model_id,
        "dataset_id": dataset_id,
    }


def save_metrics_json(report: MetricsReport, path, model_id: str = "", dataset_id: str = "") -> None:
    with open(path, "w") as fh:
        json.dump(metrics_to_dict(report, model_id, dataset_id), fh, indent=2, sort_keys=True)
        fh.write("\n")


COMPARISON_HEADER = "model,mse,mape_percent,max_abs_error,std_dev_error,n"


def append_comparison_row(path, model_name: str, report: MetricsReport) -> None:
    """Append one model row to a comparison table, creating the header first.

    Stacking the FCM, MLP, and KA-FCM rows for one dataset yields the usual
    three-row comparison layout.
    """
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    mape = "" if report.mape_percent is None else repr(report.mape_percent)
    with open(path, "a") as fh:
        if new:
            fh.write(COMPARISON_HEADER + "\n")
        fh.write(
            f"{model_name},{report.mse!r},{mape},{report.max_abs_error!r},{report.std_dev_error!r},{report.n}\n"
        )
