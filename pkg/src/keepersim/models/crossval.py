"""Grouped nested cross-validation with hyperparameter grid search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import PenaltyRecord
from ..features import grouped_folds
from .boosting import HyperParams, ModelError, N_CLASSES, train, predict_direction, predict_distance
from .metrics import logloss


def _fold_metric(task: str, predictions: np.ndarray, y: np.ndarray) -> float:
    if task == "multiclass_3":
        return logloss(predictions, y)
    return float(np.mean((predictions - y) ** 2))


def _predict(task: str, model, X: np.ndarray) -> np.ndarray:
    return predict_direction(model, X) if task == "multiclass_3" else predict_distance(model, X)


def _base_predictions(task: str, y_train: np.ndarray, n: int) -> np.ndarray:
    """Fold-train base model: class frequencies or the mean distance."""
    if task == "multiclass_3":
        freqs = np.bincount(y_train.astype(int), minlength=N_CLASSES) / len(y_train)
        return np.tile(freqs, (n, 1))
    return np.full(n, float(np.mean(y_train)))


@dataclass
class NestedCVResult:
    task: str
    fold_of_record: np.ndarray
    chosen_hp: list[HyperParams]
    oof_predictions: np.ndarray
    per_fold_metric: list[float]
    per_fold_base_metric: list[float]
    metric_mean: float
    metric_std: float
    base_mean: float
    base_std: float

    def summary(self) -> str:
        name = "logloss" if self.task == "multiclass_3" else "squared error"
        return (
            f"{name}: {self.metric_mean:.3f} ± {self.metric_std:.3f} "
            f"(base {self.base_mean:.3f} ± {self.base_std:.3f})"
        )


def nested_cv(
    records: Sequence[PenaltyRecord],
    feature_matrix: np.ndarray,
    labels: np.ndarray,
    task: str,
    k_outer: int,
    hp_grid: Sequence[HyperParams],
    seed: int,
    k_inner: int = 3,
) -> NestedCVResult:
    """Outer grouped folds for evaluation, inner grouped folds for selection.

    Every taker's kicks stay inside a single outer fold, so no out-of-fold
    prediction comes from a model that saw the same taker.  Hyperparameters
    are chosen per outer fold by grid search on the inner out-of-fold metric;
    grid-order breaks ties.
    """
    if len(hp_grid) == 0:
        raise ModelError("hyperparameter grid is empty")
    X = np.asarray(feature_matrix, dtype=float)
    y = np.asarray(labels)
    if len(records) != X.shape[0] or len(records) != y.shape[0]:
        raise ModelError("records, features, and labels must align")

    outer = grouped_folds(records, k_outer, seed)
    oof = (
        np.full((len(y), N_CLASSES), np.nan) if task == "multiclass_3" else np.full(len(y), np.nan)
    )
    chosen: list[HyperParams] = []
    fold_metrics: list[float] = []
    base_metrics: list[float] = []

    for fold in range(k_outer):
        test_mask = outer == fold
        train_idx = np.flatnonzero(~test_mask)
        test_idx = np.flatnonzero(test_mask)
        train_records = [records[i] for i in train_idx]

        if len(hp_grid) == 1:
            best_hp = hp_grid[0]
        else:
            inner = grouped_folds(train_records, k_inner, seed + 1 + fold)
            scores = []
            for hp in hp_grid:
                preds = (
                    np.empty((len(train_idx), N_CLASSES))
                    if task == "multiclass_3"
                    else np.empty(len(train_idx))
                )
                for inner_fold in range(k_inner):
                    val_mask = inner == inner_fold
                    fit_idx = train_idx[~val_mask]
                    val_idx = train_idx[val_mask]
                    model = train(task, X[fit_idx], y[fit_idx], hp, seed=seed)
                    preds[val_mask] = _predict(task, model, X[val_idx])
                scores.append(_fold_metric(task, preds, y[train_idx]))
            best_hp = hp_grid[int(np.argmin(scores))]
        chosen.append(best_hp)

        model = train(task, X[train_idx], y[train_idx], best_hp, seed=seed)
        preds = _predict(task, model, X[test_idx])
        oof[test_idx] = preds
        fold_metrics.append(_fold_metric(task, preds, y[test_idx]))
        base = _base_predictions(task, y[train_idx], len(test_idx))
        base_metrics.append(_fold_metric(task, base, y[test_idx]))

    return NestedCVResult(
        task=task,
        fold_of_record=outer,
        chosen_hp=chosen,
        oof_predictions=oof,
        per_fold_metric=fold_metrics,
        per_fold_base_metric=base_metrics,
        metric_mean=float(np.mean(fold_metrics)),
        metric_std=float(np.std(fold_metrics)),
        base_mean=float(np.mean(base_metrics)),
        base_std=float(np.std(base_metrics)),
    )
