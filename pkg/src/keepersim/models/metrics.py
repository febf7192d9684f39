"""Evaluation metrics for the direction and distance predictors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PROB_CLIP = 1e-15


def logloss(predictions: np.ndarray, labels: np.ndarray) -> float:
    """Mean negative log probability of the true class.

    ``predictions`` is (n, k) class probabilities, ``labels`` integer class
    indices.  Probabilities are clipped to [1e-15, 1-1e-15] before the log.
    """
    predictions = np.asarray(predictions, dtype=float)
    labels = np.asarray(labels)
    if predictions.shape[0] != labels.shape[0]:
        raise ValueError(
            f"length mismatch: {predictions.shape[0]} predictions vs {labels.shape[0]} labels"
        )
    p_true = predictions[np.arange(len(labels)), labels]
    p_true = np.clip(p_true, PROB_CLIP, 1.0 - PROB_CLIP)
    return float(-np.mean(np.log(p_true)))


def brier(predicted_probs: np.ndarray, binary_outcomes: np.ndarray) -> float:
    """Mean squared difference between predicted probability and binary outcome."""
    p = np.asarray(predicted_probs, dtype=float)
    y = np.asarray(binary_outcomes, dtype=float)
    if p.shape != y.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {y.shape}")
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("probabilities must be in [0,1]")
    return float(np.mean((p - y) ** 2))


@dataclass(frozen=True)
class CalibrationBin:
    lo: float
    hi: float
    mean_predicted: float  # NaN when empty
    observed_frequency: float  # NaN when empty
    count: int


def calibration_bins(
    predicted_probs: np.ndarray, outcomes: np.ndarray, n_bins: int = 10
) -> list[CalibrationBin]:
    """Equal-width reliability bins on [0,1]; empty bins keep count 0 and NaN frequency."""
    if n_bins < 2:
        raise ValueError(f"n_bins must be >= 2, got {n_bins}")
    p = np.asarray(predicted_probs, dtype=float)
    y = np.asarray(outcomes, dtype=float)
    if p.shape != y.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {y.shape}")
    # bin i covers [i/n, (i+1)/n); the last bin also includes 1.0
    idx = np.minimum((p * n_bins).astype(int), n_bins - 1)
    bins = []
    for i in range(n_bins):
        mask = idx == i
        count = int(mask.sum())
        if count:
            bins.append(
                CalibrationBin(
                    lo=i / n_bins,
                    hi=(i + 1) / n_bins,
                    mean_predicted=float(p[mask].mean()),
                    observed_frequency=float(y[mask].mean()),
                    count=count,
                )
            )
        else:
            bins.append(CalibrationBin(i / n_bins, (i + 1) / n_bins, float("nan"), float("nan"), 0))
    return bins


@dataclass(frozen=True)
class ThresholdAccuracy:
    threshold: float
    accuracy: float
    mean_baseline: float
    random_baseline: float


def threshold_accuracy(
    predicted_dists: np.ndarray,
    actual_dists: np.ndarray,
    threshold: float,
    train_mean: float | None = None,
    train_within_rate: float | None = None,
) -> ThresholdAccuracy:
    """Fraction of kicks where prediction and actual fall on the same side of the threshold.

    The mean baseline predicts ``train_mean`` for every kick; the random
    baseline guesses "within reach" with probability ``train_within_rate``
    and scores q^2 + (1-q)^2 in expectation against the actual side rate q.
    Both default to statistics of ``actual_dists`` when no training values
    are supplied.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    pred = np.asarray(predicted_dists, dtype=float)
    actual = np.asarray(actual_dists, dtype=float)
    if pred.shape != actual.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {actual.shape}")
    within_pred = pred <= threshold
    within_actual = actual <= threshold
    accuracy = float(np.mean(within_pred == within_actual))

    mean_value = float(np.mean(actual)) if train_mean is None else train_mean
    mean_baseline = float(np.mean((mean_value <= threshold) == within_actual))

    q = float(np.mean(within_actual))
    guess = q if train_within_rate is None else train_within_rate
    random_baseline = guess * q + (1.0 - guess) * (1.0 - q)

    return ThresholdAccuracy(
        threshold=threshold,
        accuracy=accuracy,
        mean_baseline=mean_baseline,
        random_baseline=random_baseline,
    )
