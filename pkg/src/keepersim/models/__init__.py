"""Learned direction/distance predictors, their metrics, and cross-validation."""

from .boosting import (
    BoostedModel,
    HyperParams,
    ModelError,
    default_grid,
    load_model,
    predict_direction,
    predict_distance,
    save_model,
    schema_hash,
    train,
)
from .crossval import NestedCVResult, nested_cv
from .metrics import (
    CalibrationBin,
    ThresholdAccuracy,
    brier,
    calibration_bins,
    logloss,
    threshold_accuracy,
)

__all__ = [
    "BoostedModel",
    "HyperParams",
    "ModelError",
    "NestedCVResult",
    "CalibrationBin",
    "ThresholdAccuracy",
    "brier",
    "calibration_bins",
    "default_grid",
    "load_model",
    "logloss",
    "nested_cv",
    "predict_direction",
    "predict_distance",
    "save_model",
    "schema_hash",
    "threshold_accuracy",
    "train",
]
