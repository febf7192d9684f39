"""Goalkeeper penalty-kick policy simulation and optimization toolkit."""

from .core import (
    GoalkeeperProfile,
    PenaltyRecord,
    PolicySpec,
    UncertaintyParams,
    classify_zone,
    distance_to_keeper,
    natural_corner_sign,
    pressure_label,
)
from .simulator import EmpiricalTables, ModelBundle, evaluate_policy, p_save_given_correct

__version__ = "0.1.0"

__all__ = [
    "EmpiricalTables",
    "GoalkeeperProfile",
    "ModelBundle",
    "PenaltyRecord",
    "PolicySpec",
    "UncertaintyParams",
    "classify_zone",
    "distance_to_keeper",
    "evaluate_policy",
    "natural_corner_sign",
    "p_save_given_correct",
    "pressure_label",
]
