"""Shared parsing of profiles, params, policies, and artifact bundles."""

from __future__ import annotations

import csv
import json

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..core import DomainError, GoalkeeperProfile, PolicySpec, UncertaintyParams
from ..models.boosting import BoostedModel, load_model
from ..simulator import EmpiricalTables, ModelBundle

ENV_ARTIFACTS = "KEEPERSIM_ARTIFACTS"
ENV_PORT = "KEEPERSIM_PORT"

DIRECTION_MODEL_FILE = "direction_model.json"
DISTANCE_MODEL_FILE = "distance_model.json"
TABLES_FILE = "tables.json"


def profile_from_dict(payload: dict) -> GoalkeeperProfile:
    allowed = {
        "early_range",
        "late_range",
        "p_late_correct_independent",
        "p_late_correct_dependent",
        "p_early_correct_dependent",
        "start_offset",
    }
    unknown = set(payload) - allowed
    if unknown:
        raise DomainError(f"unknown profile fields {sorted(unknown)}")
    if "early_range" not in payload:
        raise DomainError("profile needs early_range")
    return GoalkeeperProfile(**payload)


def params_from_dict(payload: Optional[dict]) -> UncertaintyParams:
    if not payload:
        return UncertaintyParams()
    unknown = set(payload) - {"mu", "rho"}
    if unknown:
        raise DomainError(f"unknown uncertainty fields {sorted(unknown)}")
    return UncertaintyParams(**payload)


def policy_from_dict(payload: dict) -> PolicySpec:
    allowed = {"kind", "offset", "early_direction_mix", "gt_mix"}
    unknown = set(payload) - allowed
    if unknown:
        raise DomainError(f"unknown policy fields {sorted(unknown)}")
    kwargs = dict(payload)
    for field in ("early_direction_mix", "gt_mix"):
        if kwargs.get(field) is not None:
            kwargs[field] = tuple(kwargs[field])
    return PolicySpec(**kwargs)


def load_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def dump_json(payload, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_tables(tables: EmpiricalTables, path: str | Path) -> None:
    dump_json(tables.to_dict(), path)


def load_tables(path: str | Path) -> EmpiricalTables:
    return EmpiricalTables.from_dict(load_json(path))


@dataclass
class Artifacts:
    """Model and table files a service or simulate run needs, loaded once."""

    direction: Optional[BoostedModel] = None
    distance: Optional[BoostedModel] = None
    tables: Optional[EmpiricalTables] = None

    @property
    def models(self) -> ModelBundle:
        return ModelBundle(direction=self.direction, distance=self.distance)

    @classmethod
    def from_dir(cls, root: str | Path) -> "Artifacts":
        root = Path(root)
        art = cls()
        if (root / DIRECTION_MODEL_FILE).exists():
            art.direction = load_model(root / DIRECTION_MODEL_FILE)
        if (root / DISTANCE_MODEL_FILE).exists():
            art.distance = load_model(root / DISTANCE_MODEL_FILE)
        if (root / TABLES_FILE).exists():
            art.tables = load_tables(root / TABLES_FILE)
        return art


def read_payoff_csv(path: str | Path):
    from ..gametheory import payoff_from_rows

    with open(path, newline="") as fh:
        return payoff_from_rows(list(csv.DictReader(fh)))
