"""Flat serialization of penalty records: CSV and line-delimited JSON.

One record per row/line, field names exactly matching ``PenaltyRecord``.
Missing values are empty cells in CSV and ``null`` in JSON.  Writers emit
deterministic byte-identical output for identical inputs.
"""

from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path
from typing import Iterable, Sequence

from .core import GOAL_HALF_WIDTH, GOAL_HEIGHT, PenaltyRecord

FIELDS = [
    "kick_id",
    "match_id",
    "taker_id",
    "keeper_id",
    "minute",
    "is_shootout",
    "shootout_kick_index",
    "shootout_team_kick_index",
    "goal_diff",
    "foot",
    "taker_strategy",
    "end_x",
    "end_z",
    "outcome",
    "keeper_dive_zone",
    "keeper_timing",
    "pressure",
]

_INT_FIELDS = {"minute", "goal_diff", "shootout_kick_index", "shootout_team_kick_index"}
_FLOAT_FIELDS = {"end_x", "end_z"}
_BOOL_FIELDS = {"is_shootout"}


def record_to_dict(rec: PenaltyRecord) -> dict:
    return {name: getattr(rec, name) for name in FIELDS}


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(name: str, raw: str):
    if raw == "" or raw == "null":
        return None
    if name in _BOOL_FIELDS:
        if raw in ("true", "True", "1"):
            return True
        if raw in ("false", "False", "0"):
            return False
        raise ValueError(f"bad boolean {raw!r} in column {name}")
    if name in _INT_FIELDS:
        return int(raw)
    if name in _FLOAT_FIELDS:
        return float(raw)
    return raw


def dict_to_record(row: dict) -> PenaltyRecord:
    """Build a record from parsed fields, reconciling the outcome flag with coordinates.

    When the explicit outcome flag and the coordinates disagree about whether
    the kick was on target, the flag wins and a warning is emitted.
    """
    kwargs = dict(row)
    out_of_mouth = (
        abs(kwargs["end_x"]) > GOAL_HALF_WIDTH or not 0.0 <= kwargs["end_z"] <= GOAL_HEIGHT
    )
    if out_of_mouth and kwargs["outcome"] != "off_target":
        warnings.warn(
            f"kick {kwargs.get('kick_id')}: coordinates lie outside the goal mouth but "
            f"outcome is {kwargs['outcome']!r}; keeping the explicit flag",
            stacklevel=2,
        )
    return PenaltyRecord(**kwargs)


def write_csv(records: Iterable[PenaltyRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIELDS)
        for rec in records:
            writer.writerow([_cell(getattr(rec, name)) for name in FIELDS])


def read_csv(path: str | Path) -> list[PenaltyRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [f for f in FIELDS if f not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        for row in reader:
            parsed = {name: _parse(name, row[name]) for name in FIELDS}
            records.append(dict_to_record(parsed))
    return records


def write_jsonl(records: Iterable[PenaltyRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def read_jsonl(path: str | Path) -> list[PenaltyRecord]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            records.append(dict_to_record(json.loads(line)))
    return records


def write_table(rows: Sequence[dict], path: str | Path, columns: Sequence[str] | None = None) -> None:
    """Write a plot-ready CSV table from a list of homogeneous dicts."""
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
