"""Per-kick feature extraction and player-grouped cross-validation folds.

Each kick is described by 47 numeric features computed strictly from kicks
taken before it, so extraction is causal.  Unknown values are NaN and the
learned models route them natively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    GOAL_HALF_WIDTH,
    DomainError,
    PenaltyRecord,
    distance_to_center,
    nominal_zone,
    pressure_label,
)

NEAR_POST_M = 0.5  # kicks placed within 50 cm of either post

CONTEXTUAL = (
    "minute",
    "is_shootout",
    "goal_diff",
    "shootout_kicks_taken",
    "own_team_kicks_taken",
    "miss_means_loss",
    "goal_means_win",
)
GENERAL = ("preferred_foot", "position_line", "age", "keeper_height_cm")
EXPERIENCE = ("pens_taken", "pens_scored", "pens_normal_pressure", "pens_high_pressure")
PREFERENCE = (
    "pct_to_natural",
    "pct_to_nonnatural",
    "pct_to_center",
    "pct_scored_natural",
    "pct_scored_nonnatural",
    "pct_scored_center",
    "first_pen_goal",
    "first_pen_saved",
    "first_pen_missed",
    "first_pen_natural",
    "first_pen_center",
    "first_pen_nonnatural",
    "last_pen_goal",
    "last_pen_saved",
    "last_pen_missed",
    "last_pen_natural",
    "last_pen_center",
    "last_pen_nonnatural",
)
DISTANCE = ("avg_dist_from_center", "n_kicks_near_post")
SHOOTOUT = (
    "opp_last_goal",
    "opp_last_saved",
    "opp_last_missed",
    "opp_last_natural",
    "opp_last_center",
    "opp_last_nonnatural",
    "own_last_goal",
    "own_last_saved",
    "own_last_missed",
    "own_last_natural",
    "own_last_center",
    "own_last_nonnatural",
)

FEATURE_NAMES: tuple[str, ...] = CONTEXTUAL + GENERAL + EXPERIENCE + PREFERENCE + DISTANCE + SHOOTOUT
assert len(FEATURE_NAMES) == 47

FEATURE_GROUPS = {
    **{name: "contextual" for name in CONTEXTUAL},
    **{name: "general" for name in GENERAL},
    **{name: "experience" for name in EXPERIENCE},
    **{name: "preference" for name in PREFERENCE},
    **{name: "distance" for name in DISTANCE},
    **{name: "shootout" for name in SHOOTOUT},
}

FOOT_CODES = {"right": 0.0, "left": 1.0}
POSITION_CODES = {"goalkeeper": 0.0, "defender": 1.0, "midfielder": 2.0, "striker": 3.0}

REGULATION_KICKS_PER_TEAM = 5


@dataclass(frozen=True)
class PlayerMeta:
    """Optional biographical data; anything unknown stays NaN in the features."""

    position_line: Optional[str] = None
    age: Optional[float] = None
    height_cm: Optional[float] = None


@dataclass(frozen=True)
class ShootoutState:
    """State of an ongoing shootout just before the kick, from the kicker's team perspective."""

    kicks_taken: int
    own_kicks_taken: int
    opp_kicks_taken: int
    own_scored: int
    opp_scored: int
    own_last: Optional[tuple[str, str]] = None  # (result, zone), result in goal/saved/missed
    opp_last: Optional[tuple[str, str]] = None


def _result_label(outcome: str) -> str:
    return {"goal": "goal", "saved": "saved", "off_target": "missed"}[outcome]


def _one_hot(value: Optional[str], order: Sequence[str]) -> list[float]:
    if value is None:
        return [math.nan] * len(order)
    return [1.0 if value == v else 0.0 for v in order]


def _miss_means_loss(st: ShootoutState) -> float:
    if st.own_kicks_taken < REGULATION_KICKS_PER_TEAM:
        own_remaining_after = REGULATION_KICKS_PER_TEAM - st.own_kicks_taken - 1
        return 1.0 if st.opp_scored > st.own_scored + own_remaining_after else 0.0
    # sudden death: a miss loses only when the opponent already kicked this
    # round and leads
    behind = st.opp_scored > st.own_scored
    return 1.0 if behind and st.opp_kicks_taken == st.own_kicks_taken + 1 else 0.0


def _goal_means_win(st: ShootoutState) -> float:
    if st.opp_kicks_taken < REGULATION_KICKS_PER_TEAM:
        opp_remaining = REGULATION_KICKS_PER_TEAM - st.opp_kicks_taken
        return 1.0 if st.own_scored + 1 > st.opp_scored + opp_remaining else 0.0
    # sudden death: a goal wins only when the opponent already kicked this
    # round and would end up behind
    ahead_after = st.own_scored + 1 > st.opp_scored
    return 1.0 if ahead_after and st.opp_kicks_taken == st.own_kicks_taken + 1 else 0.0


def extract(
    kick: PenaltyRecord,
    taker_history: Sequence[PenaltyRecord],
    shootout_state: Optional[ShootoutState] = None,
    taker_meta: Optional[PlayerMeta] = None,
    keeper_meta: Optional[PlayerMeta] = None,
) -> np.ndarray:
    """47-feature vector for one kick given the taker's prior kicks in order."""
    for prev, nxt in zip(taker_history, taker_history[1:]):
        if prev.match_id == nxt.match_id and prev.minute > nxt.minute:
            raise DomainError("taker_history is not chronologically ordered")
    if kick.is_shootout and shootout_state is None:
        raise DomainError("shootout kick needs a shootout_state")

    values: dict[str, float] = {}

    # contextual
    values["minute"] = float(kick.minute)
    values["is_shootout"] = 1.0 if kick.is_shootout else 0.0
    values["goal_diff"] = float(kick.goal_diff)
    if kick.is_shootout:
        st = shootout_state
        values["shootout_kicks_taken"] = float(st.kicks_taken)
        values["own_team_kicks_taken"] = float(st.own_kicks_taken)
        values["miss_means_loss"] = _miss_means_loss(st)
        values["goal_means_win"] = _goal_means_win(st)
    else:
        values["shootout_kicks_taken"] = 0.0
        values["own_team_kicks_taken"] = 0.0
        values["miss_means_loss"] = 0.0
        values["goal_means_win"] = 0.0

    # taker / keeper general
    values["preferred_foot"] = FOOT_CODES[kick.foot]
    if taker_meta is not None and taker_meta.position_line in POSITION_CODES:
        values["position_line"] = POSITION_CODES[taker_meta.position_line]
    else:
        values["position_line"] = math.nan
    values["age"] = float(taker_meta.age) if taker_meta and taker_meta.age is not None else math.nan
    values["keeper_height_cm"] = (
        float(keeper_meta.height_cm) if keeper_meta and keeper_meta.height_cm is not None else math.nan
    )

    # history-dependent groups: all NaN for a first-ever penalty
    if not taker_history:
        for name in EXPERIENCE + PREFERENCE + DISTANCE:
            values[name] = math.nan
    else:
        n = len(taker_history)
        zones = [nominal_zone(p.end_x, p.foot) for p in taker_history]
        scored = [p.outcome == "goal" for p in taker_history]
        pressures = [pressure_label(p.is_shootout, p.minute, p.goal_diff) for p in taker_history]

        values["pens_taken"] = float(n)
        values["pens_scored"] = float(sum(scored))
        values["pens_normal_pressure"] = float(sum(1 for p in pressures if p == "normal"))
        values["pens_high_pressure"] = float(sum(1 for p in pressures if p == "high"))

        for zone, pct_name, scored_name in (
            ("natural", "pct_to_natural", "pct_scored_natural"),
            ("nonnatural", "pct_to_nonnatural", "pct_scored_nonnatural"),
            ("center", "pct_to_center", "pct_scored_center"),
        ):
            in_zone = [s for z, s in zip(zones, scored) if z == zone]
            values[pct_name] = 100.0 * len(in_zone) / n
            values[scored_name] = 100.0 * sum(in_zone) / len(in_zone) if in_zone else math.nan

        first, last = taker_history[0], taker_history[-1]
        for rec, prefix in ((first, "first_pen"), (last, "last_pen")):
            result = _result_label(rec.outcome)
            zone = nominal_zone(rec.end_x, rec.foot)
            for name, val in zip(
                (f"{prefix}_goal", f"{prefix}_saved", f"{prefix}_missed"),
                _one_hot(result, ("goal", "saved", "missed")),
            ):
                values[name] = val
            for name, val in zip(
                (f"{prefix}_natural", f"{prefix}_center", f"{prefix}_nonnatural"),
                _one_hot(zone, ("natural", "center", "nonnatural")),
            ):
                values[name] = val

        values["avg_dist_from_center"] = float(
            np.mean([distance_to_center(p.end_x, p.end_z) for p in taker_history])
        )
        values["n_kicks_near_post"] = float(
            sum(1 for p in taker_history if abs(abs(p.end_x) - GOAL_HALF_WIDTH) <= NEAR_POST_M)
        )

    # shootout features: NaN outside shootouts and for each side's first kick
    own_last = shootout_state.own_last if kick.is_shootout else None
    opp_last = shootout_state.opp_last if kick.is_shootout else None
    for last, prefix in ((opp_last, "opp_last"), (own_last, "own_last")):
        result = last[0] if last else None
        zone = last[1] if last else None
        for name, val in zip(
            (f"{prefix}_goal", f"{prefix}_saved", f"{prefix}_missed"),
            _one_hot(result, ("goal", "saved", "missed")),
        ):
            values[name] = val
        for name, val in zip(
            (f"{prefix}_natural", f"{prefix}_center", f"{prefix}_nonnatural"),
            _one_hot(zone, ("natural", "center", "nonnatural")),
        ):
            values[name] = val

    return np.array([values[name] for name in FEATURE_NAMES])


def _chronological_key(rec: PenaltyRecord):
    shootout_rank = rec.shootout_kick_index if rec.is_shootout else -1
    return (rec.match_id, 1 if rec.is_shootout else 0, shootout_rank, rec.minute, rec.kick_id)


def build_feature_matrix(
    records: Sequence[PenaltyRecord],
    player_meta: Optional[dict[str, PlayerMeta]] = None,
) -> tuple[np.ndarray, list[PenaltyRecord]]:
    """Feature matrix for a whole dataset, one row per kick.

    Records are processed in chronological order (match, then shootout kick
    index, then minute); per-taker histories and shootout states are rebuilt
    from the records themselves.  Within a shootout, kicks facing the same
    goalkeeper belong to the same team.  Returns the matrix together with the
    records in the processed order.
    """
    player_meta = player_meta or {}
    ordered = sorted(records, key=_chronological_key)
    histories: dict[str, list[PenaltyRecord]] = {}
    shootouts: dict[str, list[PenaltyRecord]] = {}
    rows = []
    for rec in ordered:
        state = None
        if rec.is_shootout:
            prior = shootouts.setdefault(rec.match_id, [])
            own = [p for p in prior if p.keeper_id == rec.keeper_id]
            opp = [p for p in prior if p.keeper_id != rec.keeper_id]
            state = ShootoutState(
                kicks_taken=len(prior),
                own_kicks_taken=len(own),
                opp_kicks_taken=len(opp),
                own_scored=sum(1 for p in own if p.outcome == "goal"),
                opp_scored=sum(1 for p in opp if p.outcome == "goal"),
                own_last=(
                    (_result_label(own[-1].outcome), nominal_zone(own[-1].end_x, own[-1].foot))
                    if own
                    else None
                ),
                opp_last=(
                    (_result_label(opp[-1].outcome), nominal_zone(opp[-1].end_x, opp[-1].foot))
                    if opp
                    else None
                ),
            )
        history = histories.setdefault(rec.taker_id, [])
        rows.append(
            extract(
                rec,
                history,
                shootout_state=state,
                taker_meta=player_meta.get(rec.taker_id),
                keeper_meta=player_meta.get(rec.keeper_id),
            )
        )
        history.append(rec)
        if rec.is_shootout:
            shootouts[rec.match_id].append(rec)
    return np.vstack(rows), ordered


def grouped_folds(records: Sequence[PenaltyRecord], k: int, seed: int) -> np.ndarray:
    """Fold index per record with every taker's kicks in a single fold.

    Takers are assigned greedily by descending kick count to the currently
    lightest fold; the seed shuffles equal-count takers.
    """
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    takers: dict[str, int] = {}
    for rec in records:
        takers[rec.taker_id] = takers.get(rec.taker_id, 0) + 1
    if len(takers) < k:
        raise DomainError(f"need at least {k} distinct takers, got {len(takers)}")
    rng = np.random.default_rng(seed)
    names = sorted(takers)
    rng.shuffle(names)
    names.sort(key=lambda t: -takers[t])  # stable: seed breaks count ties
    fold_sizes = [0] * k
    assignment: dict[str, int] = {}
    for name in names:
        fold = min(range(k), key=lambda f: (fold_sizes[f], f))
        assignment[name] = fold
        fold_sizes[fold] += takers[name]
    return np.array([assignment[rec.taker_id] for rec in records])


def schema_rows() -> list[dict]:
    """Companion schema for exported feature matrices."""
    return [
        {"name": name, "group": FEATURE_GROUPS[name], "type": "float"}
        for name in FEATURE_NAMES
    ]


def vector_from_values(values: dict) -> np.ndarray:
    """Feature vector from a partial mapping of canonical names; the rest stay NaN.

    Accepts ``foot``/``position_line`` as words and booleans for convenience.
    """
    out = np.full(len(FEATURE_NAMES), math.nan)
    for key, value in values.items():
        name = "preferred_foot" if key == "foot" else key
        if name not in FEATURE_NAMES:
            raise DomainError(f"unknown feature {key!r}")
        if value is None:
            continue
        if isinstance(value, str):
            if name == "preferred_foot":
                value = FOOT_CODES[value]
            elif name == "position_line":
                value = POSITION_CODES[value]
            else:
                raise DomainError(f"feature {name!r} must be numeric, got {value!r}")
        elif isinstance(value, bool):
            value = 1.0 if value else 0.0
        out[FEATURE_NAMES.index(name)] = float(value)
    return out
