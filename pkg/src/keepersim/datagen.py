"""Synthetic penalty datasets with configurable, calibrated distributions.

Every experiment in the toolkit can run at desk scale on generated data.
Outcomes are resolved with the same reach model the simulator evaluates, so
the generator's planted keeper profile and uncertainty parameters act as
ground truth for parameter-recovery and calibration tests.

Generation is deterministic given the seed: each kick draws from its own
substream keyed by (seed, kick index), so output does not depend on how the
index space is partitioned across workers.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .core import (
    GOAL_HALF_WIDTH,
    GOAL_HEIGHT,
    ZONE_BOUNDARY,
    DomainError,
    GoalkeeperProfile,
    PenaltyRecord,
    UncertaintyParams,
    natural_corner_sign,
    pressure_label,
)
from .simulator import DEFAULT_EARLY_MIX, p_save_given_correct

SHOOTOUT_BLOCK = 10  # five rounds of alternating kicks

GOAL_DIFF_VALUES = (-2, -1, 0, 1, 2)
GOAL_DIFF_PROBS = (0.10, 0.25, 0.40, 0.15, 0.10)


@dataclass(frozen=True)
class EndLocationModel:
    """Truncated-normal end locations per zone kind (synthetic convention only).

    Corner kicks mix a placed component with a near-post component so that a
    fraction of kicks is out of reach of any late dive, mirroring the rise of
    kicks placed close to the posts.
    """

    corner_x_mean: float = 2.75  # |x| of the placed component, within the corner third
    corner_x_sd: float = 0.50
    corner_z_mean: float = 0.70
    corner_z_sd: float = 0.55
    post_mass: float = 0.18  # share of corner kicks aimed hard at the post
    post_x_mean: float = 3.45
    post_x_sd: float = 0.15
    center_x_mean: float = 0.45
    center_x_sd: float = 0.35
    center_z_mean: float = 0.80
    center_z_sd: float = 0.60


@dataclass(frozen=True)
class GeneratorConfig:
    n_kicks: int
    seed: int
    shootout_fraction: float = 0.15
    p_dependent: float = 0.206
    p_late_dive: float = 0.385
    # (natural, center, nonnatural) for keeper-independent kicks
    direction_mix: tuple[float, float, float] = (0.4975, 0.1448, 0.3577)
    p_on_target: float = 0.935
    end_location_model: EndLocationModel = field(default_factory=EndLocationModel)
    keeper_truth: GoalkeeperProfile = field(
        default_factory=lambda: GoalkeeperProfile(
            early_range=3.1,
            late_range=2.8,
            p_late_correct_independent=0.60,
            p_late_correct_dependent=0.60,
            p_early_correct_dependent=0.18,
        )
    )
    uncertainty_truth: UncertaintyParams = field(default_factory=UncertaintyParams)
    keeper_early_mix: tuple[float, float] = DEFAULT_EARLY_MIX  # (natural, nonnatural)
    mishit_prob: float = 0.18
    taker_pool: int = 150
    keeper_pool: int = 40
    bias_concentration: float = 2.5  # Dirichlet strength; 0 plants no per-taker signal
    distance_bias_sd: float = 0.55  # per-taker shift of the corner |x| mean; 0 disables
    post_bias_sd: float = 0.20  # per-taker spread of the near-post share; 0 disables

    def __post_init__(self):
        if self.n_kicks < 0:
            raise DomainError(f"n_kicks must be >= 0, got {self.n_kicks}")
        for name in ("shootout_fraction", "p_dependent", "p_late_dive", "p_on_target", "mishit_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"{name} must be in [0,1], got {p}")
        for name, mix in (("direction_mix", self.direction_mix), ("keeper_early_mix", self.keeper_early_mix)):
            if min(mix) < 0 or abs(sum(mix) - 1.0) > 1e-9:
                raise DomainError(f"{name} must be nonnegative and sum to 1, got {mix}")
        if self.taker_pool < 1 or self.keeper_pool < 2:
            raise DomainError("need at least 1 taker and 2 keepers")
        if min(self.bias_concentration, self.distance_bias_sd, self.post_bias_sd) < 0:
            raise DomainError("bias parameters must be >= 0")


def planted_truth(config: GeneratorConfig) -> tuple[GoalkeeperProfile, UncertaintyParams]:
    """Ground-truth keeper parameters embedded in the config, for recovery tests."""
    return config.keeper_truth, config.uncertainty_truth


@dataclass(frozen=True)
class _Taker:
    taker_id: str
    foot: str
    direction_mix: tuple[float, float, float]
    corner_x_shift: float
    post_mass: float


def _build_takers(config: GeneratorConfig) -> list[_Taker]:
    rng = np.random.default_rng([config.seed, 0])
    takers = []
    for t in range(config.taker_pool):
        foot = "right" if rng.random() < 0.75 else "left"
        if config.bias_concentration > 0:
            alpha = np.maximum(np.array(config.direction_mix) * config.bias_concentration, 1e-9)
            mix = tuple(rng.dirichlet(alpha))
        else:
            mix = config.direction_mix
        shift = rng.normal(0.0, config.distance_bias_sd) if config.distance_bias_sd > 0 else 0.0
        base_post = config.end_location_model.post_mass
        if config.post_bias_sd > 0:
            post = float(min(0.6, max(0.0, rng.normal(base_post, config.post_bias_sd))))
        else:
            post = base_post
        takers.append(_Taker(f"t{t:04d}", foot, mix, float(shift), post))
    return takers


def _trunc_normal(rng: np.random.Generator, mean: float, sd: float, lo: float, hi: float) -> float:
    for _ in range(200):
        v = rng.normal(mean, sd)
        if lo <= v <= hi:
            return float(v)
    return float(min(hi, max(lo, v)))


def _sample_location(
    rng: np.random.Generator,
    zone: str,
    foot: str,
    loc: EndLocationModel,
    x_shift: float,
    post_mass: float,
) -> tuple[float, float]:
    """On-target (end_x, end_z) inside the given zone."""
    if zone == "center":
        x_abs = _trunc_normal(rng, loc.center_x_mean, loc.center_x_sd, 0.0, ZONE_BOUNDARY - 1e-6)
        z = _trunc_normal(rng, loc.center_z_mean, loc.center_z_sd, 0.0, GOAL_HEIGHT)
        sign = 1 if rng.random() < 0.5 else -1
        return sign * x_abs, z
    if rng.random() < post_mass:
        x_abs = _trunc_normal(rng, loc.post_x_mean, loc.post_x_sd, ZONE_BOUNDARY, GOAL_HALF_WIDTH)
    else:
        mean = min(max(loc.corner_x_mean + x_shift, ZONE_BOUNDARY + 0.1), GOAL_HALF_WIDTH - 0.1)
        x_abs = _trunc_normal(rng, mean, loc.corner_x_sd, ZONE_BOUNDARY, GOAL_HALF_WIDTH)
    z = _trunc_normal(rng, loc.corner_z_mean, loc.corner_z_sd, 0.0, GOAL_HEIGHT)
    sign = natural_corner_sign(foot)
    if zone == "nonnatural":
        sign = -sign
    return sign * x_abs, z


def _sample_miss(
    rng: np.random.Generator,
    zone: str,
    foot: str,
    loc: EndLocationModel,
    x_shift: float,
    post_mass: float,
) -> tuple[float, float]:
    """Off-target (end_x, end_z): wide of the intended corner or over the bar."""
    if zone != "center" and rng.random() < 0.6:
        x_abs = GOAL_HALF_WIDTH + abs(rng.normal(0.25, 0.2)) + 1e-3
        sign = natural_corner_sign(foot)
        if zone == "nonnatural":
            sign = -sign
        return sign * x_abs, float(rng.uniform(0.0, 2.2))
    x, _ = _sample_location(rng, zone, foot, loc, x_shift, post_mass)
    return x, GOAL_HEIGHT + abs(rng.normal(0.25, 0.2)) + 1e-3


_OTHER_ZONES = {
    "natural": ("center", "nonnatural"),
    "center": ("natural", "nonnatural"),
    "nonnatural": ("natural", "center"),
}


def _kick(
    config: GeneratorConfig,
    index: int,
    taker: _Taker,
    keeper_id: str,
    match_id: str,
    minute: int,
    goal_diff: int,
    is_shootout: bool,
    shootout_kick_index: Optional[int],
    shootout_team_kick_index: Optional[int],
) -> PenaltyRecord:
    rng = np.random.default_rng([config.seed, 1, index])
    gk = config.keeper_truth
    dependent = rng.random() < config.p_dependent
    late = gk.can_dive_late and rng.random() < config.p_late_dive

    corner_pref = config.direction_mix[0] / (config.direction_mix[0] + config.direction_mix[2])
    if dependent:
        if late:
            zone = "natural" if rng.random() < corner_pref else "nonnatural"
            if rng.random() < gk.p_late_correct_dependent:
                dive = zone
            else:
                dive = _OTHER_ZONES[zone][int(rng.random() < 0.5)]
        else:
            commit = "natural" if rng.random() < config.keeper_early_mix[0] else "nonnatural"
            opposite = "nonnatural" if commit == "natural" else "natural"
            zone = commit if rng.random() < config.mishit_prob else opposite
            dive = commit
    else:
        zone = ("natural", "center", "nonnatural")[
            int(rng.choice(3, p=np.asarray(taker.direction_mix)))
        ]
        if late:
            if rng.random() < gk.p_late_correct_independent:
                dive = zone
            else:
                dive = _OTHER_ZONES[zone][int(rng.random() < 0.5)]
        else:
            dive = "natural" if rng.random() < config.keeper_early_mix[0] else "nonnatural"

    on_target = rng.random() < config.p_on_target
    loc = config.end_location_model
    if on_target:
        end_x, end_z = _sample_location(rng, zone, taker.foot, loc, taker.corner_x_shift, taker.post_mass)
        if dive == zone:
            start_x = gk.start_offset * natural_corner_sign(taker.foot)
            d = float(np.hypot(end_x - start_x, end_z))
            r = gk.late_range if late else gk.early_range
            p_save = p_save_given_correct(d, r, config.uncertainty_truth)
            outcome = "saved" if rng.random() < p_save else "goal"
        else:
            outcome = "goal"
    else:
        end_x, end_z = _sample_miss(rng, zone, taker.foot, loc, taker.corner_x_shift, taker.post_mass)
        outcome = "off_target"

    return PenaltyRecord(
        kick_id=f"k{index:06d}",
        match_id=match_id,
        taker_id=taker.taker_id,
        keeper_id=keeper_id,
        minute=minute,
        is_shootout=is_shootout,
        shootout_kick_index=shootout_kick_index,
        shootout_team_kick_index=shootout_team_kick_index,
        goal_diff=goal_diff,
        foot=taker.foot,
        taker_strategy="dependent" if dependent else "independent",
        end_x=end_x,
        end_z=end_z,
        outcome=outcome,
        keeper_dive_zone=dive,
        keeper_timing="late" if late else "early",
        pressure=pressure_label(is_shootout, minute, goal_diff),
    )


def generate(config: GeneratorConfig) -> list[PenaltyRecord]:
    """Exactly ``n_kicks`` records: in-game kicks first, then shootout blocks."""
    takers = _build_takers(config)
    keeper_ids = [f"gk{i:03d}" for i in range(config.keeper_pool)]
    n_shootout = int(round(config.n_kicks * config.shootout_fraction))
    n_in_game = config.n_kicks - n_shootout

    records: list[PenaltyRecord] = []
    for i in range(n_in_game):
        rng = np.random.default_rng([config.seed, 2, i])
        taker = takers[int(rng.integers(len(takers)))]
        keeper = keeper_ids[int(rng.integers(len(keeper_ids)))]
        minute = int(rng.integers(1, 96))
        goal_diff = int(rng.choice(GOAL_DIFF_VALUES, p=GOAL_DIFF_PROBS))
        records.append(
            _kick(config, i, taker, keeper, f"g{i:06d}", minute, goal_diff, False, None, None)
        )

    index = n_in_game
    block = 0
    while index < config.n_kicks:
        block_size = min(SHOOTOUT_BLOCK, config.n_kicks - index)
        rng = np.random.default_rng([config.seed, 3, block])
        gk_pair = rng.choice(len(keeper_ids), size=2, replace=False)
        match_id = f"so{block:05d}"
        for j in range(block_size):
            team = j % 2
            taker = takers[int(np.random.default_rng([config.seed, 4, index]).integers(len(takers)))]
            records.append(
                _kick(
                    config,
                    index,
                    taker,
                    keeper_ids[int(gk_pair[1 - team])],
                    match_id,
                    120,
                    0,
                    True,
                    j + 1,
                    j // 2 + 1,
                )
            )
            index += 1
        block += 1
    return records


def config_to_json(config: GeneratorConfig, path: str | Path) -> None:
    payload = asdict(config)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


def config_from_json(path: str | Path, **overrides) -> GeneratorConfig:
    with open(path) as fh:
        payload = json.load(fh)
    payload.update(overrides)
    payload["end_location_model"] = EndLocationModel(**payload.get("end_location_model", {}))
    payload["keeper_truth"] = GoalkeeperProfile(**payload["keeper_truth"])
    payload["uncertainty_truth"] = UncertaintyParams(**payload.get("uncertainty_truth", {}))
    for name in ("direction_mix", "keeper_early_mix"):
        if name in payload:
            payload[name] = tuple(payload[name])
    return GeneratorConfig(**payload)
