"""Domain types and goal-mouth geometry shared by every other module.

Coordinate convention: origin at the center of the goal on the goal line,
x positive toward the kicker's right, z up.  All signed keeper offsets are
expressed "toward the kicker's natural corner" and converted to signed x
per kick via :func:`natural_corner_sign`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

GOAL_HALF_WIDTH = 3.66  # goal mouth is 7.32 m wide
GOAL_HEIGHT = 2.44
ZONE_BOUNDARY = 1.22  # goal split into equal thirds of 2.44 m

FEET = ("left", "right")
ZONES = ("natural", "center", "nonnatural")
OUTCOMES = ("goal", "saved", "off_target")
STRATEGIES = ("independent", "dependent", "unknown")
TIMINGS = ("early", "late", "unknown")
PRESSURES = ("high", "normal", "low")


class DomainError(ValueError):
    """Invalid domain value or operation precondition violation."""


@dataclass(frozen=True)
class PenaltyRecord:
    """One penalty kick: context, taker strategy, end coordinates, keeper action, outcome."""

    kick_id: str
    match_id: str
    taker_id: str
    keeper_id: str
    minute: int
    is_shootout: bool
    goal_diff: int
    foot: str
    taker_strategy: str
    end_x: float
    end_z: float
    outcome: str
    keeper_dive_zone: str = "unknown"
    keeper_timing: str = "unknown"
    pressure: str = "normal"
    shootout_kick_index: Optional[int] = None
    shootout_team_kick_index: Optional[int] = None

    def __post_init__(self):
        if self.minute < 0:
            raise DomainError(f"minute must be >= 0, got {self.minute}")
        if self.foot not in FEET:
            raise DomainError(f"foot must be one of {FEET}, got {self.foot!r}")
        if self.taker_strategy not in STRATEGIES:
            raise DomainError(f"bad taker_strategy {self.taker_strategy!r}")
        if self.outcome not in OUTCOMES:
            raise DomainError(f"bad outcome {self.outcome!r}")
        if self.keeper_dive_zone not in ZONES + ("unknown",):
            raise DomainError(f"bad keeper_dive_zone {self.keeper_dive_zone!r}")
        if self.keeper_timing not in TIMINGS:
            raise DomainError(f"bad keeper_timing {self.keeper_timing!r}")
        if self.pressure not in PRESSURES:
            raise DomainError(f"bad pressure {self.pressure!r}")
        if self.end_z < 0:
            raise DomainError(f"end_z must be >= 0, got {self.end_z}")
        if not self.is_shootout and (
            self.shootout_kick_index is not None or self.shootout_team_kick_index is not None
        ):
            raise DomainError("shootout indices present on a non-shootout kick")
        for idx in (self.shootout_kick_index, self.shootout_team_kick_index):
            if idx is not None and idx < 1:
                raise DomainError(f"shootout index must be >= 1, got {idx}")

    @property
    def on_target(self) -> bool:
        return (
            self.outcome != "off_target"
            and abs(self.end_x) <= GOAL_HALF_WIDTH
            and 0.0 <= self.end_z <= GOAL_HEIGHT
        )


@dataclass(frozen=True)
class GoalkeeperProfile:
    """A goalkeeper's action capacities.

    ``late_range`` absent means the keeper cannot dive late.  ``start_offset``
    is signed toward the current kicker's natural corner.
    """

    early_range: float
    late_range: Optional[float] = None
    p_late_correct_independent: float = 0.5
    p_late_correct_dependent: float = 0.5
    p_early_correct_dependent: float = 0.05
    start_offset: float = 0.0

    def __post_init__(self):
        if not self.early_range > 0:
            raise DomainError(f"early_range must be > 0, got {self.early_range}")
        if self.late_range is not None and not (0 < self.late_range <= self.early_range):
            raise DomainError(
                f"late_range must be in (0, early_range], got {self.late_range}"
            )
        for name in (
            "p_late_correct_independent",
            "p_late_correct_dependent",
            "p_early_correct_dependent",
        ):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"{name} must be in [0,1], got {p}")

    @property
    def can_dive_late(self) -> bool:
        return self.late_range is not None


@dataclass(frozen=True)
class UncertaintyParams:
    """Reach-model uncertainty: tolerance band ``mu`` (m) and within-reach save probability ``rho``."""

    mu: float = 0.7
    rho: float = 0.7

    def __post_init__(self):
        if self.mu < 0:
            raise DomainError(f"mu must be >= 0, got {self.mu}")
        if not 0.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must be in [0,1], got {self.rho}")


POLICY_KINDS = ("late", "early", "early_educated", "mixed_educated", "game_theoretic")

# gt_mix component order: (dive natural early, dive late, dive nonnatural early)
GT_ACTIONS = ("early_natural", "late", "early_nonnatural")


@dataclass(frozen=True)
class PolicySpec:
    """One evaluable goalkeeper policy plus its parameters.

    ``offset`` is meters toward the kicker's natural corner; None inherits the
    keeper profile's habitual start offset.
    """

    kind: str
    offset: Optional[float] = None
    early_direction_mix: Optional[tuple[float, float]] = None  # (natural, nonnatural)
    gt_mix: Optional[tuple[float, float, float]] = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise DomainError(f"bad policy kind {self.kind!r}")
        if self.offset is not None and abs(self.offset) > GOAL_HALF_WIDTH:
            raise DomainError(f"offset outside goal mouth: {self.offset}")
        for name, mix in (("early_direction_mix", self.early_direction_mix), ("gt_mix", self.gt_mix)):
            if mix is None:
                continue
            if min(mix) < 0 or abs(sum(mix) - 1.0) > 1e-9:
                raise DomainError(f"{name} must be nonnegative and sum to 1, got {mix}")
        if self.kind == "game_theoretic" and self.gt_mix is None:
            raise DomainError("game_theoretic policy requires gt_mix")


def natural_corner_sign(foot: str) -> int:
    """Sign of the kicker's natural corner on the x axis.

    Right-footed kickers' natural corner is the kicker's left (negative x);
    left-footed kickers mirror it.
    """
    if foot == "right":
        return -1
    if foot == "left":
        return +1
    raise DomainError(f"foot must be one of {FEET}, got {foot!r}")


def classify_zone(end_x: float, foot: str) -> str:
    """Zone of an on-target crossing point: natural, center, or nonnatural."""
    if abs(end_x) > GOAL_HALF_WIDTH:
        raise DomainError(
            f"end_x {end_x} lies outside the goal mouth; zone defined for on-target kicks only"
        )
    if abs(end_x) < ZONE_BOUNDARY:
        return "center"
    return "natural" if math.copysign(1, end_x) == natural_corner_sign(foot) else "nonnatural"


def nominal_zone(end_x: float, foot: str) -> str:
    """Zone nearest to an arbitrary crossing point, clamping x into the goal mouth.

    Lets off-target kicks be attributed to the corner (or center) they were
    aimed at when building payoff matrices and preference features.
    """
    x = max(-GOAL_HALF_WIDTH, min(GOAL_HALF_WIDTH, end_x))
    return classify_zone(x, foot)


def distance_to_keeper(start_offset_signed_x: float, end_x: float, end_z: float) -> float:
    """Euclidean distance from the keeper's goal-line starting point to the ball's crossing point."""
    return math.hypot(end_x - start_offset_signed_x, end_z)


def distance_to_center(end_x: float, end_z: float) -> float:
    """Distance of a crossing point from the center of the goal (keeper start at center)."""
    return math.hypot(end_x, end_z)


def pressure_label(is_shootout: bool, minute: int, goal_diff: int) -> str:
    """Pressure level of a kick: shootouts and late tied/trailing-by-one kicks are high."""
    if minute < 0:
        raise DomainError(f"minute must be >= 0, got {minute}")
    if is_shootout:
        return "high"
    if goal_diff in (-1, 0):
        return "high" if minute > 80 else "normal"
    return "low"
