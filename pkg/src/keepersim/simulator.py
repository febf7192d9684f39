"""Policy evaluation over historical kicks, parameter sweeps, and advice.

A kick is saved when the keeper picks the correct corner and then reaches the
ball: per-kick save probability is the product of the correct-corner
probability and the reach-model save probability.  Policies differ in dive
timing, dive direction, and starting offset.  Dependent kicks never use their
recorded coordinates; their reach term averages over the empirical end
locations of dependent kicks in the training data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import (
    DomainError,
    GoalkeeperProfile,
    PenaltyRecord,
    PolicySpec,
    UncertaintyParams,
    classify_zone,
    distance_to_center,
    natural_corner_sign,
)
from .models.boosting import BoostedModel, predict_direction, predict_distance
from .models.metrics import CalibrationBin, brier, calibration_bins

DIRECTION_CLASSES = ("natural", "center", "nonnatural")

DEFAULT_LATE_RANGES = (2.6, 2.7, 2.8, 2.9)
DEFAULT_EARLY_RANGES = (3.0, 3.1, 3.2)
DEFAULT_OFFSETS = (0.0, 0.1, 0.2, 0.3)

# renormalized empirical early-dive corner shares (keeper mix over the two
# early actions), overridable from data
DEFAULT_EARLY_MIX = (0.359 / (0.359 + 0.256), 0.256 / (0.359 + 0.256))


def p_save_given_correct(d: float, r: float, params: UncertaintyParams) -> float:
    """Reach-model save probability for a correct-corner dive.

    Full ``rho`` within reach, zero beyond reach plus the tolerance band, and
    a linear ramp inside the band.  ``mu = 0`` degenerates to a step at ``r``.
    """
    if d < 0:
        raise DomainError(f"distance must be >= 0, got {d}")
    if r <= 0:
        raise DomainError(f"range must be > 0, got {r}")
    mu, rho = params.mu, params.rho
    if mu == 0.0:
        return rho if d <= r else 0.0
    if d > r + mu:
        return 0.0
    if d < r - mu:
        return rho
    return rho * (0.5 - (d - r) / (2.0 * mu))


def _reach_fraction(d: np.ndarray, r: float, mu: float) -> np.ndarray:
    """Vectorized reach term with rho factored out."""
    if mu == 0.0:
        return (d <= r).astype(float)
    return np.clip(0.5 - (d - r) / (2.0 * mu), 0.0, 1.0)


def natural_frame(rec: PenaltyRecord) -> tuple[float, float]:
    """(x, z) with positive x toward the kicker's natural corner."""
    return rec.end_x * natural_corner_sign(rec.foot), rec.end_z


@dataclass
class EmpiricalTables:
    """Training-data estimates the simulator needs beyond a keeper profile.

    ``dependent_locations`` and ``zone_locations`` hold on-target end points
    in the natural frame; reach terms for kicks whose coordinates cannot be
    used average over them.
    """

    p_correct: dict[tuple[str, str], float] = field(default_factory=dict)
    early_mix: tuple[float, float] = DEFAULT_EARLY_MIX  # (natural, nonnatural)
    p_dependent: float = 0.206
    dependent_locations: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    zone_locations: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: Sequence[PenaltyRecord]) -> "EmpiricalTables":
        correct: dict[tuple[str, str], list[int]] = {}
        early_corners = {"natural": 0, "nonnatural": 0}
        n_dep = 0
        n_strat = 0
        dep_locs: list[tuple[float, float]] = []
        zone_locs: dict[str, list[tuple[float, float]]] = {z: [] for z in DIRECTION_CLASSES}
        for rec in records:
            if rec.taker_strategy != "unknown":
                n_strat += 1
                n_dep += rec.taker_strategy == "dependent"
            if rec.keeper_timing == "early" and rec.keeper_dive_zone in early_corners:
                early_corners[rec.keeper_dive_zone] += 1
            if rec.on_target:
                x_nat, z = natural_frame(rec)
                if rec.taker_strategy == "dependent":
                    dep_locs.append((x_nat, z))
                elif rec.taker_strategy == "independent":
                    zone_locs[classify_zone(rec.end_x, rec.foot)].append((x_nat, z))
                if (
                    rec.keeper_timing in ("early", "late")
                    and rec.taker_strategy in ("independent", "dependent")
                    and rec.keeper_dive_zone != "unknown"
                ):
                    key = (rec.keeper_timing, rec.taker_strategy)
                    hit = rec.keeper_dive_zone == classify_zone(rec.end_x, rec.foot)
                    correct.setdefault(key, []).append(int(hit))
        total_corners = sum(early_corners.values())
        early_mix = (
            (early_corners["natural"] / total_corners, early_corners["nonnatural"] / total_corners)
            if total_corners
            else DEFAULT_EARLY_MIX
        )
        return cls(
            p_correct={k: float(np.mean(v)) for k, v in sorted(correct.items())},
            early_mix=early_mix,
            p_dependent=n_dep / n_strat if n_strat else 0.206,
            dependent_locations=np.array(dep_locs) if dep_locs else np.empty((0, 2)),
            zone_locations={
                z: (np.array(v) if v else np.empty((0, 2))) for z, v in zone_locs.items()
            },
        )

    def profile(
        self, early_range: float, late_range: Optional[float], start_offset: float = 0.0
    ) -> GoalkeeperProfile:
        """Keeper profile whose correct-corner skills equal the population estimates."""
        return GoalkeeperProfile(
            early_range=early_range,
            late_range=late_range,
            p_late_correct_independent=self.p_correct.get(("late", "independent"), 0.5),
            p_late_correct_dependent=self.p_correct.get(("late", "dependent"), 0.5),
            p_early_correct_dependent=self.p_correct.get(("early", "dependent"), 0.05),
            start_offset=start_offset,
        )

    def to_dict(self) -> dict:
        return {
            "p_correct": [
                {"timing": t, "strategy": s, "value": v} for (t, s), v in sorted(self.p_correct.items())
            ],
            "early_mix": list(self.early_mix),
            "p_dependent": self.p_dependent,
            "dependent_locations": self.dependent_locations.tolist(),
            "zone_locations": {z: a.tolist() for z, a in self.zone_locations.items()},
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "EmpiricalTables":
        return cls(
            p_correct={
                (row["timing"], row["strategy"]): row["value"] for row in payload["p_correct"]
            },
            early_mix=tuple(payload["early_mix"]),
            p_dependent=payload["p_dependent"],
            dependent_locations=np.array(payload["dependent_locations"]).reshape(-1, 2),
            zone_locations={
                z: np.array(v).reshape(-1, 2) for z, v in payload["zone_locations"].items()
            },
        )


def _mean_reach(
    locations: np.ndarray, offset: float, r: float, params: UncertaintyParams
) -> float:
    """Average reach-model save probability over an empirical location sample."""
    if locations.shape[0] == 0:
        raise DomainError(
            "no empirical end locations available; build EmpiricalTables from training records"
        )
    d = np.hypot(locations[:, 0] - offset, locations[:, 1])
    return float(params.rho * _reach_fraction(d, r, params.mu).mean())


@dataclass(frozen=True)
class ModelBundle:
    direction: Optional[BoostedModel] = None
    distance: Optional[BoostedModel] = None


@dataclass(frozen=True)
class KickEvaluation:
    kick_id: str
    dive_timing_used: str
    p_correct: float
    p_save_given_correct: float
    p_save: float


@dataclass
class PolicyEvaluation:
    policy: PolicySpec
    expected_save_fraction: float
    kicks: list[KickEvaluation]


def p_correct_corner(
    kick: PenaltyRecord,
    timing: str,
    gk: GoalkeeperProfile,
    tables: EmpiricalTables,
    policy_kind: str,
    direction_probs: Optional[np.ndarray] = None,
    early_mix: Optional[tuple[float, float]] = None,
) -> float:
    """Probability the dive ends in the kick's corner, by taker strategy and timing."""
    dependent = kick.taker_strategy == "dependent"
    if dependent:
        return gk.p_late_correct_dependent if timing == "late" else gk.p_early_correct_dependent
    if timing == "late":
        return gk.p_late_correct_independent
    zone = classify_zone(kick.end_x, kick.foot)
    if policy_kind in ("early_educated", "mixed_educated"):
        if direction_probs is None:
            raise DomainError(f"policy {policy_kind} needs direction model probabilities")
        return float(direction_probs[DIRECTION_CLASSES.index(zone)])
    mix = early_mix if early_mix is not None else tables.early_mix
    if zone == "natural":
        return mix[0]
    if zone == "nonnatural":
        return mix[1]
    return 0.0  # corner-only early mix never covers a center kick


def decide_timing(
    policy: PolicySpec,
    gk: GoalkeeperProfile,
    distance_model: Optional[BoostedModel] = None,
    fv: Optional[np.ndarray] = None,
    rng: Optional[np.random.Generator] = None,
) -> str:
    """Dive timing for one kick under a policy."""
    if policy.kind in ("late", "mixed_educated") and not gk.can_dive_late:
        raise DomainError(f"policy {policy.kind} needs a keeper who can dive late")
    if policy.kind == "late":
        return "late"
    if policy.kind in ("early", "early_educated"):
        return "early"
    if policy.kind == "mixed_educated":
        if distance_model is None or fv is None:
            raise DomainError("mixed_educated needs the distance model and kick features")
        predicted = predict_distance(distance_model, fv)
        return "late" if predicted <= gk.late_range else "early"
    # game_theoretic
    if rng is None:
        raise DomainError("game_theoretic timing requires an rng; use expectation mode instead")
    action = rng.choice(3, p=policy.gt_mix)
    return "late" if action == 1 else "early"


def _require_models(policy: PolicySpec, models: Optional[ModelBundle]) -> None:
    needs_direction = policy.kind in ("early_educated", "mixed_educated")
    needs_distance = policy.kind == "mixed_educated"
    if needs_direction and (models is None or models.direction is None):
        raise DomainError(f"policy {policy.kind} needs a trained direction model")
    if needs_distance and (models is None or models.distance is None):
        raise DomainError(f"policy {policy.kind} needs a trained distance model")


def _gt_action_terms(
    rec: PenaltyRecord,
    gk: GoalkeeperProfile,
    params: UncertaintyParams,
    tables: EmpiricalTables,
    offset: float,
    dep_reach: dict[str, float],
) -> list[tuple[str, float, float]]:
    """(timing, p_correct, p_save_given_correct) per game-theoretic action."""
    dependent = rec.taker_strategy == "dependent"
    terms = []
    for action, commit in (("early_natural", "natural"), ("late", None), ("early_nonnatural", "nonnatural")):
        timing = "late" if action == "late" else "early"
        if dependent:
            p_c = gk.p_late_correct_dependent if timing == "late" else gk.p_early_correct_dependent
            p_s = dep_reach[timing]
        else:
            zone = classify_zone(rec.end_x, rec.foot)
            if timing == "late":
                p_c = gk.p_late_correct_independent
            else:
                p_c = 1.0 if zone == commit else 0.0
            r = gk.late_range if timing == "late" else gk.early_range
            s = natural_corner_sign(rec.foot)
            d = math.hypot(rec.end_x - offset * s, rec.end_z)
            p_s = p_save_given_correct(d, r, params)
        terms.append((timing, p_c, p_s))
    return terms


def evaluate_policy(
    records: Sequence[PenaltyRecord],
    policy: PolicySpec,
    gk: GoalkeeperProfile,
    params: UncertaintyParams,
    tables: EmpiricalTables,
    models: Optional[ModelBundle] = None,
    feature_matrix: Optional[np.ndarray] = None,
    rng: Optional[np.random.Generator] = None,
) -> PolicyEvaluation:
    """Expected save fraction of a policy over on-target kicks.

    ``feature_matrix`` rows must align with ``records``; only educated
    policies need it.  Without an rng the game-theoretic policy is scored as
    the exact expectation over its action mix.
    """
    _require_models(policy, models)
    if policy.kind == "game_theoretic" and policy.gt_mix[1] > 0 and not gk.can_dive_late:
        raise DomainError("game_theoretic mix dives late but the keeper has no late range")
    offset = policy.offset if policy.offset is not None else gk.start_offset
    if feature_matrix is not None and len(records) != feature_matrix.shape[0]:
        raise DomainError("feature matrix does not align with records")

    on_target = [(i, rec) for i, rec in enumerate(records) if rec.on_target]
    if not on_target:
        raise DomainError("no on-target records to evaluate")

    needs_features = policy.kind in ("early_educated", "mixed_educated")
    if needs_features and feature_matrix is None:
        raise DomainError(f"policy {policy.kind} needs the kick feature matrix")

    # reach term for dependent kicks, shared by every kick of a timing
    dep_reach: dict[str, float] = {}
    has_dependent = any(rec.taker_strategy == "dependent" for _, rec in on_target)
    if has_dependent:
        dep_reach["early"] = _mean_reach(tables.dependent_locations, offset, gk.early_range, params)
        if gk.can_dive_late:
            dep_reach["late"] = _mean_reach(
                tables.dependent_locations, offset, gk.late_range, params
            )

    direction_probs = None
    predicted_dists = None
    idx = [i for i, _ in on_target]
    if needs_features:
        X = feature_matrix[idx]
        if models.direction is not None:
            direction_probs = predict_direction(models.direction, X)
        if policy.kind == "mixed_educated":
            predicted_dists = predict_distance(models.distance, X)

    evaluations: list[KickEvaluation] = []
    for row, (i, rec) in enumerate(on_target):
        if policy.kind == "game_theoretic":
            terms = _gt_action_terms(rec, gk, params, tables, offset, dep_reach)
            if rng is None:
                p_save = sum(w * pc * ps for w, (_, pc, ps) in zip(policy.gt_mix, terms))
                p_c = sum(w * pc for w, (_, pc, _) in zip(policy.gt_mix, terms))
                p_s = p_save / p_c if p_c > 0 else 0.0
                timing = terms[int(np.argmax(policy.gt_mix))][0]
            else:
                action = int(rng.choice(3, p=policy.gt_mix))
                timing, p_c, p_s = terms[action]
                p_save = p_c * p_s
        else:
            if policy.kind == "mixed_educated":
                timing = "late" if predicted_dists[row] <= gk.late_range else "early"
            else:
                timing = decide_timing(policy, gk)
            probs = direction_probs[row] if direction_probs is not None else None
            p_c = p_correct_corner(
                rec, timing, gk, tables, policy.kind,
                direction_probs=probs, early_mix=policy.early_direction_mix,
            )
            if rec.taker_strategy == "dependent":
                p_s = dep_reach[timing]
            else:
                r = gk.late_range if timing == "late" else gk.early_range
                s = natural_corner_sign(rec.foot)
                d = math.hypot(rec.end_x - offset * s, rec.end_z)
                p_s = p_save_given_correct(d, r, params)
            p_save = p_c * p_s
        evaluations.append(
            KickEvaluation(
                kick_id=rec.kick_id,
                dive_timing_used=timing,
                p_correct=p_c,
                p_save_given_correct=p_s,
                p_save=p_save,
            )
        )
    aggregate = float(np.mean([e.p_save for e in evaluations]))
    return PolicyEvaluation(policy=policy, expected_save_fraction=aggregate, kicks=evaluations)


def range_sweep(
    records: Sequence[PenaltyRecord],
    policies: Sequence[PolicySpec],
    late_ranges: Sequence[float],
    early_ranges: Sequence[float],
    gk_template: GoalkeeperProfile,
    params: UncertaintyParams,
    tables: EmpiricalTables,
    models: Optional[ModelBundle] = None,
    feature_matrix: Optional[np.ndarray] = None,
) -> list[dict]:
    """Expected save fraction per (policy, late range, early range) cell."""
    if not late_ranges or not early_ranges:
        raise DomainError("range grids must be nonempty")
    rows = []
    for policy in policies:
        for late in late_ranges:
            for early in early_ranges:
                gk = replace(gk_template, late_range=late, early_range=early)
                result = evaluate_policy(
                    records, policy, gk, params, tables, models=models,
                    feature_matrix=feature_matrix,
                )
                rows.append(
                    {
                        "policy": policy.kind,
                        "late_range": late,
                        "early_range": early,
                        "expected_save_fraction": result.expected_save_fraction,
                    }
                )
    return rows


def offset_sweep(
    records: Sequence[PenaltyRecord],
    policies: Sequence[PolicySpec],
    offsets: Sequence[float],
    gk: GoalkeeperProfile,
    params: UncertaintyParams,
    tables: EmpiricalTables,
    models: Optional[ModelBundle] = None,
    feature_matrix: Optional[np.ndarray] = None,
) -> list[dict]:
    """Expected save fraction per (policy, starting offset toward the natural corner)."""
    rows = []
    for policy in policies:
        for offset in offsets:
            result = evaluate_policy(
                records, replace(policy, offset=offset), gk, params, tables,
                models=models, feature_matrix=feature_matrix,
            )
            rows.append(
                {
                    "policy": policy.kind,
                    "offset": offset,
                    "expected_save_fraction": result.expected_save_fraction,
                }
            )
    return rows


@dataclass(frozen=True)
class UncertaintyFit:
    early_range: float
    late_range: float
    mu: float
    rho: float
    brier: float
    calibration: list[CalibrationBin]
    n_kicks: int


def fit_uncertainty(
    records: Sequence[PenaltyRecord],
    range_grid: Optional[Sequence[float]] = None,
    mu_grid: Optional[Sequence[float]] = None,
    rho_grid: Optional[Sequence[float]] = None,
) -> UncertaintyFit:
    """Grid search of (early range, late range, mu, rho) minimizing the Brier score.

    Uses on-target kicks where the keeper dove to the correct corner with
    known timing, keeper assumed at goal center.  Ties break to the smallest
    Brier then lexicographically smallest parameters.
    """
    r_grid = np.round(np.arange(2.5, 3.51, 0.1), 1) if range_grid is None else np.asarray(range_grid)
    m_grid = np.round(np.arange(0.5, 1.01, 0.1), 1) if mu_grid is None else np.asarray(mu_grid)
    p_grid = np.round(np.arange(0.5, 1.01, 0.1), 1) if rho_grid is None else np.asarray(rho_grid)

    d_by_timing: dict[str, list[float]] = {"early": [], "late": []}
    y_by_timing: dict[str, list[float]] = {"early": [], "late": []}
    for rec in records:
        if not rec.on_target or rec.keeper_timing not in ("early", "late"):
            continue
        if rec.keeper_dive_zone != classify_zone(rec.end_x, rec.foot):
            continue
        d_by_timing[rec.keeper_timing].append(distance_to_center(rec.end_x, rec.end_z))
        y_by_timing[rec.keeper_timing].append(1.0 if rec.outcome == "saved" else 0.0)
    n_early = len(d_by_timing["early"])
    n_late = len(d_by_timing["late"])
    if n_early + n_late == 0:
        raise DomainError("no eligible kicks: need on-target correct-corner dives with known timing")

    def sub_scores(ds: list[float], ys: list[float]) -> np.ndarray:
        out = np.zeros((len(r_grid), len(m_grid), len(p_grid)))
        if not ds:
            return out
        d = np.array(ds)
        y = np.array(ys)
        for i, r in enumerate(r_grid):
            for j, mu in enumerate(m_grid):
                frac = _reach_fraction(d, float(r), float(mu))
                for k, rho in enumerate(p_grid):
                    out[i, j, k] = float(np.mean((rho * frac - y) ** 2))
        return out
    early_scores = sub_scores(d_by_timing["early"], y_by_timing["early"])
    late_scores = sub_scores(d_by_timing["late"], y_by_timing["late"])

    total = n_early + n_late
    best = None
    for ie, r_e in enumerate(r_grid):
        for il, r_l in enumerate(r_grid):
            for j, mu in enumerate(m_grid):
                for k, rho in enumerate(p_grid):
                    score = (
                        n_early * early_scores[ie, j, k] + n_late * late_scores[il, j, k]
                    ) / total
                    if best is None or score < best[0]:
                        best = (score, float(r_e), float(r_l), float(mu), float(rho))
    score, r_e, r_l, mu, rho = best

    params = UncertaintyParams(mu=mu, rho=rho)
    preds, ys = [], []
    for timing, r in (("early", r_e), ("late", r_l)):
        d = np.array(d_by_timing[timing]) if d_by_timing[timing] else np.empty(0)
        preds.extend(rho * _reach_fraction(d, r, mu))
        ys.extend(y_by_timing[timing])
    return UncertaintyFit(
        early_range=r_e,
        late_range=r_l,
        mu=mu,
        rho=rho,
        brier=score,
        calibration=calibration_bins(np.array(preds), np.array(ys), 10),
        n_kicks=total,
    )


def available_policies(
    gk: GoalkeeperProfile,
    have_direction_model: bool,
    have_distance_model: bool,
    gt_mix: Optional[tuple[float, float, float]] = None,
) -> list[str]:
    """Policy kinds a keeper profile and the loaded artifacts can support."""
    kinds = ["early"]
    if have_direction_model:
        kinds.append("early_educated")
    if gk.can_dive_late:
        kinds.insert(0, "late")
        if have_direction_model and have_distance_model:
            kinds.append("mixed_educated")
    if gt_mix is not None and (gt_mix[1] == 0 or gk.can_dive_late):
        kinds.append("game_theoretic")
    return kinds


@dataclass
class PolicyAdvice:
    p_save: dict[str, float]
    recommendation: str
    instruction: str
    seed: int


def advise(
    feature_values: np.ndarray,
    gk: GoalkeeperProfile,
    params: UncertaintyParams,
    tables: EmpiricalTables,
    models: ModelBundle,
    seed: int,
    policies: Optional[Sequence[str]] = None,
    gt_mix: Optional[tuple[float, float, float]] = None,
    p_dependent: Optional[float] = None,
    offset: Optional[float] = None,
) -> PolicyAdvice:
    """Per-policy save probability for a hypothetical kick, plus a sampled instruction.

    The direction model supplies zone probabilities and the expectation runs
    over zones and the dependent/independent prior; reach terms average over
    the training data's per-zone end locations.  The instruction is sampled
    proportionally to the per-policy save probabilities, deterministic given
    the seed.
    """
    if models.direction is None or models.distance is None:
        raise DomainError("advise needs trained direction and distance models")
    kinds = list(
        policies
        if policies is not None
        else available_policies(gk, True, True, gt_mix=gt_mix)
    )
    for kind in kinds:
        if kind in ("late", "mixed_educated") and not gk.can_dive_late:
            raise DomainError(f"policy {kind} requested for a keeper without a late range")
    off = offset if offset is not None else gk.start_offset
    p_dep = tables.p_dependent if p_dependent is None else p_dependent

    zone_probs = predict_direction(models.direction, feature_values)
    predicted_dist = predict_distance(models.distance, feature_values)

    reach: dict[tuple[str, str], float] = {}  # (zone or "dependent", timing) -> mean reach
    def mean_reach(kind: str, timing: str) -> float:
        key = (kind, timing)
        if key not in reach:
            r = gk.late_range if timing == "late" else gk.early_range
            locs = (
                tables.dependent_locations
                if kind == "dependent"
                else tables.zone_locations.get(kind, np.empty((0, 2)))
            )
            reach[key] = _mean_reach(locs, off, r, params)
        return reach[key]

    def independent_term(kind: str, zone: str, zone_p: float) -> float:
        if kind == "late":
            return gk.p_late_correct_independent * mean_reach(zone, "late")
        if kind == "early":
            mix = {"natural": tables.early_mix[0], "nonnatural": tables.early_mix[1], "center": 0.0}
            return mix[zone] * mean_reach(zone, "early")
        if kind == "early_educated":
            return zone_p * mean_reach(zone, "early")
        if kind == "mixed_educated":
            timing = "late" if predicted_dist <= gk.late_range else "early"
            p_c = gk.p_late_correct_independent if timing == "late" else zone_p
            return p_c * mean_reach(zone, timing)
        raise DomainError(f"bad policy kind {kind!r}")

    def dependent_term(kind: str) -> float:
        if kind == "late":
            return gk.p_late_correct_dependent * mean_reach("dependent", "late")
        if kind in ("early", "early_educated"):
            return gk.p_early_correct_dependent * mean_reach("dependent", "early")
        if kind == "mixed_educated":
            timing = "late" if predicted_dist <= gk.late_range else "early"
            p_c = (
                gk.p_late_correct_dependent
                if timing == "late"
                else gk.p_early_correct_dependent
            )
            return p_c * mean_reach("dependent", timing)
        raise DomainError(f"bad policy kind {kind!r}")

    p_save: dict[str, float] = {}
    for kind in kinds:
        if kind == "game_theoretic":
            if gt_mix is None:
                raise DomainError("game_theoretic advice needs gt_mix")
            value = 0.0
            for weight, action_kind in zip(gt_mix, ("early_natural", "late", "early_nonnatural")):
                if weight == 0:
                    continue
                if action_kind == "late":
                    ind = sum(
                        zone_probs[ZI] * independent_term("late", zone, zone_probs[ZI])
                        for ZI, zone in enumerate(DIRECTION_CLASSES)
                    )
                    dep = dependent_term("late")
                else:
                    commit = "natural" if action_kind == "early_natural" else "nonnatural"
                    ind = zone_probs[DIRECTION_CLASSES.index(commit)] * mean_reach(commit, "early")
                    dep = gk.p_early_correct_dependent * mean_reach("dependent", "early")
                value += weight * ((1 - p_dep) * ind + p_dep * dep)
            p_save[kind] = value
            continue
        ind = sum(
            zone_probs[ZI] * independent_term(kind, zone, zone_probs[ZI])
            for ZI, zone in enumerate(DIRECTION_CLASSES)
        )
        p_save[kind] = (1 - p_dep) * ind + p_dep * dependent_term(kind)

    recommendation = max(p_save, key=lambda k: (p_save[k], k))
    weights = np.array([p_save[k] for k in kinds], dtype=float)
    if weights.sum() <= 0:
        weights = np.ones(len(kinds))
    rng = np.random.default_rng(seed)
    instruction = kinds[int(rng.choice(len(kinds), p=weights / weights.sum()))]
    return PolicyAdvice(
        p_save={k: float(v) for k, v in p_save.items()},
        recommendation=recommendation,
        instruction=instruction,
        seed=seed,
    )
