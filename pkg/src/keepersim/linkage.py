"""Merge two penalty datasets with inconsistent names, dates, and times.

Source A is the annotation dataset (kicker strategy, keeper timing and dive
direction); source B is the event dataset (end coordinates, game context,
shootout order).  Matching proceeds in three stages: team names, games,
then penalties within matched games.  Everything that cannot be matched
automatically is surfaced for manual resolution through an override file.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from difflib import SequenceMatcher
from typing import Optional, Sequence

from .core import DomainError, PenaltyRecord, natural_corner_sign

AUTO_THRESHOLD = 0.8  # strict: a candidate must score strictly above
DEFAULT_TIME_TOLERANCE_MIN = 5


@dataclass(frozen=True)
class NamedEntity:
    source: str  # "A" or "B"
    raw_name: str
    entity_kind: str  # "team" or "player"

    def __post_init__(self):
        if not self.raw_name.strip():
            raise DomainError("entity name is empty")
        if self.entity_kind not in ("team", "player"):
            raise DomainError(f"bad entity kind {self.entity_kind!r}")


@dataclass(frozen=True)
class MatchCandidate:
    left: NamedEntity
    right: NamedEntity
    score: float
    auto_accepted: bool

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise DomainError(f"score must be in [0,1], got {self.score}")
        if self.auto_accepted and self.score <= AUTO_THRESHOLD:
            raise DomainError("auto-accepted candidate at or below threshold")


@dataclass(frozen=True)
class SourceGame:
    game_id: str
    team_home: str
    team_away: str
    date: dt.date


@dataclass(frozen=True)
class SourcePenalty:
    """Normalized per-source penalty row; fields a source does not record stay None."""

    penalty_id: str
    game_id: str
    player: str
    minute: int
    result: str  # goal / saved / off_target
    direction: Optional[str] = None  # left / center / right, kicker's perspective
    foot: Optional[str] = None
    strategy: Optional[str] = None  # independent / dependent
    keeper_timing: Optional[str] = None  # early / late
    keeper_dive_direction: Optional[str] = None  # left / center / right
    end_x: Optional[float] = None
    end_z: Optional[float] = None
    is_shootout: bool = False
    shootout_kick_index: Optional[int] = None
    shootout_team_kick_index: Optional[int] = None
    goal_diff: int = 0


def _normalize(name: str) -> str:
    return " ".join(name.split()).casefold()


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def name_similarity(a: str, b: str) -> float:
    """Max of Ratcliff-Obershelp similarity and length-normalized Levenshtein similarity.

    Comparison is case-insensitive and whitespace-normalized.  The Levenshtein
    similarity is 1 - distance / max(len(a), len(b)), floored at 0.
    """
    na, nb = _normalize(a), _normalize(b)
    if not na or not nb:
        raise DomainError("name_similarity needs nonempty strings")
    ro = SequenceMatcher(None, na, nb).ratio()
    lev = 1.0 - _levenshtein(na, nb) / max(len(na), len(nb))
    return max(ro, max(0.0, lev))


@dataclass
class EntityMapping:
    accepted: dict[str, MatchCandidate]  # normalized A name -> candidate
    unresolved: list[tuple[NamedEntity, list[MatchCandidate]]]

    def target(self, raw_name: str) -> Optional[str]:
        cand = self.accepted.get(_normalize(raw_name))
        return cand.right.raw_name if cand else None


def map_entities(
    list_a: Sequence[NamedEntity],
    list_b: Sequence[NamedEntity],
    overrides: Optional[dict[str, str]] = None,
) -> EntityMapping:
    """Auto-map each A entity to its best B match when the best scores above
    0.8 and the runner-up below; everything else is unresolved.

    Overrides (raw A name -> raw B name) resolve entities before scoring.
    The accepted mapping is injective: two A entities auto-mapped onto one B
    entity are both demoted to unresolved.
    """
    kinds = {e.entity_kind for e in list(list_a) + list(list_b)}
    if len(kinds) > 1:
        raise DomainError(f"mixed entity kinds {sorted(kinds)}")
    overrides = {_normalize(k): v for k, v in (overrides or {}).items()}
    b_by_norm = {_normalize(e.raw_name): e for e in list_b}

    accepted: dict[str, MatchCandidate] = {}
    unresolved: list[tuple[NamedEntity, list[MatchCandidate]]] = []
    seen_a = set()
    for ent in list_a:
        key = _normalize(ent.raw_name)
        if key in seen_a:
            continue
        seen_a.add(key)
        if key in overrides:
            target_norm = _normalize(overrides[key])
            target = b_by_norm.get(target_norm)
            if target is None:
                raise DomainError(
                    f"override maps {ent.raw_name!r} to unknown entity {overrides[key]!r}"
                )
            accepted[key] = MatchCandidate(ent, target, 1.0, auto_accepted=True)
            continue
        scored = sorted(
            (
                MatchCandidate(ent, b, name_similarity(ent.raw_name, b.raw_name), False)
                for b in list_b
            ),
            key=lambda c: (-c.score, c.right.raw_name),
        )
        top2 = scored[:2]
        best = top2[0].score if top2 else 0.0
        second = top2[1].score if len(top2) > 1 else 0.0
        if best > AUTO_THRESHOLD and second < AUTO_THRESHOLD:
            accepted[key] = replace(top2[0], auto_accepted=True)
        else:
            unresolved.append((ent, top2))

    # demote collisions: no B entity may be auto-mapped twice
    by_target: dict[str, list[str]] = {}
    for a_key, cand in accepted.items():
        by_target.setdefault(_normalize(cand.right.raw_name), []).append(a_key)
    for colliding in by_target.values():
        if len(colliding) > 1:
            for a_key in colliding:
                cand = accepted.pop(a_key)
                unresolved.append((cand.left, [replace(cand, auto_accepted=False)]))
    unresolved.sort(key=lambda item: item[0].raw_name)
    return EntityMapping(accepted=accepted, unresolved=unresolved)


def _swapped_date(date: dt.date) -> Optional[dt.date]:
    try:
        return dt.date(date.year, date.day, date.month)
    except ValueError:
        return None


def dates_match(a: dt.date, b: dt.date) -> bool:
    """Equal, off by one day, or equal after swapping day and month."""
    if a == b or abs((a - b).days) == 1:
        return True
    swapped = _swapped_date(a)
    return swapped is not None and swapped == b


def map_games(
    games_a: Sequence[SourceGame],
    games_b: Sequence[SourceGame],
    team_mapping: EntityMapping,
) -> tuple[list[tuple[SourceGame, SourceGame]], list[SourceGame]]:
    """Pair games whose mapped team pair and date agree; ambiguity is an error."""
    b_by_pair: dict[frozenset, list[SourceGame]] = {}
    for g in games_b:
        b_by_pair.setdefault(frozenset((_normalize(g.team_home), _normalize(g.team_away))), []).append(g)

    pairs: list[tuple[SourceGame, SourceGame]] = []
    unmatched: list[SourceGame] = []
    for game in sorted(games_a, key=lambda g: g.game_id):
        home = team_mapping.target(game.team_home)
        away = team_mapping.target(game.team_away)
        if home is None or away is None:
            unmatched.append(game)
            continue
        candidates = [
            g
            for g in b_by_pair.get(frozenset((_normalize(home), _normalize(away))), [])
            if dates_match(game.date, g.date)
        ]
        if len(candidates) > 1:
            listing = ", ".join(f"{g.game_id} ({g.date})" for g in candidates)
            raise DomainError(f"game {game.game_id} matches multiple games: {listing}")
        if candidates:
            pairs.append((game, candidates[0]))
        else:
            unmatched.append(game)
    return pairs, unmatched


def map_penalties(
    penalties_a: Sequence[SourcePenalty],
    penalties_b: Sequence[SourcePenalty],
    game_pair: tuple[SourceGame, SourceGame],
    player_mapping: EntityMapping,
    time_tolerance_min: int = DEFAULT_TIME_TOLERANCE_MIN,
) -> tuple[list[tuple[SourcePenalty, SourcePenalty]], list[SourcePenalty]]:
    """Pair penalties of one matched game; leftovers come back unresolved.

    A taker's single kick pairs on taker plus kick time within tolerance;
    several kicks by the same taker are disambiguated by result, then
    direction, then foot.
    """
    game_a, game_b = game_pair
    pens_a = sorted(
        (p for p in penalties_a if p.game_id == game_a.game_id), key=lambda p: p.penalty_id
    )
    pens_b = [p for p in penalties_b if p.game_id == game_b.game_id]

    pairs: list[tuple[SourcePenalty, SourcePenalty]] = []
    unresolved: list[SourcePenalty] = []
    used_b: set[str] = set()
    for pen in pens_a:
        target = player_mapping.target(pen.player)
        if target is None:
            unresolved.append(pen)
            continue
        candidates = [
            p
            for p in pens_b
            if p.penalty_id not in used_b
            and _normalize(p.player) == _normalize(target)
            and abs(p.minute - pen.minute) <= time_tolerance_min
        ]
        if len(candidates) > 1:
            for attr in ("result", "direction", "foot"):
                narrowed = [
                    p for p in candidates if getattr(p, attr) == getattr(pen, attr)
                ]
                if narrowed:
                    candidates = narrowed
                if len(candidates) == 1:
                    break
        if len(candidates) == 1:
            pairs.append((pen, candidates[0]))
            used_b.add(candidates[0].penalty_id)
        else:
            unresolved.append(pen)
    return pairs, unresolved


def _dive_zone(direction: Optional[str], foot: Optional[str]) -> str:
    """Kicker-perspective left/center/right dive converted to natural/center/nonnatural."""
    if direction is None or foot is None:
        return "unknown"
    if direction == "center":
        return "center"
    sign = +1 if direction == "right" else -1
    return "natural" if sign == natural_corner_sign(foot) else "nonnatural"


@dataclass
class MergeReport:
    teams_auto: int = 0
    teams_override: int = 0
    teams_unresolved: int = 0
    games_matched: int = 0
    games_unmatched: int = 0
    players_auto: int = 0
    players_override: int = 0
    players_unresolved: int = 0
    penalties_matched: int = 0
    penalties_unresolved: int = 0

    def rows(self) -> list[dict]:
        return [{"stage": k, "count": v} for k, v in vars(self).items()]


@dataclass
class MergeResult:
    records: list[PenaltyRecord]
    report: MergeReport
    unresolved_teams: list[str]
    unresolved_players: list[str]
    unresolved_penalties: list[str]


def _merged_record(pen_a: SourcePenalty, pen_b: SourcePenalty) -> PenaltyRecord:
    """Combine annotation fields from A with coordinates and context from B."""
    if pen_b.end_x is None or pen_b.end_z is None:
        raise DomainError(f"event penalty {pen_b.penalty_id} lacks end coordinates")
    foot = pen_a.foot or pen_b.foot
    if foot is None:
        raise DomainError(f"penalty {pen_a.penalty_id} has no foot in either source")
    return PenaltyRecord(
        kick_id=f"{pen_a.penalty_id}+{pen_b.penalty_id}",
        match_id=pen_b.game_id,
        taker_id=pen_b.player,
        keeper_id=f"gk-{pen_b.game_id}",
        minute=pen_b.minute,
        is_shootout=pen_b.is_shootout,
        shootout_kick_index=pen_b.shootout_kick_index if pen_b.is_shootout else None,
        shootout_team_kick_index=pen_b.shootout_team_kick_index if pen_b.is_shootout else None,
        goal_diff=pen_b.goal_diff,
        foot=foot,
        taker_strategy=pen_a.strategy or "unknown",
        end_x=pen_b.end_x,
        end_z=pen_b.end_z,
        outcome=pen_b.result,
        keeper_dive_zone=_dive_zone(pen_a.keeper_dive_direction, foot),
        keeper_timing=pen_a.keeper_timing or "unknown",
        pressure="normal",
    )


def merge_sources(
    games_a: Sequence[SourceGame],
    games_b: Sequence[SourceGame],
    penalties_a: Sequence[SourcePenalty],
    penalties_b: Sequence[SourcePenalty],
    overrides: Optional[dict[tuple[str, str], str]] = None,
    time_tolerance_min: int = DEFAULT_TIME_TOLERANCE_MIN,
) -> MergeResult:
    """Full three-stage merge; deterministic for identical inputs and overrides.

    ``overrides`` maps (kind, source name) to the target name, mirroring the
    override file (kind, source_name, target_name).
    """
    overrides = overrides or {}
    team_overrides = {name: tgt for (kind, name), tgt in overrides.items() if kind == "team"}
    player_overrides = {name: tgt for (kind, name), tgt in overrides.items() if kind == "player"}
    report = MergeReport()

    teams_a = sorted({g.team_home for g in games_a} | {g.team_away for g in games_a})
    teams_b = sorted({g.team_home for g in games_b} | {g.team_away for g in games_b})
    team_mapping = map_entities(
        [NamedEntity("A", t, "team") for t in teams_a],
        [NamedEntity("B", t, "team") for t in teams_b],
        overrides=team_overrides,
    )
    n_override = sum(
        1 for k in team_mapping.accepted if k in {_normalize(n) for n in team_overrides}
    )
    report.teams_override = n_override
    report.teams_auto = len(team_mapping.accepted) - n_override
    report.teams_unresolved = len(team_mapping.unresolved)

    game_pairs, games_unmatched = map_games(games_a, games_b, team_mapping)
    report.games_matched = len(game_pairs)
    report.games_unmatched = len(games_unmatched)

    records: list[PenaltyRecord] = []
    unresolved_pens: list[str] = []
    unresolved_players: set[str] = set()
    pens_a_by_game: dict[str, list[SourcePenalty]] = {}
    for p in penalties_a:
        pens_a_by_game.setdefault(p.game_id, []).append(p)
    pens_b_by_game: dict[str, list[SourcePenalty]] = {}
    for p in penalties_b:
        pens_b_by_game.setdefault(p.game_id, []).append(p)

    for game_a, game_b in sorted(game_pairs, key=lambda pair: pair[0].game_id):
        roster_a = sorted({p.player for p in pens_a_by_game.get(game_a.game_id, [])})
        roster_b = sorted({p.player for p in pens_b_by_game.get(game_b.game_id, [])})
        player_mapping = map_entities(
            [NamedEntity("A", n, "player") for n in roster_a],
            [NamedEntity("B", n, "player") for n in roster_b],
            overrides=player_overrides,
        )
        n_override = sum(
            1 for k in player_mapping.accepted if k in {_normalize(n) for n in player_overrides}
        )
        report.players_override += n_override
        report.players_auto += len(player_mapping.accepted) - n_override
        report.players_unresolved += len(player_mapping.unresolved)
        unresolved_players.update(e.raw_name for e, _ in player_mapping.unresolved)

        pairs, unresolved = map_penalties(
            pens_a_by_game.get(game_a.game_id, []),
            pens_b_by_game.get(game_b.game_id, []),
            (game_a, game_b),
            player_mapping,
            time_tolerance_min=time_tolerance_min,
        )
        report.penalties_matched += len(pairs)
        report.penalties_unresolved += len(unresolved)
        unresolved_pens.extend(p.penalty_id for p in unresolved)
        for pen_a, pen_b in pairs:
            records.append(_merged_record(pen_a, pen_b))

    records.sort(key=lambda r: (r.match_id, r.minute, r.kick_id))
    return MergeResult(
        records=records,
        report=report,
        unresolved_teams=sorted(e.raw_name for e, _ in team_mapping.unresolved),
        unresolved_players=sorted(unresolved_players),
        unresolved_penalties=sorted(unresolved_pens),
    )
