import datetime as dt
from functools import lru_cache

import pytest

from keepersim.core import DomainError
from keepersim.linkage import (
    EntityMapping,
    NamedEntity,
    SourceGame,
    SourcePenalty,
    dates_match,
    map_entities,
    map_games,
    map_penalties,
    merge_sources,
    name_similarity,
)


def lev_oracle(a, b):
    """Independent recursive Levenshtein used to freeze expected similarities."""

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(go(i - 1, j) + 1, go(i, j - 1) + 1, go(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return go(len(a), len(b))


class TestNameSimilarity:
    def test_identical(self):
        assert name_similarity("Ajax", "Ajax") == 1.0

    def test_disjoint_single_chars(self):
        assert name_similarity("a", "b") == 0.0

    def test_athletic_bilbao_vs_athletic_club(self):
        # frozen from difflib.SequenceMatcher.ratio and the recursive
        # Levenshtein oracle: RO 10/14... = 0.714286, Levenshtein 1 - 5/15
        assert name_similarity("Athletic Bilbao", "Athletic Club") == pytest.approx(
            0.7142857142857143
        )
        assert lev_oracle("athletic bilbao", "athletic club") == 5

    def test_case_and_whitespace_invariance(self):
        assert name_similarity("  FC  Barcelona ", "fc barcelona") == 1.0

    def test_symmetry(self):
        for a, b in [("Ajax", "AFC Ajax"), ("Inter", "Internazionale")]:
            assert name_similarity(a, b) == pytest.approx(name_similarity(b, a))

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            name_similarity("  ", "Ajax")


def entities(names, source="A", kind="team"):
    return [NamedEntity(source, n, kind) for n in names]


class TestMapEntities:
    def test_identical_lists_fully_mapped(self):
        a = entities(["Ajax", "Feyenoord", "PSV"])
        b = entities(["Ajax", "Feyenoord", "PSV"], source="B")
        mapping = map_entities(a, b)
        assert len(mapping.accepted) == 3
        assert mapping.unresolved == []

    def test_team_variant_auto_accepts_when_thresholds_hold(self):
        # "Athletic Club Bilbao" vs "Athletic Bilbao" scores 0.857 with the
        # runner-up far below 0.8, so both Appendix-style conditions hold
        a = entities(["Athletic Club Bilbao", "Real Madrid"])
        b = entities(["Athletic Bilbao", "Real Madrid CF", "Sevilla"], source="B")
        mapping = map_entities(a, b)
        cand = mapping.accepted["athletic club bilbao"]
        assert cand.right.raw_name == "Athletic Bilbao"
        assert cand.auto_accepted and cand.score > 0.8

    def test_sub_threshold_pair_goes_to_override_path(self):
        # 0.714 < 0.8: below the auto threshold, so it must resolve manually
        a = entities(["Athletic Bilbao"])
        b = entities(["Athletic Club", "Getafe"], source="B")
        assert map_entities(a, b).accepted == {}
        with_override = map_entities(a, b, overrides={"Athletic Bilbao": "Athletic Club"})
        assert with_override.target("Athletic Bilbao") == "Athletic Club"

    def test_two_close_candidates_unresolved(self):
        a = entities(["FC United"])
        b = entities(["FC Unitede", "FC Uniteda"], source="B")
        mapping = map_entities(a, b)
        assert mapping.accepted == {}
        assert len(mapping.unresolved) == 1

    def test_empty_target_list_all_unresolved(self):
        mapping = map_entities(entities(["Ajax"]), [])
        assert mapping.accepted == {}
        assert len(mapping.unresolved) == 1

    def test_injective_collisions_demoted(self):
        a = entities(["Sporting Lisbon A", "Sporting Lisbon B"])
        b = entities(["Sporting Lisbon"], source="B")
        mapping = map_entities(a, b)
        assert mapping.accepted == {}
        assert len(mapping.unresolved) == 2

    def test_mixed_kinds_rejected(self):
        with pytest.raises(DomainError):
            map_entities(entities(["Ajax"]), entities(["Jan"], source="B", kind="player"))


class TestMapGames:
    def games(self):
        mapping = map_entities(
            entities(["Ajax", "PSV", "Feyenoord"]),
            entities(["Ajax", "PSV", "Feyenoord"], source="B"),
        )
        return mapping

    def test_exact_date(self):
        assert dates_match(dt.date(2021, 3, 4), dt.date(2021, 3, 4))

    def test_one_day_difference(self):
        assert dates_match(dt.date(2021, 3, 4), dt.date(2021, 3, 5))

    def test_day_month_swap(self):
        assert dates_match(dt.date(2021, 3, 4), dt.date(2021, 4, 3))

    def test_three_days_apart_rejected(self):
        assert not dates_match(dt.date(2021, 3, 1), dt.date(2021, 3, 4))

    def test_invalid_swap_not_attempted(self):
        assert not dates_match(dt.date(2021, 1, 31), dt.date(2021, 12, 1))

    def test_pairs_and_unmatched(self):
        mapping = self.games()
        games_a = [
            SourceGame("a1", "Ajax", "PSV", dt.date(2021, 3, 4)),
            SourceGame("a2", "Ajax", "Feyenoord", dt.date(2021, 5, 1)),
        ]
        games_b = [
            SourceGame("b1", "PSV", "Ajax", dt.date(2021, 4, 3)),  # swapped sides + date swap
            SourceGame("b2", "Feyenoord", "PSV", dt.date(2021, 5, 1)),
        ]
        pairs, unmatched = map_games(games_a, games_b, mapping)
        assert [(a.game_id, b.game_id) for a, b in pairs] == [("a1", "b1")]
        assert [g.game_id for g in unmatched] == ["a2"]

    def test_ambiguity_is_an_error(self):
        mapping = self.games()
        games_a = [SourceGame("a1", "Ajax", "PSV", dt.date(2021, 3, 4))]
        games_b = [
            SourceGame("b1", "Ajax", "PSV", dt.date(2021, 3, 4)),
            SourceGame("b2", "Ajax", "PSV", dt.date(2021, 3, 5)),
        ]
        with pytest.raises(DomainError, match="matches multiple"):
            map_games(games_a, games_b, mapping)


def pen(pid, game, player, minute, result="goal", direction="left", foot="right", **kw):
    return SourcePenalty(
        penalty_id=pid, game_id=game, player=player, minute=minute,
        result=result, direction=direction, foot=foot, **kw,
    )


class TestMapPenalties:
    def setup_method(self):
        self.game_pair = (
            SourceGame("a1", "Ajax", "PSV", dt.date(2021, 3, 4)),
            SourceGame("b1", "Ajax", "PSV", dt.date(2021, 3, 4)),
        )
        self.players = map_entities(
            entities(["Jan Smit"], kind="player"),
            entities(["Jan Smit"], source="B", kind="player"),
        )

    def test_single_kick_matches_on_taker_and_time(self):
        pairs, unresolved = map_penalties(
            [pen("pa", "a1", "Jan Smit", 30)],
            [pen("pb", "b1", "Jan Smit", 32)],
            self.game_pair,
            self.players,
        )
        assert [(a.penalty_id, b.penalty_id) for a, b in pairs] == [("pa", "pb")]
        assert unresolved == []

    def test_multi_kick_disambiguated_by_result(self):
        pairs, unresolved = map_penalties(
            [pen("pa1", "a1", "Jan Smit", 30, result="goal"),
             pen("pa2", "a1", "Jan Smit", 31, result="saved")],
            [pen("pb1", "b1", "Jan Smit", 30, result="saved"),
             pen("pb2", "b1", "Jan Smit", 30, result="goal")],
            self.game_pair,
            self.players,
        )
        matched = {a.penalty_id: b.penalty_id for a, b in pairs}
        assert matched == {"pa1": "pb2", "pa2": "pb1"}

    def test_time_outside_tolerance_unresolved(self):
        pairs, unresolved = map_penalties(
            [pen("pa", "a1", "Jan Smit", 10)],
            [pen("pb", "b1", "Jan Smit", 50)],
            self.game_pair,
            self.players,
        )
        assert pairs == []
        assert [p.penalty_id for p in unresolved] == ["pa"]


def _merge_fixture():
    games_a = [
        SourceGame("a1", "Athletic Bilbao", "Real Madrid", dt.date(2021, 3, 4)),
        SourceGame("a2", "Real Madrid", "Sevilla", dt.date(2021, 6, 2)),
    ]
    games_b = [
        SourceGame("b1", "Athletic Club", "Real Madrid CF", dt.date(2021, 4, 3)),
        SourceGame("b2", "Real Madrid CF", "Sevilla FC", dt.date(2021, 6, 2)),
    ]
    pens_a = [
        pen("pa1", "a1", "Jan Smit", 30, strategy="dependent", keeper_timing="late",
            keeper_dive_direction="left"),
        pen("pa2", "a2", "Piet Prins", 60, result="saved", strategy="independent",
            keeper_timing="early", keeper_dive_direction="right"),
    ]
    pens_b = [
        pen("pb1", "b1", "Jan Smit", 31, end_x=-2.5, end_z=0.4, goal_diff=0),
        pen("pb2", "b2", "Piet Prins", 62, result="saved", end_x=2.2, end_z=1.1, goal_diff=-1),
    ]
    overrides = {
        ("team", "Athletic Bilbao"): "Athletic Club",
        ("team", "Real Madrid"): "Real Madrid CF",
        ("team", "Sevilla"): "Sevilla FC",
    }
    return games_a, games_b, pens_a, pens_b, overrides


def test_merge_end_to_end():
    games_a, games_b, pens_a, pens_b, overrides = _merge_fixture()
    result = merge_sources(games_a, games_b, pens_a, pens_b, overrides=overrides)
    assert result.report.games_matched == 2
    assert result.report.penalties_matched == 2
    assert len(result.records) == 2
    by_taker = {r.taker_id: r for r in result.records}
    dep = by_taker["Jan Smit"]
    assert dep.taker_strategy == "dependent"
    assert dep.keeper_timing == "late"
    assert dep.keeper_dive_zone == "natural"  # dive left, right-footed kicker
    assert dep.end_x == -2.5
    saved = by_taker["Piet Prins"]
    assert saved.outcome == "saved"
    assert saved.keeper_dive_zone == "nonnatural"


def test_merge_deterministic():
    games_a, games_b, pens_a, pens_b, overrides = _merge_fixture()
    first = merge_sources(games_a, games_b, pens_a, pens_b, overrides=overrides)
    second = merge_sources(
        list(reversed(games_a)), games_b, list(reversed(pens_a)), pens_b, overrides=overrides
    )
    assert first.records == second.records
    assert vars(first.report) == vars(second.report)
