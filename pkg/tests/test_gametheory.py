import itertools

import numpy as np
import pytest

from keepersim.core import DomainError
from keepersim.gametheory import (
    KEEPER_ACTIONS,
    KICKER_ACTIONS,
    MixedStrategy,
    PayoffMatrix,
    empirical_strategies,
    estimate_payoff,
    payoff_from_rows,
    payoff_to_rows,
    solve_minimax,
)

from test_core import make_record

# reference empirical payoff matrix: kicker rows (natural, center, nonnatural, dependent)
# against keeper columns (early natural, late, early nonnatural)
REFERENCE_PAYOFF = np.array(
    [
        [0.615, 0.785, 0.939],
        [0.846, 0.273, 0.865],
        [0.947, 0.785, 0.556],
        [0.846, 0.773, 0.846],
    ]
)


def matrix_of(values):
    values = np.asarray(values, dtype=float)
    return PayoffMatrix(
        values=values,
        counts=np.ones(values.shape, dtype=int),
        row_actions=tuple(f"r{i}" for i in range(values.shape[0])),
        col_actions=tuple(f"c{j}" for j in range(values.shape[1])),
    )


def oracle_support_enumeration(A, tol=1e-10):
    """Independent equilibrium finder: try all equal-size support pairs, solve
    the equalization systems, and verify best-response conditions."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    for size in range(1, min(m, n) + 1):
        for rows in itertools.combinations(range(m), size):
            for cols in itertools.combinations(range(n), size):
                sub = A[np.ix_(rows, cols)]
                # keeper mix y on cols and value v: rows of sub all equal v
                try:
                    sol = np.linalg.solve(
                        np.vstack([np.hstack([sub, -np.ones((size, 1))]),
                                   np.hstack([np.ones(size), 0.0])]),
                        np.concatenate([np.zeros(size), [1.0]]),
                    )
                    y_sub, v = sol[:-1], sol[-1]
                    solx = np.linalg.solve(
                        np.vstack([np.hstack([sub.T, -np.ones((size, 1))]),
                                   np.hstack([np.ones(size), 0.0])]),
                        np.concatenate([np.zeros(size), [1.0]]),
                    )
                    x_sub = solx[:-1]
                except np.linalg.LinAlgError:
                    continue
                if y_sub.min() < -tol or x_sub.min() < -tol:
                    continue
                x = np.zeros(m)
                x[list(rows)] = np.clip(x_sub, 0, None)
                y = np.zeros(n)
                y[list(cols)] = np.clip(y_sub, 0, None)
                x /= x.sum()
                y /= y.sum()
                if (A @ y).max() <= v + 1e-9 and (x @ A).min() >= v - 1e-9:
                    return x, y, float(v)
    raise AssertionError("oracle found no equilibrium")


def assert_equilibrium(A, kicker, keeper, value, tol=1e-9):
    A = np.asarray(A)
    x = np.array(kicker.probs)
    y = np.array(keeper.probs)
    row_payoffs = A @ y
    col_payoffs = x @ A
    assert row_payoffs.max() <= value + tol
    assert col_payoffs.min() >= value - tol
    for i, xi in enumerate(x):
        if xi > 1e-9:
            assert row_payoffs[i] == pytest.approx(value, abs=tol)
    for j, yj in enumerate(y):
        if yj > 1e-9:
            assert col_payoffs[j] == pytest.approx(value, abs=tol)


class TestSolveMinimax:
    def test_reference_payoff_equilibrium(self):
        matrix = PayoffMatrix(values=REFERENCE_PAYOFF, counts=np.ones((4, 3), dtype=int))
        kicker, keeper, value = solve_minimax(matrix)
        for got, want in zip(keeper.probs, (0.069, 0.871, 0.060)):
            assert abs(got - want) <= 0.005
        for got, want in zip(kicker.probs, (0.431, 0.000, 0.357, 0.211)):
            assert abs(got - want) <= 0.005
        assert_equilibrium(REFERENCE_PAYOFF, kicker, keeper, value)

    def test_matching_pennies(self):
        kicker, keeper, value = solve_minimax(matrix_of([[1.0, 0.0], [0.0, 1.0]]))
        assert kicker.probs == pytest.approx((0.5, 0.5))
        assert keeper.probs == pytest.approx((0.5, 0.5))
        assert value == pytest.approx(0.5)

    def test_dominant_row(self):
        kicker, keeper, value = solve_minimax(matrix_of([[0.9, 0.8, 0.7], [0.1, 0.2, 0.3]]))
        assert kicker.probs[0] == pytest.approx(1.0)
        assert value == pytest.approx(0.7)

    def test_random_matrices_match_support_enumeration_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            A = rng.random((4, 3))
            kicker, keeper, value = solve_minimax(matrix_of(A))
            assert_equilibrium(A, kicker, keeper, value)
            _, _, oracle_value = oracle_support_enumeration(A)
            assert value == pytest.approx(oracle_value, abs=1e-9)

    def test_scaling_preserves_supports_and_scales_value(self):
        rng = np.random.default_rng(5)
        A = rng.random((4, 3))
        k1, g1, v1 = solve_minimax(matrix_of(A))
        k2, g2, v2 = solve_minimax(matrix_of(0.4 * A))
        assert v2 == pytest.approx(0.4 * v1, abs=1e-9)
        assert [p > 1e-9 for p in k1.probs] == [p > 1e-9 for p in k2.probs]
        assert [p > 1e-9 for p in g1.probs] == [p > 1e-9 for p in g2.probs]

    def test_corner_relabeling_permutes_equilibrium(self):
        perm_rows = [2, 1, 0, 3]  # swap natural and nonnatural kicks
        perm_cols = [2, 1, 0]  # swap the two early dives
        A = REFERENCE_PAYOFF[np.ix_(perm_rows, perm_cols)]
        k1, g1, v1 = solve_minimax(matrix_of(REFERENCE_PAYOFF))
        k2, g2, v2 = solve_minimax(matrix_of(A))
        assert v2 == pytest.approx(v1, abs=1e-9)
        assert np.allclose(np.array(k2.probs)[np.argsort(perm_rows)], k1.probs, atol=1e-9)
        assert np.allclose(np.array(g2.probs)[np.argsort(perm_cols)], g1.probs, atol=1e-9)

    def test_empty_cell_refused_with_name(self):
        values = REFERENCE_PAYOFF.copy()
        values[1, 2] = np.nan
        matrix = PayoffMatrix(values=values, counts=np.ones((4, 3), dtype=int))
        with pytest.raises(DomainError, match="center vs early_nonnatural"):
            solve_minimax(matrix)

    def test_restrict_to_supported_actions(self):
        values = REFERENCE_PAYOFF.copy()
        values[1, :] = np.nan
        matrix = PayoffMatrix(values=values, counts=np.ones((4, 3), dtype=int))
        sub = matrix.restrict(("natural", "nonnatural", "dependent"), KEEPER_ACTIONS)
        kicker, keeper, value = solve_minimax(sub)
        assert len(kicker.probs) == 3


def records_for_cell(kicker_action, keeper_action, n_scored, n_total, start=0):
    """Construct records whose derived actions land in one payoff cell."""
    records = []
    strategy = "dependent" if kicker_action == "dependent" else "independent"
    x = {"natural": -2.0, "center": 0.0, "nonnatural": 2.0, "dependent": -2.0}[kicker_action]
    timing = "late" if keeper_action == "late" else "early"
    dive = {"early_natural": "natural", "late": "center", "early_nonnatural": "nonnatural"}[
        keeper_action
    ]
    for i in range(n_total):
        records.append(
            make_record(
                kick_id=f"{kicker_action}-{keeper_action}-{i + start}",
                foot="right",
                taker_strategy=strategy,
                end_x=x,
                end_z=0.5,
                outcome="goal" if i < n_scored else "saved",
                keeper_timing=timing,
                keeper_dive_zone=dive,
            )
        )
    return records


class TestEstimatePayoff:
    def test_reproduces_reference_cells_to_three_decimals(self):
        records = []
        for i, ka in enumerate(KICKER_ACTIONS):
            for j, ga in enumerate(KEEPER_ACTIONS):
                scored = int(round(REFERENCE_PAYOFF[i, j] * 1000))
                records.extend(records_for_cell(ka, ga, scored, 1000))
        matrix = estimate_payoff(records)
        assert np.allclose(np.round(matrix.values, 3), REFERENCE_PAYOFF)
        assert matrix.counts.sum() == 12000

    def test_all_scored(self):
        records = records_for_cell("natural", "late", 5, 5)
        matrix = estimate_payoff(records)
        assert matrix.values[0, 1] == 1.0

    def test_single_saved_kick(self):
        records = records_for_cell("center", "early_natural", 0, 1)
        matrix = estimate_payoff(records)
        assert matrix.values[1, 0] == 0.0
        assert len(matrix.empty_cells) == 11

    def test_round_trip_rows(self):
        records = records_for_cell("natural", "late", 3, 4)
        matrix = estimate_payoff(records)
        back = payoff_from_rows(payoff_to_rows(matrix))
        assert np.allclose(back.values[0, 1], matrix.values[0, 1])
        assert back.counts[0, 1] == 4


class TestEmpiricalStrategies:
    def test_observed_mixes_fixture(self):
        records = []
        kicker_counts = dict(zip(KICKER_ACTIONS, (395, 115, 284, 206)))
        keeper_counts = dict(zip(KEEPER_ACTIONS, (359, 385, 256)))
        # build 1000 records hitting the exact marginals
        kicker_stream = [ka for ka, n in kicker_counts.items() for _ in range(n)]
        keeper_stream = [ga for ga, n in keeper_counts.items() for _ in range(n)]
        for i, (ka, ga) in enumerate(zip(kicker_stream, keeper_stream)):
            records.extend(records_for_cell(ka, ga, 1, 1, start=i * 10))
        kicker, keeper = empirical_strategies(records)
        assert kicker.probs == pytest.approx((0.395, 0.115, 0.284, 0.206))
        assert keeper.probs == pytest.approx((0.359, 0.385, 0.256))

    def test_uniform_fixture(self):
        records = []
        for i, ka in enumerate(KICKER_ACTIONS):
            for j, ga in enumerate(KEEPER_ACTIONS):
                records.extend(records_for_cell(ka, ga, 1, 3, start=100 * (3 * i + j)))
        kicker, keeper = empirical_strategies(records)
        assert kicker.probs == pytest.approx((0.25,) * 4)
        assert keeper.probs == pytest.approx((1 / 3,) * 3)

    def test_degenerate_single_action(self):
        records = records_for_cell("dependent", "late", 2, 4)
        kicker, _ = empirical_strategies(records)
        assert kicker.probs == pytest.approx((0, 0, 0, 1.0))


class TestMixedStrategy:
    def test_must_sum_to_one(self):
        with pytest.raises(DomainError):
            MixedStrategy(("a", "b"), (0.5, 0.6))

    def test_as_dict(self):
        mix = MixedStrategy(("a", "b"), (0.25, 0.75))
        assert mix.as_dict() == {"a": 0.25, "b": 0.75}


class TestRestrictFullSupport:
    def test_drops_the_empty_row(self):
        from keepersim.gametheory import restrict_to_full_support

        values = REFERENCE_PAYOFF.copy()
        values[1, 1] = np.nan
        matrix = PayoffMatrix(values=values, counts=np.ones((4, 3), dtype=int))
        sub = restrict_to_full_support(matrix)
        assert sub.row_actions == ("natural", "nonnatural", "dependent")
        assert sub.col_actions == KEEPER_ACTIONS
        assert not sub.empty_cells

    def test_column_dropped_when_worse(self):
        from keepersim.gametheory import restrict_to_full_support

        values = REFERENCE_PAYOFF.copy()
        values[:, 1] = np.nan
        matrix = PayoffMatrix(values=values, counts=np.ones((4, 3), dtype=int))
        sub = restrict_to_full_support(matrix)
        assert sub.col_actions == ("early_natural", "early_nonnatural")
        assert sub.row_actions == KICKER_ACTIONS

    def test_all_empty_refused(self):
        from keepersim.core import DomainError
        from keepersim.gametheory import restrict_to_full_support

        values = np.full((4, 3), np.nan)
        matrix = PayoffMatrix(values=values, counts=np.zeros((4, 3), dtype=int))
        with pytest.raises(DomainError, match="no fully supported"):
            restrict_to_full_support(matrix)
