"""Empirical payoff estimation and exact solution of the augmented penalty game.

The kicker picks one of four actions (natural, center, nonnatural, dependent),
the goalkeeper one of three (early dive to the natural corner, late dive,
early dive to the nonnatural corner).  Cell values are scoring probabilities;
the kicker maximizes and the keeper minimizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import DomainError, PenaltyRecord, nominal_zone

KICKER_ACTIONS = ("natural", "center", "nonnatural", "dependent")
KEEPER_ACTIONS = ("early_natural", "late", "early_nonnatural")

_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class MixedStrategy:
    """Probability vector over a declared action list."""

    actions: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.actions) != len(self.probs):
            raise DomainError("actions and probs length mismatch")
        if min(self.probs) < -1e-12 or abs(sum(self.probs) - 1.0) > 1e-9:
            raise DomainError(f"probs must be nonnegative and sum to 1, got {self.probs}")

    def as_dict(self) -> dict:
        return dict(zip(self.actions, self.probs))


@dataclass
class PayoffMatrix:
    """Scoring probabilities and support counts for every action pair."""

    values: np.ndarray  # shape (4, 3), NaN where unsupported
    counts: np.ndarray  # shape (4, 3), int
    row_actions: tuple[str, ...] = KICKER_ACTIONS
    col_actions: tuple[str, ...] = KEEPER_ACTIONS

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.counts = np.asarray(self.counts, dtype=int)
        if self.values.shape != (len(self.row_actions), len(self.col_actions)):
            raise DomainError(f"payoff shape {self.values.shape} does not match actions")
        if self.counts.shape != self.values.shape:
            raise DomainError("counts shape does not match values")
        occupied = ~np.isnan(self.values)
        if np.any(self.values[occupied] < 0) or np.any(self.values[occupied] > 1):
            raise DomainError("payoff cells must be probabilities in [0,1]")
        if np.any(self.counts < 0):
            raise DomainError("counts must be >= 0")

    @property
    def empty_cells(self) -> list[tuple[str, str]]:
        out = []
        for i, row in enumerate(self.row_actions):
            for j, col in enumerate(self.col_actions):
                if np.isnan(self.values[i, j]):
                    out.append((row, col))
        return out

    def restrict(self, rows: Sequence[str], cols: Sequence[str]) -> "PayoffMatrix":
        ri = [self.row_actions.index(r) for r in rows]
        ci = [self.col_actions.index(c) for c in cols]
        return PayoffMatrix(
            values=self.values[np.ix_(ri, ci)],
            counts=self.counts[np.ix_(ri, ci)],
            row_actions=tuple(rows),
            col_actions=tuple(cols),
        )


def kicker_action(rec: PenaltyRecord) -> Optional[str]:
    """Row action of a kick: dependent, or the zone the ball crossed (nearest zone if off target)."""
    if rec.taker_strategy == "dependent":
        return "dependent"
    if rec.taker_strategy == "unknown":
        return None
    return nominal_zone(rec.end_x, rec.foot)


def keeper_action(rec: PenaltyRecord) -> Optional[str]:
    """Column action of a kick; None when timing is unknown or the dive is an early center (not modeled)."""
    if rec.keeper_timing == "late":
        return "late"
    if rec.keeper_timing == "early":
        if rec.keeper_dive_zone == "natural":
            return "early_natural"
        if rec.keeper_dive_zone == "nonnatural":
            return "early_nonnatural"
    return None


def estimate_payoff(records: Iterable[PenaltyRecord]) -> PayoffMatrix:
    """Empirical scoring probability per action pair; cells without observations are NaN."""
    scored = np.zeros((4, 3))
    counts = np.zeros((4, 3), dtype=int)
    for rec in records:
        ka = kicker_action(rec)
        ga = keeper_action(rec)
        if ka is None or ga is None:
            continue
        i = KICKER_ACTIONS.index(ka)
        j = KEEPER_ACTIONS.index(ga)
        counts[i, j] += 1
        if rec.outcome == "goal":
            scored[i, j] += 1
    with np.errstate(invalid="ignore"):
        values = np.where(counts > 0, scored / np.maximum(counts, 1), np.nan)
    return PayoffMatrix(values=values, counts=counts)


def empirical_strategies(
    records: Iterable[PenaltyRecord],
) -> tuple[MixedStrategy, MixedStrategy]:
    """Observed relative frequencies of kicker and keeper actions."""
    k_counts = np.zeros(4)
    g_counts = np.zeros(3)
    for rec in records:
        ka = kicker_action(rec)
        if ka is not None:
            k_counts[KICKER_ACTIONS.index(ka)] += 1
        ga = keeper_action(rec)
        if ga is not None:
            g_counts[KEEPER_ACTIONS.index(ga)] += 1
    if k_counts.sum() == 0 or g_counts.sum() == 0:
        raise DomainError("no records with classifiable actions")
    kicker = MixedStrategy(KICKER_ACTIONS, tuple(float(p) for p in k_counts / k_counts.sum()))
    keeper = MixedStrategy(KEEPER_ACTIONS, tuple(float(p) for p in g_counts / g_counts.sum()))
    return kicker, keeper


def _lp_vertices(n_vars: int, eq_row: np.ndarray, ineq_lhs: np.ndarray, ineq_rhs: np.ndarray):
    """All vertices of {z : eq_row @ z = 1, ineq_lhs @ z <= ineq_rhs}.

    Brute-force enumeration of tight-constraint subsets; exact for the tiny
    systems a penalty game produces (a handful of actions per player).
    """
    n_ineq = ineq_lhs.shape[0]
    vertices = []
    for tight in combinations(range(n_ineq), n_vars - 1):
        system = np.vstack([eq_row, ineq_lhs[list(tight)]])
        rhs = np.concatenate([[1.0], ineq_rhs[list(tight)]])
        if abs(np.linalg.det(system)) < 1e-12:
            continue
        z = np.linalg.solve(system, rhs)
        slack = ineq_lhs @ z - ineq_rhs
        if np.max(slack) <= _FEAS_TOL:
            vertices.append(z)
    return vertices


def solve_minimax(matrix: PayoffMatrix) -> tuple[MixedStrategy, MixedStrategy, float]:
    """Exact minimax equilibrium of the zero-sum game.

    Solves each player's linear program by exhaustive vertex enumeration,
    which is exact at this size.  When several optimal mixes exist, the
    lexicographically smallest one is returned for determinism.
    """
    empty = matrix.empty_cells
    if empty:
        raise DomainError(
            "payoff matrix has empty cells "
            + ", ".join(f"({r} vs {c})" for r, c in empty)
            + "; restrict to supported actions or impute before solving"
        )
    A = matrix.values
    m, n = A.shape

    # Keeper LP over (y, w): minimize w s.t. A y <= w, sum y = 1, y >= 0.
    eq = np.concatenate([np.ones(n), [0.0]])
    ineq_lhs = np.vstack(
        [
            np.hstack([A, -np.ones((m, 1))]),  # (A y)_i - w <= 0
            np.hstack([-np.eye(n), np.zeros((n, 1))]),  # -y_j <= 0
        ]
    )
    ineq_rhs = np.zeros(m + n)
    vertices = _lp_vertices(n + 1, eq, ineq_lhs, ineq_rhs)
    if not vertices:
        raise DomainError("keeper LP has no vertices; malformed payoff matrix")
    w_star = min(v[-1] for v in vertices)
    optimal_y = [v[:n] for v in vertices if v[-1] <= w_star + _FEAS_TOL]
    keeper = min(optimal_y, key=lambda y: tuple(y))

    # Kicker LP over (x, v): maximize v s.t. A^T x >= v, sum x = 1, x >= 0.
    eq = np.concatenate([np.ones(m), [0.0]])
    ineq_lhs = np.vstack(
        [
            np.hstack([-A.T, np.ones((n, 1))]),  # v - (A^T x)_j <= 0
            np.hstack([-np.eye(m), np.zeros((m, 1))]),
        ]
    )
    ineq_rhs = np.zeros(n + m)
    vertices = _lp_vertices(m + 1, eq, ineq_lhs, ineq_rhs)
    if not vertices:
        raise DomainError("kicker LP has no vertices; malformed payoff matrix")
    v_star = max(v[-1] for v in vertices)
    optimal_x = [v[:m] for v in vertices if v[-1] >= v_star - _FEAS_TOL]
    kicker = min(optimal_x, key=lambda x: tuple(x))

    if abs(v_star - w_star) > 1e-7:
        raise DomainError(f"LP duality gap {abs(v_star - w_star)}; numerical failure")

    kicker = np.clip(kicker, 0.0, None)
    keeper = np.clip(keeper, 0.0, None)
    kicker_mix = MixedStrategy(matrix.row_actions, tuple(float(p) for p in kicker / kicker.sum()))
    keeper_mix = MixedStrategy(matrix.col_actions, tuple(float(p) for p in keeper / keeper.sum()))
    return kicker_mix, keeper_mix, float(w_star)


def restrict_to_full_support(matrix: PayoffMatrix) -> PayoffMatrix:
    """Largest action subsets whose submatrix has no empty cells.

    Rows and columns are dropped greedily, worst offender first (most empty
    cells; ties prefer dropping a row, then the lowest index), so the result
    is deterministic.  Refuses to return an empty game.
    """
    values = matrix.values.copy()
    rows = list(range(values.shape[0]))
    cols = list(range(values.shape[1]))
    while rows and cols:
        sub = matrix.values[np.ix_(rows, cols)]
        holes = np.isnan(sub)
        if not holes.any():
            break
        row_holes = holes.sum(axis=1)
        col_holes = holes.sum(axis=0)
        if row_holes.max() >= col_holes.max():
            rows.pop(int(np.argmax(row_holes)))
        else:
            cols.pop(int(np.argmax(col_holes)))
    if not rows or not cols:
        raise DomainError("no fully supported action subset; every action has an empty cell")
    return matrix.restrict(
        [matrix.row_actions[i] for i in rows], [matrix.col_actions[j] for j in cols]
    )


def payoff_to_rows(matrix: PayoffMatrix) -> list[dict]:
    """Flatten a payoff matrix into CSV-ready rows."""
    rows = []
    for i, ka in enumerate(matrix.row_actions):
        for j, ga in enumerate(matrix.col_actions):
            value = matrix.values[i, j]
            rows.append(
                {
                    "kicker_action": ka,
                    "keeper_action": ga,
                    "scoring_probability": None if np.isnan(value) else float(value),
                    "count": int(matrix.counts[i, j]),
                }
            )
    return rows


def payoff_from_rows(rows: Iterable[dict]) -> PayoffMatrix:
    values = np.full((4, 3), np.nan)
    counts = np.zeros((4, 3), dtype=int)
    for row in rows:
        i = KICKER_ACTIONS.index(row["kicker_action"])
        j = KEEPER_ACTIONS.index(row["keeper_action"])
        p = row.get("scoring_probability")
        if p is not None and p != "":
            values[i, j] = float(p)
        counts[i, j] = int(row.get("count") or 0)
    return PayoffMatrix(values=values, counts=counts)
