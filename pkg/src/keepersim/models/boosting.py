"""Gradient-boosted regression trees with native missing-value routing.

Exact greedy splits on raw feature values.  Missing values are tried on both
children at training time and routed to the loss-minimizing side; the chosen
default direction is stored per node so prediction is total on NaN inputs.
Multiclass training grows one tree per class per round under a softmax
objective; regression minimizes squared error.  Leaf values are Newton steps
with L2 regularization.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from numba import njit

TASKS = ("multiclass_3", "regression")
N_CLASSES = 3
DISTANCE_CAP = 4.4  # goal-mouth diagonal bound, meters
LAMBDA_L2 = 1.0
MODEL_FORMAT_VERSION = 1

_MIN_GAIN = 1e-12


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class HyperParams:
    learning_rate: float = 0.1
    max_depth: int = 4
    n_trees: int = 100
    min_child_weight: float = 1.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ModelError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.max_depth < 1:
            raise ModelError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.n_trees < 0:
            raise ModelError(f"n_trees must be >= 0, got {self.n_trees}")
        if self.min_child_weight < 0:
            raise ModelError(f"min_child_weight must be >= 0, got {self.min_child_weight}")


def default_grid() -> list[HyperParams]:
    """Grid-search settings: learning rate x depth x tree count."""
    return [
        HyperParams(learning_rate=lr, max_depth=d, n_trees=n)
        for lr in (0.01, 0.05, 0.1)
        for d in (3, 4, 5, 6)
        for n in (50, 100, 250)
    ]


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = 0.0
    missing_left: bool = True
    left: int = -1
    right: int = -1
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass
class BoostedModel:
    task: str
    trees: list[list[TreeNode]]  # multiclass: round-major, class-minor
    learning_rate: float
    base_score: np.ndarray  # shape (3,) for multiclass, (1,) for regression
    feature_names: tuple[str, ...]

    def __post_init__(self):
        if self.task not in TASKS:
            raise ModelError(f"bad task {self.task!r}")


@njit(cache=True)
def _scan_splits(X, g, h, sorted_rows, finite_counts, min_child_weight):  # pragma: no cover
    """Best split over all features for one node; exact scan of raw values.

    ``sorted_rows[:, f]`` lists the node's rows ordered by feature f with
    NaN rows at the tail (the first ``finite_counts[f]`` entries are finite).
    Ties resolve to the lowest feature index, lowest threshold, then routing
    missing values left, so the tree is independent of scan scheduling.
    """
    n, n_feat = sorted_rows.shape
    G = 0.0
    H = 0.0
    for i in range(n):
        r = sorted_rows[i, 0]
        G += g[r]
        H += h[r]
    parent_score = G * G / (H + LAMBDA_L2)
    best_gain = _MIN_GAIN
    best_f = -1
    best_thr = 0.0
    best_ml = True
    for f in range(n_feat):
        k = finite_counts[f]
        if k < 2:
            continue
        gm = 0.0
        hm = 0.0
        for i in range(k, n):
            r = sorted_rows[i, f]
            gm += g[r]
            hm += h[r]
        cg = 0.0
        ch = 0.0
        for i in range(k - 1):
            r = sorted_rows[i, f]
            cg += g[r]
            ch += h[r]
            x_here = X[r, f]
            x_next = X[sorted_rows[i + 1, f], f]
            if not x_here < x_next:
                continue
            thr = 0.5 * (x_here + x_next)
            for direction in range(2):  # 0: missing left, 1: missing right
                if direction == 1 and hm == 0.0 and gm == 0.0:
                    break
                gl = cg + gm if direction == 0 else cg
                hl = ch + hm if direction == 0 else ch
                gr = G - gl
                hr = H - hl
                if hl < min_child_weight or hr < min_child_weight:
                    continue
                gain = 0.5 * (
                    gl * gl / (hl + LAMBDA_L2) + gr * gr / (hr + LAMBDA_L2) - parent_score
                )
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_thr = thr
                    best_ml = direction == 0
    return best_gain, best_f, best_thr, best_ml


@njit(cache=True)
def _partition_node(X, sorted_rows, finite_counts, f, threshold, missing_left):  # pragma: no cover
    """Split a node's per-feature sorted row lists into the two children.

    Filtering preserves order, so children inherit sorted lists (and the
    NaN tail) without re-sorting.
    """
    n, n_feat = sorted_rows.shape
    n_left = 0
    for i in range(n):
        r = sorted_rows[i, 0]
        x = X[r, f]
        if (np.isnan(x) and missing_left) or x < threshold:
            n_left += 1
    left = np.empty((n_left, n_feat), dtype=sorted_rows.dtype)
    right = np.empty((n - n_left, n_feat), dtype=sorted_rows.dtype)
    left_fc = np.empty(n_feat, dtype=finite_counts.dtype)
    right_fc = np.empty(n_feat, dtype=finite_counts.dtype)
    for c in range(n_feat):
        k = finite_counts[c]
        li = 0
        ri = 0
        lf = 0
        rf = 0
        for i in range(n):
            r = sorted_rows[i, c]
            x = X[r, f]
            if (np.isnan(x) and missing_left) or x < threshold:
                left[li, c] = r
                li += 1
                if i < k:
                    lf += 1
            else:
                right[ri, c] = r
                ri += 1
                if i < k:
                    rf += 1
        left_fc[c] = lf
        right_fc[c] = rf
    return left, left_fc, right, right_fc


def _presort(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sorted_rows = np.argsort(X, axis=0, kind="stable").astype(np.int32)  # NaN rows last
    finite_counts = np.count_nonzero(~np.isnan(X), axis=0).astype(np.int64)
    return sorted_rows, finite_counts


def _grow_tree(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    sorted_rows: np.ndarray,
    finite_counts: np.ndarray,
    max_depth: int,
    min_child_weight: float,
) -> list[TreeNode]:
    nodes: list[TreeNode] = []
    stack = [(sorted_rows, finite_counts, 0, -1, "")]
    while stack:
        srows, fcounts, depth, parent, side = stack.pop()
        nid = len(nodes)
        if parent >= 0:
            setattr(nodes[parent], side, nid)
        split = None
        if depth < max_depth and srows.shape[0] >= 2:
            gain, f, threshold, missing_left = _scan_splits(
                X, g, h, srows, fcounts, min_child_weight
            )
            if f >= 0:
                split = (f, threshold, bool(missing_left))
        if split is None:
            rows = srows[:, 0]
            value = -g[rows].sum() / (h[rows].sum() + LAMBDA_L2)
            nodes.append(TreeNode(value=float(value)))
            continue
        f, threshold, missing_left = split
        nodes.append(TreeNode(feature=f, threshold=threshold, missing_left=missing_left))
        left, left_fc, right, right_fc = _partition_node(
            X, srows, fcounts, f, threshold, missing_left
        )
        # push right first so the left child is grown (and numbered) first
        stack.append((right, right_fc, depth + 1, nid, "right"))
        stack.append((left, left_fc, depth + 1, nid, "left"))
    return nodes


def _tree_predict(nodes: list[TreeNode], X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0])
    stack = [(0, np.arange(X.shape[0]))]
    while stack:
        nid, idx = stack.pop()
        if idx.size == 0:
            continue
        node = nodes[nid]
        if node.is_leaf:
            out[idx] = node.value
            continue
        col = X[idx, node.feature]
        go_left = col < node.threshold
        go_left = np.where(np.isnan(col), node.missing_left, go_left)
        stack.append((node.left, idx[go_left]))
        stack.append((node.right, idx[~go_left]))
    return out


def _softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def train(
    task: str,
    feature_matrix: np.ndarray,
    labels: np.ndarray,
    hp: HyperParams,
    seed: int = 0,
    feature_names: Optional[Sequence[str]] = None,
) -> BoostedModel:
    """Fit a boosted tree ensemble.  Exact greedy training; deterministic given inputs.

    ``seed`` is accepted for interface stability but exact greedy growth
    draws no random numbers.
    """
    if task not in TASKS:
        raise ModelError(f"bad task {task!r}")
    X = np.asarray(feature_matrix, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ModelError("feature matrix must be a nonempty 2-D array")
    y = np.asarray(labels)
    if y.shape[0] != X.shape[0]:
        raise ModelError(f"length mismatch: {X.shape[0]} rows vs {y.shape[0]} labels")
    names = tuple(feature_names) if feature_names else tuple(f"f{i}" for i in range(X.shape[1]))
    if len(names) != X.shape[1]:
        raise ModelError("feature_names length does not match matrix width")

    sorted_rows, finite_counts = _presort(X)
    trees: list[list[TreeNode]] = []
    if task == "regression":
        y = y.astype(float)
        if np.any(y < 0):
            raise ModelError("regression labels must be nonnegative distances")
        base = np.array([y.mean()])
        pred = np.full(len(y), base[0])
        for _ in range(hp.n_trees):
            g = pred - y
            h = np.ones(len(y))
            tree = _grow_tree(
                X, g, h, sorted_rows, finite_counts, hp.max_depth, hp.min_child_weight
            )
            trees.append(tree)
            pred += hp.learning_rate * _tree_predict(tree, X)
    else:
        y = y.astype(int)
        present = np.unique(y)
        if present.size < 2:
            raise ModelError("multiclass training needs at least two classes present")
        if y.min() < 0 or y.max() >= N_CLASSES:
            raise ModelError(f"class labels must be in [0, {N_CLASSES})")
        counts = np.bincount(y, minlength=N_CLASSES).astype(float)
        freqs = np.clip(counts / counts.sum(), 1e-6, None)
        base = np.log(freqs)
        scores = np.tile(base, (len(y), 1))
        onehot = np.eye(N_CLASSES)[y]
        for _ in range(hp.n_trees):
            p = _softmax(scores)
            grad = np.ascontiguousarray(p - onehot)
            hess = np.ascontiguousarray(np.maximum(p * (1.0 - p), 1e-16))
            for k in range(N_CLASSES):
                tree = _grow_tree(
                    X,
                    grad[:, k].copy(),
                    hess[:, k].copy(),
                    sorted_rows,
                    finite_counts,
                    hp.max_depth,
                    hp.min_child_weight,
                )
                trees.append(tree)
                scores[:, k] += hp.learning_rate * _tree_predict(tree, X)

    return BoostedModel(
        task=task,
        trees=trees,
        learning_rate=hp.learning_rate,
        base_score=base,
        feature_names=names,
    )


def _as_matrix(model: BoostedModel, fv: np.ndarray) -> np.ndarray:
    X = np.asarray(fv, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != len(model.feature_names):
        raise ModelError(
            f"feature vector has {X.shape[1]} values, model expects {len(model.feature_names)}"
        )
    return X


def predict_direction(model: BoostedModel, fv: np.ndarray) -> np.ndarray:
    """Class probabilities over (natural, center, nonnatural); rows sum to 1."""
    if model.task != "multiclass_3":
        raise ModelError(f"predict_direction needs a multiclass model, got task {model.task!r}")
    X = _as_matrix(model, fv)
    scores = np.tile(model.base_score, (X.shape[0], 1))
    for r, tree in enumerate(model.trees):
        scores[:, r % N_CLASSES] += model.learning_rate * _tree_predict(tree, X)
    probs = _softmax(scores)
    return probs[0] if np.asarray(fv).ndim == 1 else probs


def predict_distance(model: BoostedModel, fv: np.ndarray) -> np.ndarray:
    """Predicted end-location distance from goal center, clamped to [0, 4.4] m."""
    if model.task != "regression":
        raise ModelError(f"predict_distance needs a regression model, got task {model.task!r}")
    X = _as_matrix(model, fv)
    pred = np.full(X.shape[0], model.base_score[0])
    for tree in model.trees:
        pred += model.learning_rate * _tree_predict(tree, X)
    pred = np.clip(pred, 0.0, DISTANCE_CAP)
    return float(pred[0]) if np.asarray(fv).ndim == 1 else pred


def schema_hash(feature_names: Sequence[str]) -> str:
    return hashlib.sha256(",".join(feature_names).encode()).hexdigest()[:16]


def save_model(model: BoostedModel, path: str | Path) -> None:
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "task": model.task,
        "learning_rate": model.learning_rate,
        "base_score": [float(v) for v in model.base_score],
        "feature_names": list(model.feature_names),
        "feature_schema_hash": schema_hash(model.feature_names),
        "trees": [
            [
                {
                    "feature": n.feature,
                    "threshold": n.threshold,
                    "missing_left": n.missing_left,
                    "left": n.left,
                    "right": n.right,
                    "value": n.value,
                }
                for n in tree
            ]
            for tree in model.trees
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))


def load_model(path: str | Path, expected_features: Optional[Sequence[str]] = None) -> BoostedModel:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelError(f"unsupported model format {payload.get('format_version')!r}")
    names = tuple(payload["feature_names"])
    if payload.get("feature_schema_hash") != schema_hash(names):
        raise ModelError(f"{path}: feature schema hash does not match embedded names")
    if expected_features is not None and tuple(expected_features) != names:
        raise ModelError(
            f"{path}: model was trained on a different feature schema; retrain or "
            "export features with the matching schema"
        )
    trees = [
        [
            TreeNode(
                feature=n["feature"],
                threshold=n["threshold"],
                missing_left=n["missing_left"],
                left=n["left"],
                right=n["right"],
                value=n["value"],
            )
            for n in tree
        ]
        for tree in payload["trees"]
    ]
    return BoostedModel(
        task=payload["task"],
        trees=trees,
        learning_rate=payload["learning_rate"],
        base_score=np.array(payload["base_score"]),
        feature_names=names,
    )
