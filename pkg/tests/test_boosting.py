import numpy as np
import pytest

from keepersim.models import boosting
from keepersim.models.boosting import HyperParams, ModelError
from keepersim.models.metrics import logloss


@pytest.fixture(scope="module")
def toy_data():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(600, 8))
    X[rng.random(size=X.shape) < 0.2] = np.nan
    x0 = np.nan_to_num(X[:, 0])
    y = np.where(x0 < -0.4, 0, np.where(x0 > 0.4, 2, 1))
    return X, y


def test_constant_regression_labels(toy_data):
    X, _ = toy_data
    y = np.full(X.shape[0], 2.5)
    model = boosting.train("regression", X, y, HyperParams(n_trees=20))
    assert np.allclose(boosting.predict_distance(model, X), 2.5)


def test_regression_clamps_to_goal_bounds(toy_data):
    X, _ = toy_data
    y = np.abs(np.nan_to_num(X[:, 0])) * 10
    model = boosting.train("regression", X, y, HyperParams(n_trees=30))
    preds = boosting.predict_distance(model, X)
    assert preds.max() <= 4.4
    assert preds.min() >= 0.0


def test_multiclass_learns_signal(toy_data):
    X, y = toy_data
    model = boosting.train("multiclass_3", X, y, HyperParams(0.1, 4, 40))
    probs = boosting.predict_direction(model, X)
    base = np.bincount(y, minlength=3) / len(y)
    assert logloss(probs, y) < logloss(np.tile(base, (len(y), 1)), y)


def test_probabilities_sum_to_one_even_all_nan(toy_data):
    X, y = toy_data
    model = boosting.train("multiclass_3", X, y, HyperParams(0.1, 3, 10))
    probs = boosting.predict_direction(model, X)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    lonely = boosting.predict_direction(model, np.full(X.shape[1], np.nan))
    assert lonely.shape == (3,)
    assert lonely.sum() == pytest.approx(1.0)


def test_zero_round_multiclass_returns_base_rates(toy_data):
    X, y = toy_data
    model = boosting.train("multiclass_3", X, y, HyperParams(n_trees=0))
    probs = boosting.predict_direction(model, X[:5])
    base = np.bincount(y, minlength=3) / len(y)
    assert np.allclose(probs, base, atol=1e-9)


def test_zero_round_regression_returns_mean(toy_data):
    X, _ = toy_data
    y = np.abs(np.nan_to_num(X[:, 1]))
    model = boosting.train("regression", X, y, HyperParams(n_trees=0))
    assert boosting.predict_distance(model, X[0]) == pytest.approx(y.mean())


def test_determinism(toy_data):
    X, y = toy_data
    a = boosting.train("multiclass_3", X, y, HyperParams(0.1, 4, 15), seed=7)
    b = boosting.train("multiclass_3", X, y, HyperParams(0.1, 4, 15), seed=7)
    for ta, tb in zip(a.trees, b.trees):
        for na, nb in zip(ta, tb):
            assert (na.feature, na.threshold, na.missing_left, na.value) == (
                nb.feature, nb.threshold, nb.missing_left, nb.value,
            )


def test_task_guards(toy_data):
    X, y = toy_data
    clf = boosting.train("multiclass_3", X, y, HyperParams(n_trees=5))
    reg = boosting.train("regression", X, y.astype(float), HyperParams(n_trees=5))
    with pytest.raises(ModelError):
        boosting.predict_distance(clf, X[0])
    with pytest.raises(ModelError):
        boosting.predict_direction(reg, X[0])


def test_single_class_rejected(toy_data):
    X, _ = toy_data
    with pytest.raises(ModelError, match="two classes"):
        boosting.train("multiclass_3", X, np.zeros(X.shape[0], dtype=int), HyperParams())


def test_empty_data_rejected():
    with pytest.raises(ModelError):
        boosting.train("regression", np.empty((0, 4)), np.empty(0), HyperParams())


def test_missing_routing_learned():
    # feature 0 is missing exactly when the label is high, so the learned
    # default direction must separate the two groups
    rng = np.random.default_rng(3)
    X = rng.normal(size=(400, 2))
    y = np.where(rng.random(400) < 0.5, 1.0, 3.0)
    X[y == 3.0, 0] = np.nan
    model = boosting.train("regression", X, y, HyperParams(0.3, 2, 25))
    pred_missing = boosting.predict_distance(model, np.array([np.nan, 0.0]))
    pred_present = boosting.predict_distance(model, np.array([0.0, 0.0]))
    assert pred_missing > pred_present


def test_serialization_round_trip(tmp_path, toy_data):
    X, y = toy_data
    names = [f"feat_{i}" for i in range(X.shape[1])]
    model = boosting.train("multiclass_3", X, y, HyperParams(0.1, 3, 10), feature_names=names)
    path = tmp_path / "model.json"
    boosting.save_model(model, path)
    back = boosting.load_model(path, expected_features=names)
    assert np.allclose(
        boosting.predict_direction(model, X), boosting.predict_direction(back, X)
    )


def test_schema_mismatch_rejected(tmp_path, toy_data):
    X, y = toy_data
    names = [f"feat_{i}" for i in range(X.shape[1])]
    model = boosting.train("multiclass_3", X, y, HyperParams(0.1, 3, 5), feature_names=names)
    path = tmp_path / "model.json"
    boosting.save_model(model, path)
    with pytest.raises(ModelError, match="different feature schema"):
        boosting.load_model(path, expected_features=["other"] * len(names))


def test_corrupted_schema_hash_rejected(tmp_path, toy_data):
    X, y = toy_data
    model = boosting.train("multiclass_3", X, y, HyperParams(0.1, 3, 5))
    path = tmp_path / "model.json"
    boosting.save_model(model, path)
    text = path.read_text().replace('"f0"', '"f0x"', 1)
    path.write_text(text)
    with pytest.raises(ModelError, match="hash"):
        boosting.load_model(path)


def test_default_grid_matches_tuning_values():
    grid = boosting.default_grid()
    assert len(grid) == 36
    assert {hp.learning_rate for hp in grid} == {0.01, 0.05, 0.1}
    assert {hp.max_depth for hp in grid} == {3, 4, 5, 6}
    assert {hp.n_trees for hp in grid} == {50, 100, 250}
