"""Session-wide synthetic dataset and trained models shared across test modules."""

import numpy as np
import pytest

from keepersim.core import UncertaintyParams, distance_to_center, nominal_zone
from keepersim.datagen import GeneratorConfig, generate
from keepersim.features import FEATURE_NAMES, build_feature_matrix
from keepersim.models import HyperParams, boosting
from keepersim.simulator import DIRECTION_CLASSES, EmpiricalTables, ModelBundle

TRAIN_SEED = 55
EVAL_SEED = 66
N_TRAIN = 8000
N_EVAL = 4000


@pytest.fixture(scope="session")
def train_records():
    return generate(GeneratorConfig(n_kicks=N_TRAIN, seed=TRAIN_SEED))


@pytest.fixture(scope="session")
def eval_records():
    # in-game kicks only, as the first use case requires
    return generate(GeneratorConfig(n_kicks=N_EVAL, seed=EVAL_SEED, shootout_fraction=0.0))


@pytest.fixture(scope="session")
def train_data(train_records):
    matrix, ordered = build_feature_matrix(train_records)
    return matrix, ordered


@pytest.fixture(scope="session")
def eval_data(eval_records):
    matrix, ordered = build_feature_matrix(eval_records)
    return matrix, ordered


@pytest.fixture(scope="session")
def direction_model(train_data):
    matrix, ordered = train_data
    mask = np.array([r.taker_strategy == "independent" for r in ordered])
    labels = np.array([DIRECTION_CLASSES.index(nominal_zone(r.end_x, r.foot)) for r in ordered])
    return boosting.train(
        "multiclass_3", matrix[mask], labels[mask],
        HyperParams(0.1, 4, 50), feature_names=FEATURE_NAMES,
    )


@pytest.fixture(scope="session")
def distance_model(train_data):
    matrix, ordered = train_data
    mask = np.array([r.on_target for r in ordered])
    labels = np.array([distance_to_center(r.end_x, r.end_z) for r in ordered])
    return boosting.train(
        "regression", matrix[mask], labels[mask],
        HyperParams(0.1, 5, 250), feature_names=FEATURE_NAMES,
    )


@pytest.fixture(scope="session")
def model_bundle(direction_model, distance_model):
    return ModelBundle(direction=direction_model, distance=distance_model)


@pytest.fixture(scope="session")
def tables(train_data):
    _, ordered = train_data
    return EmpiricalTables.from_records(ordered)


@pytest.fixture(scope="session")
def params():
    return UncertaintyParams(mu=0.7, rho=0.7)
