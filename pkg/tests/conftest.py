"""Shared fixtures: the GRID4 table and hand-checkable models over it."""

import itertools
import math

import numpy as np
import pytest

from app.core.types import Dataset, FeatureKind
from app.data import synth
from app.models import FunctionModel
from app.utils.validators import bind_observation

# x* = (1, 1) on GRID4
GRID4_EXPECTED = {
    "prod": {"baseline": 0.25, "delta_1": 0.25, "delta_12": 0.75, "interaction": 0.25},
    "add": {"baseline": 1.0, "delta_1": 0.5, "delta_12": 1.0, "interaction": 0.0},
    "xor": {"baseline": 0.5, "delta_1": 0.0, "delta_12": -0.5, "interaction": -0.5},
}


def prod_model() -> FunctionModel:
    return FunctionModel(lambda X: X[:, 0] * X[:, 1], name="prod")


def add_model() -> FunctionModel:
    return FunctionModel(lambda X: X[:, 0] + X[:, 1], name="add")


def xor_model() -> FunctionModel:
    return FunctionModel(lambda X: np.not_equal(X[:, 0], X[:, 1]).astype(float), name="xor")


def const_model(value: float = 0.7) -> FunctionModel:
    return FunctionModel(lambda X: np.full(X.shape[0], value), name="const")


MODELS = {"prod": prod_model, "add": add_model, "xor": xor_model}


@pytest.fixture
def grid4() -> Dataset:
    dataset, _ = synth("grid4")
    return dataset


@pytest.fixture
def corner(grid4):
    """The observation x* = (1, 1)."""
    return bind_observation(grid4, ["1", "1"])


@pytest.fixture
def random_table():
    """Small random numeric dataset for oracle comparisons."""
    rng = np.random.default_rng(7)
    matrix = rng.normal(size=(30, 4))
    return Dataset(
        feature_names=("a", "b", "c", "d"),
        feature_kinds=(FeatureKind.NUMERIC,) * 4,
        matrix=matrix,
    )


def expectation_oracle(model, background: np.ndarray, x: np.ndarray, fixed) -> float:
    """E[f | x_S = x*_S] computed directly over the background rows."""
    batch = np.array(background, dtype=float, copy=True)
    for i in fixed:
        batch[:, i] = x[i]
    return float(np.mean(model.predict(batch)))


def shapley_oracle(model, background: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Shapley values by enumerating every subset of the other features."""
    p = background.shape[1]
    values = np.zeros(p)
    for i in range(p):
        others = [j for j in range(p) if j != i]
        for size in range(p):
            weight = math.factorial(size) * math.factorial(p - size - 1) / math.factorial(p)
            for subset in itertools.combinations(others, size):
                with_i = expectation_oracle(model, background, x, subset + (i,))
                without_i = expectation_oracle(model, background, x, subset)
                values[i] += weight * (with_i - without_i)
    return values
