"""Synthetic datasets for property tests and the bundled benchmark suite."""

import logging
from typing import Callable, Dict, Tuple

import numpy as np

from app.core.types import Dataset, FeatureKind
from app.errors import ValidationError

logger = logging.getLogger(__name__)

PRODUCT_NOISE_SCALE = 0.1

GRID4_ROWS = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])


def _numeric_dataset(matrix: np.ndarray, names) -> Dataset:
    return Dataset(
        feature_names=tuple(names),
        feature_kinds=tuple(FeatureKind.NUMERIC for _ in names),
        matrix=matrix,
    )


def _xor(n: int, rng: np.random.Generator, n_noise: int) -> Tuple[Dataset, np.ndarray]:
    signal = rng.integers(0, 2, size=(n, 2)).astype(np.float64)
    noise = rng.uniform(0.0, 1.0, size=(n, n_noise))
    names = ["x1", "x2"] + [f"noise{k + 1}" for k in range(n_noise)]
    targets = np.logical_xor(signal[:, 0], signal[:, 1]).astype(np.float64)
    return _numeric_dataset(np.hstack([signal, noise]), names), targets


def _additive(n: int, rng: np.random.Generator, n_noise: int) -> Tuple[Dataset, np.ndarray]:
    x = rng.uniform(-1.0, 1.0, size=(n, 3 + n_noise))
    targets = np.sin(np.pi * x[:, 0]) + x[:, 1] ** 2 + 0.5 * x[:, 2]
    names = ["x1", "x2", "x3"] + [f"noise{k + 1}" for k in range(n_noise)]
    return _numeric_dataset(x, names), targets


def _grid4(n: int, rng: np.random.Generator, n_noise: int) -> Tuple[Dataset, np.ndarray]:
    if n != 4:
        logger.debug(f"grid4 is a fixed 4-row fixture; ignoring n={n}")
    return _numeric_dataset(GRID4_ROWS, ["x1", "x2"]), GRID4_ROWS[:, 0] * GRID4_ROWS[:, 1]


def _product_noise(n: int, rng: np.random.Generator, n_noise: int) -> Tuple[Dataset, np.ndarray]:
    x = rng.uniform(-1.0, 1.0, size=(n, 2 + n_noise))
    targets = x[:, 0] * x[:, 1] + rng.normal(0.0, PRODUCT_NOISE_SCALE, size=n)
    names = ["x1", "x2"] + [f"noise{k + 1}" for k in range(n_noise)]
    return _numeric_dataset(x, names), targets


GENERATORS: Dict[str, Callable[[int, np.random.Generator, int], Tuple[Dataset, np.ndarray]]] = {
    "xor": _xor,
    "additive": _additive,
    "grid4": _grid4,
    "product-noise": _product_noise,
}


def synth(name: str, n: int = 500, seed: int = 0, n_noise: int = 0) -> Tuple[Dataset, np.ndarray]:
    """
    Generate a named synthetic dataset.

    * ``xor``: two uniform binary features, target ``x1 XOR x2`` (0/1)
    * ``additive``: three uniform features, target ``sin(pi x1) + x2^2 + x3 / 2``
    * ``grid4``: the fixed rows (0,0), (0,1), (1,0), (1,1), target ``x1 * x2``
    * ``product-noise``: two uniform features, target ``x1 * x2 + N(0, 0.1^2)``

    ``n_noise`` appends uniform features the target does not depend on.

    Raises:
        ValidationError: For an unknown generator name or n < 1
    """
    generator = GENERATORS.get(name)
    if generator is None:
        raise ValidationError(f"unknown generator '{name}' (expected one of {sorted(GENERATORS)})", "generator")
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}", "generator")
    if n_noise < 0:
        raise ValidationError(f"n_noise must be >= 0, got {n_noise}", "generator")

    dataset, targets = generator(n, np.random.default_rng(seed), n_noise)
    logger.debug(f"Generated '{name}' with {dataset.n_rows} rows and {dataset.n_features} features (seed {seed})")
    return dataset, targets
