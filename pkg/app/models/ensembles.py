"""Training for the tree-ensemble model zoo (boosting and random forests)."""

import logging
import math
from typing import Any

import numpy as np

from app.core.types import Dataset
from app.errors import TrainingError
from app.models.trees import RegressionTreeBuilder, TreeEnsemble, categorical_mask, evaluate_tree

logger = logging.getLogger(__name__)

GBM_DEPTHS = (1, 2, 3)


def _training_targets(dataset: Dataset, targets: Any, model: str) -> np.ndarray:
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    if y.size == 0:
        raise TrainingError("empty targets", model)
    if y.size != dataset.n_rows:
        raise TrainingError(f"expected {dataset.n_rows} targets, got {y.size}", model)
    if not np.all(np.isfinite(y)):
        raise TrainingError("non-finite targets", model)
    return y


def train_gbm(
    dataset: Dataset,
    targets: Any,
    max_depth: int = 2,
    n_trees: int = 200,
    learning_rate: float = 0.1,
    seed: int = 0,
    min_leaf: int = 5,
) -> TreeEnsemble:
    """
    Squared-loss gradient boosting on raw targets.

    Scores are raw (no link function, no clipping), so a depth-1 ensemble is
    exactly a sum of single-feature functions.

    Args:
        dataset: Training features
        targets: One target per row (0/1 for binary tasks)
        max_depth: Tree depth, one of 1, 2, 3
        n_trees: Number of boosting rounds
        learning_rate: Shrinkage applied to every tree
        seed: Recorded for reproducibility; the exact greedy search is deterministic
        min_leaf: Minimum rows per leaf

    Returns:
        TreeEnsemble: Boosted model
    """
    name = f"gbm{max_depth}"
    if max_depth not in GBM_DEPTHS:
        raise TrainingError(f"max_depth must be one of {GBM_DEPTHS}, got {max_depth}", name)
    if n_trees < 1:
        raise TrainingError(f"n_trees must be >= 1, got {n_trees}", name)
    y = _training_targets(dataset, targets, name)

    X = dataset.matrix
    builder = RegressionTreeBuilder(max_depth, min_leaf, categorical_mask(dataset))
    init_score = float(np.mean(y))
    fitted = np.full(y.shape[0], init_score)
    trees = []
    for round_ in range(n_trees):
        nodes = builder.build(X, y - fitted)
        fitted += learning_rate * evaluate_tree(nodes, X)
        trees.append(nodes)
        if logger.isEnabledFor(logging.DEBUG) and (round_ + 1) % 50 == 0:
            logger.debug(f"{name} round {round_ + 1}: train MSE {np.mean((y - fitted) ** 2):.6f}")

    logger.info(f"Trained {name} with {n_trees} trees on {dataset.n_rows} rows")
    return TreeEnsemble(
        trees,
        mode="boosted",
        max_depth=max_depth,
        learning_rate=learning_rate,
        init_score=init_score,
        name=name,
        feature_names=dataset.feature_names,
        hyperparameters={
            "max_depth": max_depth,
            "n_trees": n_trees,
            "learning_rate": learning_rate,
            "seed": seed,
            "min_leaf": min_leaf,
        },
    )


def train_random_forest(
    dataset: Dataset,
    targets: Any,
    n_trees: int = 100,
    max_depth: int = 4,
    seed: int = 0,
    min_leaf: int = 5,
) -> TreeEnsemble:
    """
    Bagged regression trees: bootstrap rows, sqrt(p) features per split, mean aggregation.

    Args:
        dataset: Training features
        targets: One target per row
        n_trees: Number of trees
        max_depth: Depth limit per tree
        seed: Seed of the bootstrap and feature sampling generator
        min_leaf: Minimum rows per leaf

    Returns:
        TreeEnsemble: Bagged model, bitwise reproducible for a fixed seed
    """
    name = "rf"
    if n_trees < 1:
        raise TrainingError(f"n_trees must be >= 1, got {n_trees}", name)
    if max_depth < 1:
        raise TrainingError(f"max_depth must be >= 1, got {max_depth}", name)
    y = _training_targets(dataset, targets, name)

    X = dataset.matrix
    n, p = X.shape
    rng = np.random.default_rng(seed)
    builder = RegressionTreeBuilder(
        max_depth,
        min_leaf,
        categorical_mask(dataset),
        max_features=max(1, int(math.floor(math.sqrt(p)))),
        rng=rng,
    )
    trees = []
    for _ in range(n_trees):
        sample = rng.integers(0, n, size=n)
        trees.append(builder.build(X[sample], y[sample]))

    logger.info(f"Trained random forest with {n_trees} trees on {n} rows")
    return TreeEnsemble(
        trees,
        mode="bagged",
        max_depth=max_depth,
        name=name,
        feature_names=dataset.feature_names,
        hyperparameters={"n_trees": n_trees, "max_depth": max_depth, "seed": seed, "min_leaf": min_leaf},
    )
