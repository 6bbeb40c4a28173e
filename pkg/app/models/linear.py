"""Ordinary least squares reference model (additive by construction)."""

import logging
from typing import Any, Optional, Sequence

import numpy as np

from app.core.types import Dataset
from app.errors import SingularDesignError, TrainingError
from app.models.base import BaseModelHandle

logger = logging.getLogger(__name__)


class LinearModel(BaseModelHandle):
    """prediction = intercept + sum(w_i * x_i)"""

    family = "linear"

    def __init__(
        self,
        intercept: float,
        weights: Sequence[float],
        name: str = "linear",
        feature_names: Sequence[str] = (),
        hyperparameters: Optional[dict] = None,
    ):
        super().__init__(name, hyperparameters)
        self.intercept = float(intercept)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.feature_names = tuple(feature_names)

    def _score(self, rows: np.ndarray) -> np.ndarray:
        total = np.full(rows.shape[0], self.intercept)
        for i, w in enumerate(self.weights):
            total += w * rows[:, i]
        return total


def train_linear(dataset: Dataset, targets: Any, rcond: float = 1e-10) -> LinearModel:
    """
    Fit ordinary least squares with an intercept.

    Args:
        dataset: Training features (numeric features expected)
        targets: One target per row
        rcond: Relative singular value cutoff used for the rank check

    Returns:
        LinearModel: Fitted model

    Raises:
        SingularDesignError: If the design matrix is rank deficient
    """
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    if y.size != dataset.n_rows or y.size == 0:
        raise TrainingError(f"expected {dataset.n_rows} targets, got {y.size}", "linear")
    if not np.all(np.isfinite(y)):
        raise TrainingError("non-finite targets", "linear")
    categorical = [name for i, name in enumerate(dataset.feature_names) if dataset.is_categorical(i)]
    if categorical:
        logger.warning(f"Linear model treats categorical level ids as numbers: {categorical}")

    design = np.column_stack([np.ones(dataset.n_rows), dataset.matrix])
    singular_values = np.linalg.svd(design, compute_uv=False)
    condition = float(singular_values[0] / singular_values[-1]) if singular_values[-1] > 0 else float("inf")
    rank = int(np.sum(singular_values > rcond * singular_values[0]))
    if rank < design.shape[1]:
        raise SingularDesignError(
            f"singular design matrix: rank {rank} < {design.shape[1]} columns", condition
        )

    coefficients, *_ = np.linalg.lstsq(design, y, rcond=None)
    logger.info(f"Fitted linear model on {dataset.n_rows} rows, condition number {condition:.3e}")
    return LinearModel(
        intercept=float(coefficients[0]),
        weights=coefficients[1:],
        feature_names=dataset.feature_names,
    )
