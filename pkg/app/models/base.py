from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Optional

import numpy as np

from app.errors import ModelError


class BaseModelHandle(ABC):
    """Base class for everything that scores rows.

    Implementations must be deterministic (same batch, same scores), return
    one float64 score per input row and be batch-decomposable: scoring a
    concatenation of two batches equals concatenating their scores.
    Handles are never mutated by the engine.
    """

    family: str = "custom"

    def __init__(self, name: str, hyperparameters: Optional[Dict[str, Any]] = None):
        self.name = name
        self.hyperparameters: Dict[str, Any] = dict(hyperparameters or {})

    @abstractmethod
    def _score(self, rows: np.ndarray) -> np.ndarray:
        """
        Score a batch of rows.

        Args:
            rows: Matrix of shape (m, p), schema-compatible float64 values

        Returns:
            np.ndarray: m scores
        """
        pass

    def predict(self, rows: np.ndarray) -> np.ndarray:
        """Score ``rows`` and check the output contract."""
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        scores = np.asarray(self._score(rows), dtype=np.float64).reshape(-1)
        if scores.shape[0] != rows.shape[0]:
            raise ModelError(
                f"model returned {scores.shape[0]} scores for {rows.shape[0]} rows", self.name
            )
        return scores

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, family={self.family!r})"


class FunctionModel(BaseModelHandle):
    """Wraps a vectorised Python callable ``f(rows) -> scores`` as a model handle."""

    family = "function"

    def __init__(self, function: Callable[[np.ndarray], np.ndarray], name: str = "function"):
        super().__init__(name)
        self.function = function

    def _score(self, rows: np.ndarray) -> np.ndarray:
        return self.function(rows)
