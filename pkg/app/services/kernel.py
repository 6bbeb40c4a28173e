"""Contribution kernel: expectation-based contributions of features and pairs.

Every quantity derives from the group expectation
``E[f(x) | x_S = x*_S]``, estimated as the mean model score over the
background rows with the columns in S overwritten by the observation's
values. Each expectation is one batch of n rows sent to the model.
"""

import logging
import threading
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from app.core.types import Dataset, InteractionMatrix, Observation
from app.errors import ModelError, ValidationError
from app.models.base import BaseModelHandle

logger = logging.getLogger(__name__)

DEFAULT_MAX_ROWS = 1000


def select_background(dataset: Dataset, max_rows: Optional[int] = DEFAULT_MAX_ROWS, seed: int = 0) -> np.ndarray:
    """
    Background rows used for expectations.

    All rows in stored order when ``n <= max_rows``; otherwise a seeded
    uniform subsample without replacement, kept in stored order.
    """
    matrix = dataset.matrix
    if max_rows is None or dataset.n_rows <= max_rows:
        return matrix
    if max_rows < 1:
        raise ValidationError(f"max_rows must be >= 1, got {max_rows}", "max_rows")
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.choice(dataset.n_rows, size=max_rows, replace=False))
    logger.debug(f"Subsampled {max_rows} of {dataset.n_rows} background rows with seed {seed}")
    return matrix[rows]


def _score(model: BaseModelHandle, batch: np.ndarray, fixed: Sequence[int]) -> np.ndarray:
    try:
        return model.predict(batch)
    except ModelError as e:
        e.message = f"{e.message} [batch of {batch.shape[0]} rows, fixed features {list(fixed)}]"
        e.args = (e.message,)
        raise
    except Exception as e:
        logger.error(f"Scoring failed for model {model.name}: {str(e)}")
        raise ModelError(
            f"scoring failed on batch of {batch.shape[0]} rows, fixed features {list(fixed)}: {str(e)}",
            model.name,
        ) from e


class ContributionKernel:
    """Memoized group expectations for one (model, background, observation).

    The memo table is keyed by the fixed feature set and is safe for
    concurrent insert-or-read; every value is computed from the same batch
    with the same summation order, so results do not depend on the worker
    count or on which worker computed them.
    """

    def __init__(
        self,
        model: BaseModelHandle,
        dataset: Dataset,
        observation: Observation,
        max_rows: Optional[int] = DEFAULT_MAX_ROWS,
        seed: int = 0,
        workers: int = 1,
    ):
        if observation.n_features != dataset.n_features:
            raise ValidationError(
                f"observation has {observation.n_features} values, dataset has {dataset.n_features} features",
                "observation",
            )
        self.model = model
        self.dataset = dataset
        self.observation = observation
        self.seed = seed
        self.workers = max(1, int(workers))
        self.background = select_background(dataset, max_rows, seed)
        self._memo: Dict[FrozenSet[int], float] = {}
        self._lock = threading.Lock()
        self._prediction: Optional[float] = None

    @property
    def n_features(self) -> int:
        return self.dataset.n_features

    @property
    def background_rows(self) -> int:
        return int(self.background.shape[0])

    @property
    def n_evaluations(self) -> int:
        return len(self._memo)

    def _check_indices(self, features: Iterable[int]) -> Tuple[int, ...]:
        checked = tuple(sorted(int(i) for i in features))
        for i in checked:
            if not 0 <= i < self.n_features:
                raise ValidationError(f"feature index {i} out of range [0, {self.n_features})", "feature")
        if len(set(checked)) != len(checked):
            raise ValidationError(f"repeated feature index in {checked}", "feature")
        return checked

    def prediction(self) -> float:
        """Model score of the observation."""
        if self._prediction is None:
            self._prediction = float(_score(self.model, self.observation.as_row(), range(self.n_features))[0])
        return self._prediction

    def group_expectation(self, fixed: Iterable[int]) -> float:
        """Mean score over the background with the columns in ``fixed`` set to x*."""
        columns = self._check_indices(fixed)
        key = frozenset(columns)
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached

        if len(columns) == self.n_features:
            value = self.prediction()
        else:
            batch = self.background.copy()
            if columns:
                batch[:, columns] = self.observation.values[list(columns)]
            value = float(np.mean(_score(self.model, batch, columns)))

        with self._lock:
            self._memo.setdefault(key, value)
        return value

    def baseline(self) -> float:
        return self.group_expectation(())

    def single_contribution(self, i: int) -> float:
        (i,) = self._check_indices((i,))
        return self.group_expectation((i,)) - self.baseline()

    def pair_contribution(self, i: int, j: int) -> Tuple[float, float]:
        """(delta_ij, interaction_ij); symmetric in (i, j) bitwise."""
        if i == j:
            raise ValidationError("pair requires distinct features", "pair")
        i, j = self._check_indices((i, j))
        delta_ij = self.group_expectation((i, j)) - self.baseline()
        interaction = delta_ij - self.single_contribution(i) - self.single_contribution(j)
        return delta_ij, interaction

    def conditional_contribution(self, group: Sequence[int], history: Iterable[int]) -> float:
        """Added effect of fixing ``group`` once ``history`` is fixed."""
        group = self._check_indices(group)
        history = self._check_indices(history)
        overlap = set(group) & set(history)
        if overlap:
            raise ValidationError(f"group overlaps history on features {sorted(overlap)}", "history")
        return self.group_expectation(group + history) - self.group_expectation(history)

    def _parallel(self, function, arguments):
        if self.workers == 1 or len(arguments) < 2:
            return [function(*args) for args in arguments]
        with Parallel(n_jobs=self.workers, prefer="threads") as parallel:
            return parallel(delayed(function)(*args) for args in arguments)

    def interaction_matrix(self) -> InteractionMatrix:
        """All delta_i and, for i < j, delta_ij and interaction_ij."""
        p = self.n_features
        self.baseline()
        deltas_i = np.array(self._parallel(self.single_contribution, [(i,) for i in range(p)]), dtype=np.float64)

        pairs = [(i, j) for i in range(p) for j in range(i + 1, p)]
        deltas_ij = np.full((p, p), np.nan)
        interactions = np.full((p, p), np.nan)
        for (i, j), (delta_ij, interaction) in zip(pairs, self._parallel(self.pair_contribution, pairs)):
            deltas_ij[i, j] = delta_ij
            interactions[i, j] = interaction

        logger.debug(f"Interaction matrix for p={p} used {self.n_evaluations} group expectations")
        return InteractionMatrix(deltas_i=deltas_i, deltas_ij=deltas_ij, interactions=interactions)


def baseline(model: BaseModelHandle, dataset: Dataset, max_rows: Optional[int] = DEFAULT_MAX_ROWS, seed: int = 0) -> float:
    """Mean model score over the background rows (the intercept of every explanation)."""
    background = select_background(dataset, max_rows, seed)
    return float(np.mean(_score(model, background, ())))


def group_expectation(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    fixed: Iterable[int],
    max_rows: Optional[int] = DEFAULT_MAX_ROWS,
    seed: int = 0,
) -> float:
    return ContributionKernel(model, dataset, observation, max_rows, seed).group_expectation(fixed)


def single_contribution(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    i: int,
    max_rows: Optional[int] = DEFAULT_MAX_ROWS,
    seed: int = 0,
) -> float:
    return ContributionKernel(model, dataset, observation, max_rows, seed).single_contribution(i)


def pair_contribution(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    i: int,
    j: int,
    max_rows: Optional[int] = DEFAULT_MAX_ROWS,
    seed: int = 0,
) -> Tuple[float, float]:
    return ContributionKernel(model, dataset, observation, max_rows, seed).pair_contribution(i, j)


def interaction_matrix(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    max_rows: Optional[int] = DEFAULT_MAX_ROWS,
    seed: int = 0,
    workers: int = 1,
) -> InteractionMatrix:
    return ContributionKernel(model, dataset, observation, max_rows, seed, workers).interaction_matrix()


def conditional_contribution(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    group: Sequence[int],
    history: Iterable[int],
    max_rows: Optional[int] = DEFAULT_MAX_ROWS,
    seed: int = 0,
) -> float:
    return ContributionKernel(model, dataset, observation, max_rows, seed).conditional_contribution(group, history)
