"""Seeded train/test splits and observation sampling."""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from app.core.types import Dataset, Observation
from app.errors import ValidationError
from app.utils.validators import observation_from_row, validate_targets

logger = logging.getLogger(__name__)

Split = Tuple[Dataset, np.ndarray]


def train_size(n_rows: int, fraction: float) -> int:
    """``max(1, floor(fraction * n))``."""
    return max(1, math.floor(fraction * n_rows))


def split(dataset: Dataset, targets: np.ndarray, fraction: float, seed: int = 0) -> Tuple[Split, Split]:
    """
    Seeded uniform partition of the rows into train and test.

    Both parts keep the dataset's stored row order.

    Args:
        dataset: Rows to partition
        targets: One target per row
        fraction: Train share, in (0, 1)
        seed: Random seed

    Returns:
        Tuple[Split, Split]: ``(train_dataset, train_targets), (test_dataset, test_targets)``

    Raises:
        ValidationError: If the fraction is outside (0, 1) or there are fewer than 2 rows
    """
    if not 0.0 < fraction < 1.0:
        raise ValidationError(f"split fraction must be in (0, 1), got {fraction}", "split_fraction")
    if dataset.n_rows < 2:
        raise ValidationError("cannot split fewer than 2 rows", "split_fraction")
    y = validate_targets(targets, dataset.n_rows)

    k = train_size(dataset.n_rows, fraction)
    permutation = np.random.default_rng(seed).permutation(dataset.n_rows)
    train_rows = np.sort(permutation[:k])
    test_rows = np.sort(permutation[k:])
    logger.debug(f"Split {dataset.n_rows} rows into {len(train_rows)} train / {len(test_rows)} test (seed {seed})")
    return (dataset.take(train_rows), y[train_rows]), (dataset.take(test_rows), y[test_rows])


@dataclass(frozen=True)
class ObservationSample:
    """Sampled observations with their source rows."""

    observations: Tuple[Observation, ...]
    rows: Tuple[int, ...]
    with_replacement: bool

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self) -> Iterator[Observation]:
        return iter(self.observations)


def sample_observations(dataset: Dataset, count: int, seed: int = 0) -> ObservationSample:
    """
    Seeded sample of dataset rows as observations.

    Sampling is without replacement unless ``count`` exceeds the row count,
    in which case rows are drawn with replacement and the sample is flagged.
    """
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}", "n_obs")
    rng = np.random.default_rng(seed)
    with_replacement = count > dataset.n_rows
    if with_replacement:
        logger.warning(f"Sampling {count} observations from {dataset.n_rows} rows with replacement")
    rows = rng.choice(dataset.n_rows, size=count, replace=with_replacement)
    rows = tuple(int(row) for row in rows)
    return ObservationSample(
        observations=tuple(observation_from_row(dataset, row) for row in rows),
        rows=rows,
        with_replacement=with_replacement,
    )
