import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.core.types import Dataset, FeatureKind, Observation
from app.errors import ValidationError

logger = logging.getLogger(__name__)

MISSING_TOKENS = ("", "NA")


def is_missing(value: Any) -> bool:
    """Check a raw cell against the missing-value tokens ("" and "NA") and pandas nulls (None, NaN, NA, NaT)."""
    if isinstance(value, str):
        return value.strip() in MISSING_TOKENS
    return bool(pd.api.types.is_scalar(value) and pd.isna(value))


def parse_decimal(token: Any) -> Optional[float]:
    """
    Parse a raw cell as a finite decimal.

    Args:
        token: Raw cell (string or number)

    Returns:
        float: Parsed value, or None if the token is not a finite decimal
    """
    if isinstance(token, bool):
        return None
    try:
        value = float(str(token).strip()) if isinstance(token, str) else float(token)
    except (TypeError, ValueError):
        return None
    if not math.isfinite(value):
        return None
    return value


def _numeric_column(values: Sequence[Any]) -> Optional[np.ndarray]:
    """All-or-nothing numeric detection: one non-decimal token makes the column categorical."""
    parsed = np.empty(len(values), dtype=np.float64)
    for k, token in enumerate(values):
        value = parse_decimal(token)
        if value is None:
            return None
        parsed[k] = value
    return parsed


def validate_dataset(table: pd.DataFrame) -> Dataset:
    """
    Validate a raw table and intern categorical levels.

    Args:
        table: Parsed table, one column per feature, header as column labels

    Returns:
        Dataset: Validated dataset

    Raises:
        ValidationError: On zero rows/columns, duplicate or empty names, missing values
    """
    names = [str(name) for name in table.columns]
    if len(names) == 0:
        raise ValidationError("dataset has zero columns", "data")
    if len(table) == 0:
        raise ValidationError("dataset has zero rows", "data")

    seen = set()
    for name in names:
        if not name.strip():
            raise ValidationError("empty feature name", "data")
        if name in seen:
            raise ValidationError(f"duplicate name '{name}'", "data")
        seen.add(name)

    kinds: List[FeatureKind] = []
    columns: List[np.ndarray] = []
    levels: Dict[str, Tuple[str, ...]] = {}

    for position, name in enumerate(names):
        raw = table.iloc[:, position].tolist()
        for row, value in enumerate(raw):
            if is_missing(value):
                raise ValidationError(f"missing value in column '{name}', row {row + 1}", "data")

        numeric = _numeric_column(raw)
        if numeric is not None:
            kinds.append(FeatureKind.NUMERIC)
            columns.append(numeric)
            continue

        tokens = [str(value).strip() for value in raw]
        vocabulary = tuple(sorted(set(tokens)))
        lookup = {level: idx for idx, level in enumerate(vocabulary)}
        kinds.append(FeatureKind.CATEGORICAL)
        columns.append(np.array([lookup[token] for token in tokens], dtype=np.float64))
        levels[name] = vocabulary
        logger.debug(f"Column '{name}' is categorical with {len(vocabulary)} levels")

    dataset = Dataset(
        feature_names=tuple(names),
        feature_kinds=tuple(kinds),
        matrix=np.column_stack(columns),
        levels=levels,
    )
    logger.info(f"Validated dataset with {dataset.n_rows} rows and {dataset.n_features} features")
    return dataset


def bind_observation(dataset: Dataset, values: Sequence[Any]) -> Observation:
    """
    Kind-check raw values against the dataset schema.

    Args:
        dataset: Validated dataset providing the schema
        values: One raw value per feature (tokens or numbers)

    Returns:
        Observation: Bound observation

    Raises:
        ValidationError: On arity mismatch, unseen categorical level or non-numeric token
    """
    if len(values) != dataset.n_features:
        raise ValidationError(
            f"arity mismatch: expected {dataset.n_features} values, got {len(values)}",
            "observation",
        )

    bound = np.empty(dataset.n_features, dtype=np.float64)
    display: List[str] = []
    for i, (name, token) in enumerate(zip(dataset.feature_names, values)):
        if is_missing(token):
            raise ValidationError(f"missing value for feature '{name}'", "observation")
        if dataset.is_categorical(i):
            level = str(token).strip()
            vocabulary = dataset.levels[name]
            if level not in vocabulary:
                raise ValidationError(f"unseen level '{level}' for feature '{name}'", "observation")
            bound[i] = vocabulary.index(level)
            display.append(level)
        else:
            value = parse_decimal(token)
            if value is None:
                raise ValidationError(f"non-numeric token '{token}' for feature '{name}'", "observation")
            bound[i] = value
            display.append(f"{value:g}")

    return Observation(values=bound, display=tuple(display))


def observation_from_row(dataset: Dataset, row: int) -> Observation:
    """Bind the dataset row at ``row`` (0-based) as an observation."""
    if not 0 <= row < dataset.n_rows:
        raise ValidationError(f"row out of range: {row} (dataset has {dataset.n_rows} rows)", "observation")
    values = dataset.matrix[row]
    display = tuple(dataset.display_value(i, v) for i, v in enumerate(values))
    return Observation(values=values.copy(), display=display)


def validate_feature_index(dataset: Dataset, index: int, field: str = "feature") -> int:
    if not 0 <= index < dataset.n_features:
        raise ValidationError(f"feature index {index} out of range [0, {dataset.n_features})", field)
    return int(index)


def validate_targets(targets: Any, n_rows: int) -> np.ndarray:
    """Check that targets are a finite vector with one entry per dataset row."""
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    if y.size == 0:
        raise ValidationError("empty targets", "targets")
    if y.size != n_rows:
        raise ValidationError(f"expected {n_rows} targets, got {y.size}", "targets")
    if not np.all(np.isfinite(y)):
        raise ValidationError("non-finite targets", "targets")
    return y
