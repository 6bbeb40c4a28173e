"""CSV ingestion, task resolution and benchmark manifests."""

import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import TypeAdapter
from pydantic import ValidationError as PydanticValidationError

from app.core.types import Dataset
from app.data.synth import synth
from app.errors import ValidationError
from app.schemas.bench import TaskSpec
from app.utils.validators import is_missing, parse_decimal, validate_dataset

logger = logging.getLogger(__name__)


def _read_table(path: Path) -> pd.DataFrame:
    """Read every cell as a raw string; the first row is the header."""
    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
            skip_blank_lines=True,
        )
    except FileNotFoundError:
        raise ValidationError(f"file not found: {path}", "data")
    except pd.errors.EmptyDataError:
        raise ValidationError(f"empty file: {path}", "data")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ValidationError(f"cannot parse {path}: {str(e)}", "data")

    header = [str(name).strip() for name in raw.iloc[0].tolist()]
    body = raw.iloc[1:].reset_index(drop=True)
    body.columns = header
    return body


def _binary_targets(tokens: List[str], positive_label: Optional[str], target: str) -> np.ndarray:
    tokens = [token.strip() for token in tokens]
    distinct = sorted(set(tokens))
    if positive_label is not None:
        if len(distinct) > 2:
            raise ValidationError(
                f"non-binary target: column '{target}' has {len(distinct)} classes", "target"
            )
        if positive_label not in distinct:
            logger.warning(f"Positive label '{positive_label}' never occurs in target column '{target}'")
        return np.array([1.0 if token == positive_label else 0.0 for token in tokens])

    values = [parse_decimal(token) for token in tokens]
    if any(value not in (0.0, 1.0) for value in values):
        raise ValidationError(
            f"non-binary target: column '{target}' holds {distinct[:5]} without a positive label", "target"
        )
    return np.array(values, dtype=np.float64)


def load_csv(
    path: Union[str, Path],
    target: str,
    positive_label: Optional[str] = None,
) -> Tuple[Dataset, np.ndarray]:
    """
    Load a comma-separated UTF-8 file with a header row.

    Columns that parse fully as decimals become numeric features, all other
    columns categorical. The target column is removed from the features and
    mapped to 0/1: rows equal to ``positive_label`` are 1, or, without a
    positive label, the column must already hold 0/1.

    Args:
        path: CSV file
        target: Name of the target column
        positive_label: Target token mapped to 1

    Returns:
        Tuple[Dataset, np.ndarray]: Features and 0/1 targets

    Raises:
        ValidationError: On missing values, unknown target or non-binary target
    """
    path = Path(path)
    table = _read_table(path)

    positions = [k for k, name in enumerate(table.columns) if name == target]
    if not positions:
        raise ValidationError(f"unknown target '{target}' in {path.name}", "target")
    if len(positions) > 1:
        raise ValidationError(f"duplicate name '{target}'", "target")

    target_tokens = table.iloc[:, positions[0]].tolist()
    for row, token in enumerate(target_tokens):
        if is_missing(token):
            raise ValidationError(f"missing value in column '{target}', row {row + 1}", "data")

    features = table.drop(columns=table.columns[positions[0]])
    dataset = validate_dataset(features)
    targets = _binary_targets(target_tokens, positive_label, target)
    logger.info(f"Loaded {path.name}: {dataset.n_rows} rows, {dataset.n_features} features, target '{target}'")
    return dataset, targets


def load_task(spec: TaskSpec) -> Tuple[Dataset, np.ndarray]:
    """Resolve a task to its data: a CSV file or a synthetic generator."""
    if spec.generator is not None:
        return synth(spec.generator, spec.n_rows, spec.seed)
    return load_csv(spec.path, spec.target, spec.positive_label)


def load_manifest(path: Union[str, Path]) -> List[TaskSpec]:
    """
    Parse a benchmark manifest: a JSON list of task objects.

    Relative data paths are resolved against the manifest's directory.

    Raises:
        ValidationError: If the manifest is missing, not JSON or has invalid tasks
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"manifest not found: {path}", "manifest")
    except json.JSONDecodeError as e:
        raise ValidationError(f"manifest is not valid JSON: {str(e)}", "manifest")

    try:
        tasks = TypeAdapter(List[TaskSpec]).validate_python(raw)
    except PydanticValidationError as e:
        raise ValidationError(f"invalid manifest: {e.errors()[0]['msg']}", "manifest")

    resolved = []
    for task in tasks:
        if task.path is not None and not Path(task.path).is_absolute():
            task = task.model_copy(update={"path": str(path.parent / task.path)})
        resolved.append(task)
    logger.info(f"Manifest {path.name} lists {len(resolved)} tasks")
    return resolved
