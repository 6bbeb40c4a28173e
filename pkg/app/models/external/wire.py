"""Wire format of the external model protocol.

Request: CSV with a header row, LF line endings, UTF-8. Categorical values
are sent as their original level tokens, numbers with full precision.
Response: one decimal per line, LF terminated, one line per request row.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.errors import MalformedResponseError, ShortResponseError

logger = logging.getLogger(__name__)


def encode_request(
    rows: np.ndarray,
    feature_names: Sequence[str],
    levels: Optional[Sequence[Optional[Tuple[str, ...]]]] = None,
) -> str:
    """Render a batch of rows as the CSV request body (minimal quoting, shortest round-trip floats)."""
    columns = {}
    for i, name in enumerate(feature_names):
        vocabulary = levels[i] if levels else None
        if vocabulary is not None:
            columns[name] = [vocabulary[int(value)] for value in rows[:, i]]
        else:
            columns[name] = rows[:, i].astype(np.float64)
    frame = pd.DataFrame(columns, columns=list(feature_names))
    return frame.to_csv(index=False, lineterminator="\n")


def decode_response(stdout: str, expected: int, model: str = "external") -> np.ndarray:
    """
    Parse one decimal per line.

    Args:
        stdout: Raw child output
        expected: Number of rows sent
        model: Model name for error context

    Returns:
        np.ndarray: Scores in request order

    Raises:
        ShortResponseError: Fewer lines than rows
        MalformedResponseError: Extra lines or non-decimal tokens
    """
    lines: List[str] = stdout.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    if len(lines) < expected:
        raise ShortResponseError(
            f"short response: expected {expected} lines, got {len(lines)}", model, stdout[-500:]
        )
    if len(lines) > expected:
        raise MalformedResponseError(
            f"malformed response: expected {expected} lines, got {len(lines)}", model, stdout[-500:]
        )

    scores = np.empty(expected, dtype=np.float64)
    for k, line in enumerate(lines):
        try:
            scores[k] = float(line.strip())
            if not np.isfinite(scores[k]):
                raise ValueError(line)
        except ValueError:
            logger.error(f"Non-decimal response line {k + 1} from {model}: {line[:80]!r}")
            raise MalformedResponseError(
                f"malformed response: line {k + 1} is not a decimal: {line[:80]!r}", model
            )
    return scores
