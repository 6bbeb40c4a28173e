"""External black-box model handle that orchestrates the bridge components."""

import logging
import subprocess
from typing import Optional

import numpy as np

from app.core.types import Dataset
from app.errors import ModelError, ModelTimeoutError, ProcessFailureError
from app.models.base import BaseModelHandle

from .config import ExternalModelConfig
from .process_client import ProcessClient
from .wire import decode_response, encode_request

logger = logging.getLogger(__name__)


class ExternalModel(BaseModelHandle):
    """Scores rows by piping CSV batches through an external command."""

    family = "external"

    def __init__(self, config: ExternalModelConfig, schema: Optional[Dataset] = None):
        super().__init__(config.name, {"command": list(config.command), "batch_size": config.batch_size})
        self.config = config
        self.schema = schema
        self.client = ProcessClient(config)

    def _header(self, n_features: int):
        if self.schema is not None:
            levels = [self.schema.levels.get(name) for name in self.schema.feature_names]
            return list(self.schema.feature_names), levels
        return [f"x{i + 1}" for i in range(n_features)], None

    def _score(self, rows: np.ndarray) -> np.ndarray:
        names, levels = self._header(rows.shape[1])
        chunks = []
        for start in range(0, rows.shape[0], self.config.batch_size):
            chunks.append(self._score_batch(rows[start:start + self.config.batch_size], names, levels))
        if not chunks:
            return np.empty(0, dtype=np.float64)
        return np.concatenate(chunks)

    def _score_batch(self, batch: np.ndarray, names, levels) -> np.ndarray:
        request = encode_request(batch, names, levels)
        try:
            response = self.client.exchange(request)
        except subprocess.TimeoutExpired:
            logger.error(f"External model {self.name} timed out after {self.config.batch_timeout}s")
            raise ModelTimeoutError(
                f"timeout: no response within {self.config.batch_timeout:g}s", self.name
            )
        except OSError as e:
            logger.error(f"External model {self.name} could not be launched: {str(e)}")
            raise ProcessFailureError(f"process failure: cannot launch command: {str(e)}", self.name)

        if response.returncode != 0:
            diagnostics = response.stderr.strip()[-2000:]
            logger.error(f"External model {self.name} exited with {response.returncode}: {diagnostics}")
            raise ProcessFailureError(
                f"process failure: exit status {response.returncode}", self.name, diagnostics
            )

        try:
            return decode_response(response.stdout, batch.shape[0], self.name)
        except ModelError as e:
            e.diagnostics = e.diagnostics or response.stderr.strip()[-2000:]
            raise


def external_model(config: ExternalModelConfig, schema: Optional[Dataset] = None) -> ExternalModel:
    """
    Build a model handle backed by an external process.

    Args:
        config: Command and time budgets
        schema: Dataset whose feature names (and categorical levels) form the CSV header

    Returns:
        ExternalModel: Handle scoring through the subprocess protocol
    """
    logger.info(f"Using external model command {config.command}")
    return ExternalModel(config, schema)
