"""Model specifications: ``linear``, ``gbm:depth=2,trees=200``, ``rf``,
``external:<command>`` or the path of a saved model file."""

import logging
import re
from pathlib import Path
from typing import Any, Dict, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.types import Dataset
from app.errors import ValidationError
from app.models.base import BaseModelHandle
from app.models.ensembles import train_gbm, train_random_forest
from app.models.external import ExternalModelConfig, external_model
from app.models.linear import train_linear
from app.models.persistence import load_model

logger = logging.getLogger(__name__)

EXTERNAL_PREFIX = "external:"

_FAMILY_PATTERN = re.compile(r"^(linear|gbm[123]?|rf)(?::(.*))?$")

# short key -> trainer keyword
_PARAMETERS = {
    "gbm": {"depth": "max_depth", "trees": "n_trees", "rate": "learning_rate", "min_leaf": "min_leaf"},
    "rf": {"depth": "max_depth", "trees": "n_trees", "min_leaf": "min_leaf"},
    "linear": {},
}

_INTEGER_PARAMETERS = {"max_depth", "n_trees", "min_leaf"}


class ModelRecipe(BaseModel):
    """How to obtain a model: train a built-in family, launch a command or load a file."""

    model_config = ConfigDict(frozen=True)

    source: Literal["train", "external", "file"]
    family: Optional[Literal["linear", "gbm", "rf"]] = None
    parameters: Dict[str, Any] = {}
    command: Optional[str] = None
    path: Optional[str] = None

    @property
    def needs_data(self) -> bool:
        return self.source == "train"

    def build(
        self,
        dataset: Optional[Dataset] = None,
        targets: Optional[np.ndarray] = None,
        seed: int = 0,
        defaults: Optional[Dict[str, Dict[str, Any]]] = None,
        external_defaults: Optional[Dict[str, Any]] = None,
    ) -> BaseModelHandle:
        """
        Materialize the model.

        Args:
            dataset: Training features (train recipes) or schema (external recipes)
            targets: Training targets (train recipes)
            seed: Training seed
            defaults: Per-family trainer keywords used where the recipe is silent
            external_defaults: ExternalModelConfig fields used for external recipes

        Returns:
            BaseModelHandle: Trained, launched or loaded model
        """
        if self.source == "file":
            return load_model(self.path)
        if self.source == "external":
            config = ExternalModelConfig(command=self.command, **(external_defaults or {}))
            return external_model(config, schema=dataset)

        if dataset is None or targets is None:
            raise ValidationError(f"training a {self.family} model needs --data and --target", "model")
        allowed = _PARAMETERS[self.family].values()
        keywords = {k: v for k, v in (defaults or {}).get(self.family, {}).items() if k in allowed}
        keywords.update(self.parameters)
        logger.info(f"Training {self.family} model with {keywords} (seed {seed})")
        if self.family == "linear":
            return train_linear(dataset, targets)
        if self.family == "gbm":
            return train_gbm(dataset, targets, seed=seed, **keywords)
        return train_random_forest(dataset, targets, seed=seed, **keywords)


def _parse_parameters(family: str, text: Optional[str], spec: str) -> Dict[str, Any]:
    parameters: Dict[str, Any] = {}
    if not text:
        return parameters
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in _PARAMETERS[family]:
            raise ValidationError(
                f"invalid model parameter '{item}' in '{spec}' (allowed: {sorted(_PARAMETERS[family])})", "model"
            )
        keyword = _PARAMETERS[family][key]
        try:
            parameters[keyword] = int(value) if keyword in _INTEGER_PARAMETERS else float(value)
        except ValueError:
            raise ValidationError(f"non-numeric value for '{key}' in '{spec}'", "model")
    return parameters


def parse_model_spec(spec: str) -> ModelRecipe:
    """
    Parse a ``--model`` value.

    ``gbm1``, ``gbm2`` and ``gbm3`` are shorthands for ``gbm:depth=N``.
    Anything that is neither a family nor ``external:`` is a model file path.

    Raises:
        ValidationError: On an empty spec or unknown parameters
    """
    spec = spec.strip()
    if not spec:
        raise ValidationError("empty model specification", "model")

    if spec.startswith(EXTERNAL_PREFIX):
        command = spec[len(EXTERNAL_PREFIX):].strip()
        if not command:
            raise ValidationError("external model needs a command", "model")
        return ModelRecipe(source="external", command=command)

    match = _FAMILY_PATTERN.match(spec)
    if match is None:
        return ModelRecipe(source="file", path=str(Path(spec)))

    name, text = match.group(1), match.group(2)
    family = "gbm" if name.startswith("gbm") else name
    parameters = _parse_parameters(family, text, spec)
    if name in ("gbm1", "gbm2", "gbm3"):
        parameters.setdefault("max_depth", int(name[-1]))
    return ModelRecipe(source="train", family=family, parameters=parameters)
