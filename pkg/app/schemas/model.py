from typing import Any, Dict, List, Literal, Optional

from pydantic import Field, model_validator

from .base import Document

MODEL_FORMAT = "ibd-model/1"


class TreeNodeDocument(Document):
    """Serialized tree node; ``levels`` is set for categorical splits only."""

    feature: int = -1
    threshold: Optional[float] = None
    levels: Optional[List[int]] = None
    left: int = -1
    right: int = -1
    value: float = 0.0

    @model_validator(mode="after")
    def check_children(self):
        is_leaf = self.left < 0 and self.right < 0
        is_internal = self.left >= 0 and self.right >= 0
        if not (is_leaf or is_internal):
            raise ValueError("internal nodes need both children, leaves none")
        if is_internal and self.feature < 0:
            raise ValueError("internal node without split feature")
        if is_internal and self.threshold is None and not self.levels:
            raise ValueError("internal node without threshold or level set")
        return self


class ModelDocument(Document):
    """Versioned model file."""

    format: Literal["ibd-model/1"] = MODEL_FORMAT
    family: Literal["gbm", "random_forest", "linear"]
    name: str
    feature_names: List[str]
    hyperparameters: Dict[str, Any] = Field(default_factory=dict)
    # tree ensembles
    mode: Optional[Literal["boosted", "bagged"]] = None
    max_depth: Optional[int] = None
    learning_rate: Optional[float] = None
    init_score: Optional[float] = None
    trees: Optional[List[List[TreeNodeDocument]]] = None
    # linear
    intercept: Optional[float] = None
    weights: Optional[List[float]] = None
