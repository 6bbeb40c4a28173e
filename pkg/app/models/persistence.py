"""Versioned JSON model files for the built-in model families."""

import json
import logging
from pathlib import Path
from typing import Union

from pydantic import ValidationError as PydanticValidationError

from app.errors import ModelFormatError, UnsupportedModelError
from app.models.base import BaseModelHandle
from app.models.linear import LinearModel
from app.models.trees import TreeEnsemble, TreeNode
from app.schemas.model import MODEL_FORMAT, ModelDocument, TreeNodeDocument

logger = logging.getLogger(__name__)


def _node_document(node: TreeNode) -> TreeNodeDocument:
    return TreeNodeDocument(
        feature=node.feature,
        threshold=node.threshold,
        levels=list(node.levels) if node.levels is not None else None,
        left=node.left,
        right=node.right,
        value=node.value,
    )


def _node(document: TreeNodeDocument) -> TreeNode:
    return TreeNode(
        feature=document.feature,
        threshold=document.threshold,
        levels=tuple(document.levels) if document.levels is not None else None,
        left=document.left,
        right=document.right,
        value=document.value,
    )


def model_to_document(handle: BaseModelHandle) -> ModelDocument:
    if isinstance(handle, TreeEnsemble):
        return ModelDocument(
            family="gbm" if handle.mode == "boosted" else "random_forest",
            name=handle.name,
            feature_names=list(handle.feature_names),
            hyperparameters=handle.hyperparameters,
            mode=handle.mode,
            max_depth=handle.max_depth,
            learning_rate=handle.learning_rate,
            init_score=handle.init_score,
            trees=[[_node_document(node) for node in nodes] for nodes in handle.trees],
        )
    if isinstance(handle, LinearModel):
        return ModelDocument(
            family="linear",
            name=handle.name,
            feature_names=list(handle.feature_names),
            hyperparameters=handle.hyperparameters,
            intercept=handle.intercept,
            weights=[float(w) for w in handle.weights],
        )
    raise UnsupportedModelError(
        f"unsupported: {handle.family} models are not serializable", handle.family
    )


def model_from_document(document: ModelDocument) -> BaseModelHandle:
    if document.family == "linear":
        if document.intercept is None or document.weights is None:
            raise ModelFormatError("linear model file lacks intercept or weights")
        return LinearModel(
            intercept=document.intercept,
            weights=document.weights,
            name=document.name,
            feature_names=document.feature_names,
            hyperparameters=document.hyperparameters,
        )

    if not document.trees or document.mode is None or document.max_depth is None:
        raise ModelFormatError("tree model file lacks trees, mode or max_depth")
    try:
        return TreeEnsemble(
            [[_node(node) for node in nodes] for nodes in document.trees],
            mode=document.mode,
            max_depth=document.max_depth,
            learning_rate=document.learning_rate if document.learning_rate is not None else 1.0,
            init_score=document.init_score if document.init_score is not None else 0.0,
            name=document.name,
            feature_names=document.feature_names,
            hyperparameters=document.hyperparameters,
        )
    except (ValueError, IndexError) as e:
        raise ModelFormatError(f"invalid tree structure: {str(e)}")


def save_model(handle: BaseModelHandle, path: Union[str, Path]) -> Path:
    """
    Write a built-in model to a versioned JSON file.

    Raises:
        UnsupportedModelError: For external or custom models
    """
    document = model_to_document(handle)
    path = Path(path)
    path.write_text(document.to_json(), encoding="utf-8")
    logger.info(f"Saved {document.family} model '{document.name}' to {path}")
    return path


def load_model(path: Union[str, Path]) -> BaseModelHandle:
    """
    Read a model file written by ``save_model``.

    Raises:
        ModelFormatError: If the file is corrupted or has an unknown format version
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ModelFormatError(f"model file not found: {path}", str(path))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ModelFormatError(f"format error: {path} is not valid JSON ({str(e)})", str(path))

    if not isinstance(raw, dict):
        raise ModelFormatError(f"format error: {path} does not hold a model document", str(path))
    if raw.get("format") != MODEL_FORMAT:
        raise ModelFormatError(
            f"unknown format version {raw.get('format')!r}, expected {MODEL_FORMAT!r}", str(path)
        )
    try:
        document = ModelDocument.model_validate(raw)
    except PydanticValidationError as e:
        raise ModelFormatError(f"format error: {e.error_count()} invalid fields in {path}", str(path))

    logger.info(f"Loaded {document.family} model '{document.name}' from {path}")
    return model_from_document(document)
