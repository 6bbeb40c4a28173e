"""Model zoo, external bridge and model files."""

from .base import BaseModelHandle, FunctionModel
from .ensembles import train_gbm, train_random_forest
from .external import ExternalModel, ExternalModelConfig, external_model
from .linear import LinearModel, train_linear
from .persistence import load_model, save_model
from .recipes import ModelRecipe, parse_model_spec
from .trees import TreeEnsemble, TreeNode

__all__ = [
    "BaseModelHandle",
    "FunctionModel",
    "train_gbm",
    "train_random_forest",
    "ExternalModel",
    "ExternalModelConfig",
    "external_model",
    "LinearModel",
    "train_linear",
    "load_model",
    "save_model",
    "ModelRecipe",
    "parse_model_spec",
    "TreeEnsemble",
    "TreeNode",
]
