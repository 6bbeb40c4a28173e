"""Core domain types."""

from .types import (
    CandidateGroup,
    Dataset,
    Explanation,
    ExplanationMeta,
    FeatureKind,
    FeatureOrder,
    InteractionMatrix,
    Observation,
    PathPlan,
    Step,
    UncertaintyReport,
)

__all__ = [
    "CandidateGroup",
    "Dataset",
    "Explanation",
    "ExplanationMeta",
    "FeatureKind",
    "FeatureOrder",
    "InteractionMatrix",
    "Observation",
    "PathPlan",
    "Step",
    "UncertaintyReport",
]
