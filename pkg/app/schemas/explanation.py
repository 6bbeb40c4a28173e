from typing import List

from pydantic import Field

from .base import Document


class StepDocument(Document):
    """One attribution step of an explanation."""

    features: List[str]
    order_score: float
    attribution: float


class ExplanationMetaDocument(Document):
    """Reproducibility metadata of an explanation."""

    seed: int
    background_rows: int
    model: str


class ExplanationDocument(Document):
    """Published JSON schema of an explanation."""

    baseline: float
    prediction: float
    steps: List[StepDocument]
    meta: ExplanationMetaDocument

    @classmethod
    def from_explanation(cls, explanation) -> "ExplanationDocument":
        names = explanation.feature_names
        return cls(
            baseline=explanation.baseline,
            prediction=explanation.prediction,
            steps=[
                StepDocument(
                    features=[names[i] for i in step.group.features],
                    order_score=step.group.order_score,
                    attribution=step.attribution,
                )
                for step in explanation.steps
            ],
            meta=ExplanationMetaDocument(
                seed=explanation.meta.seed,
                background_rows=explanation.meta.background_rows,
                model=explanation.meta.model,
            ),
        )


class FeatureUncertaintyDocument(Document):
    """Contribution distribution of one feature across sampled orders."""

    name: str
    mean: float
    q1: float
    q3: float
    samples: List[float]


class UncertaintyDocument(Document):
    """Published JSON schema of an uncertainty report."""

    K: int = Field(ge=1)
    seed: int
    features: List[FeatureUncertaintyDocument]

    @classmethod
    def from_report(cls, report) -> "UncertaintyDocument":
        return cls(
            K=report.K,
            seed=report.seed,
            features=[
                FeatureUncertaintyDocument(
                    name=name,
                    mean=float(report.means[i]),
                    q1=float(report.q1[i]),
                    q3=float(report.q3[i]),
                    samples=[float(v) for v in report.per_feature_samples[i]],
                )
                for i, name in enumerate(report.feature_names)
            ],
        )


class FeatureValueDocument(Document):
    name: str
    value: float


class ShapleyDocument(Document):
    """Shapley vector, exhaustive over all orders or sampled over K orders."""

    method: str  # exhaustive, sampled
    K: int = Field(ge=1)
    seed: int
    features: List[FeatureValueDocument]
