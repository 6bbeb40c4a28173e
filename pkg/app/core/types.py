"""Core domain types: datasets, observations, explanations and reports.

All types are immutable after construction and safe to share between
workers. Numeric payloads are float64 numpy arrays marked read-only.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.errors import ExplanationError, ValidationError

SUM_IDENTITY_TOLERANCE = 1e-8


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


class FeatureKind(str, Enum):
    """Column kind of a dataset feature."""

    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Column-typed background data.

    Categorical columns hold interned level ids (indices into ``levels``)
    so that fixing a feature is a plain column overwrite for every kind.
    """

    feature_names: Tuple[str, ...]
    feature_kinds: Tuple[FeatureKind, ...]
    matrix: np.ndarray
    levels: Dict[str, Tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def n_rows(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.matrix.shape[1])

    def index_of(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise ValidationError(f"unknown feature '{name}'", "feature")

    def is_categorical(self, index: int) -> bool:
        return self.feature_kinds[index] == FeatureKind.CATEGORICAL

    def display_value(self, index: int, value: float) -> str:
        """Human readable token for a stored value."""
        if self.is_categorical(index):
            return self.levels[self.feature_names[index]][int(value)]
        return f"{value:g}"

    def take(self, rows: Sequence[int]) -> "Dataset":
        """Return a dataset restricted to the given row indices (in order)."""
        return Dataset(
            feature_names=self.feature_names,
            feature_kinds=self.feature_kinds,
            matrix=self.matrix[np.asarray(rows, dtype=np.intp)],
            levels=self.levels,
        )


@dataclass(frozen=True, eq=False)
class Observation:
    """A single instance to explain, kind-checked against a Dataset schema."""

    values: np.ndarray
    display: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))

    @property
    def n_features(self) -> int:
        return int(self.values.shape[0])

    def as_row(self) -> np.ndarray:
        return self.values.reshape(1, -1)


@dataclass(frozen=True)
class CandidateGroup:
    """A single feature or a pair of features considered for the path."""

    features: Tuple[int, ...]
    order_score: float = 0.0

    def __post_init__(self):
        if len(self.features) == 2:
            i, j = self.features
            if i == j:
                raise ValidationError("pair requires distinct features")
            if i > j:
                raise ValidationError(f"pair indices must be ascending, got ({i}, {j})")
        elif len(self.features) != 1:
            raise ValidationError(f"group must hold one or two features, got {len(self.features)}")
        if min(self.features) < 0:
            raise ValidationError(f"negative feature index in {self.features}")

    @classmethod
    def single(cls, i: int, order_score: float = 0.0) -> "CandidateGroup":
        return cls((int(i),), float(order_score))

    @classmethod
    def pair(cls, i: int, j: int, order_score: float = 0.0) -> "CandidateGroup":
        i, j = sorted((int(i), int(j)))
        return cls((i, j), float(order_score))

    @property
    def is_pair(self) -> bool:
        return len(self.features) == 2

    def label(self, feature_names: Sequence[str]) -> str:
        return ":".join(feature_names[i] for i in self.features)


@dataclass(frozen=True)
class Step:
    group: CandidateGroup
    attribution: float


@dataclass(frozen=True)
class ExplanationMeta:
    seed: int
    background_rows: int
    model: str


@dataclass(frozen=True, eq=False)
class Explanation:
    """Baseline plus an ordered path of attribution steps.

    Construction fails with ExplanationError unless every feature appears in
    exactly one step and ``baseline + sum(attributions) == prediction``
    within ``1e-8 * max(1, |prediction|)``.
    """

    baseline: float
    prediction: float
    steps: Tuple[Step, ...]
    feature_names: Tuple[str, ...]
    meta: ExplanationMeta
    display: Tuple[str, ...] = ()

    def __post_init__(self):
        p = len(self.feature_names)
        seen = sorted(i for step in self.steps for i in step.group.features)
        if seen != list(range(p)):
            raise ExplanationError(
                f"steps must partition features 0..{p - 1}, got indices {seen}"
            )
        total = self.baseline + sum(step.attribution for step in self.steps)
        gap = abs(total - self.prediction)
        if not gap <= SUM_IDENTITY_TOLERANCE * max(1.0, abs(self.prediction)):
            raise ExplanationError(
                f"sum identity violated: baseline + attributions = {total!r}, "
                f"prediction = {self.prediction!r}"
            )

    @property
    def attributions(self) -> List[float]:
        return [step.attribution for step in self.steps]

    def step_label(self, step: Step) -> str:
        names = [self.feature_names[i] for i in step.group.features]
        if not self.display:
            return ":".join(names)
        return ":".join(f"{name} = {self.display[i]}" for name, i in zip(names, step.group.features))

    def cumulative(self) -> List[Tuple[float, float]]:
        """(start, end) of every step bar when stacked from the baseline."""
        bars = []
        running = self.baseline
        for step in self.steps:
            bars.append((running, running + step.attribution))
            running += step.attribution
        return bars

    def to_document(self):
        from app.schemas.explanation import ExplanationDocument

        return ExplanationDocument.from_explanation(self)


@dataclass(frozen=True, eq=False)
class InteractionMatrix:
    """Single-step contributions and pairwise interaction contributions.

    ``deltas_ij`` and ``interactions`` are p x p arrays filled only above the
    diagonal; every other entry is NaN.
    """

    deltas_i: np.ndarray
    deltas_ij: np.ndarray
    interactions: np.ndarray

    def __post_init__(self):
        for name in ("deltas_i", "deltas_ij", "interactions"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def n_features(self) -> int:
        return int(self.deltas_i.shape[0])

    def pairs(self) -> Iterator[Tuple[int, int, float, float]]:
        """Yield (i, j, delta_ij, interaction_ij) for i < j in row-major order."""
        p = self.n_features
        for i in range(p):
            for j in range(i + 1, p):
                yield i, j, float(self.deltas_ij[i, j]), float(self.interactions[i, j])


@dataclass(frozen=True)
class FeatureOrder:
    """A permutation of feature indices (single features only)."""

    permutation: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.permutation) != list(range(len(self.permutation))):
            raise ValidationError(f"invalid permutation {self.permutation}", "order")


@dataclass(frozen=True)
class PathPlan:
    """Ordered, pairwise disjoint groups covering every feature once."""

    groups: Tuple[CandidateGroup, ...]
    n_features: int

    def __post_init__(self):
        seen = sorted(i for group in self.groups for i in group.features)
        if seen != list(range(self.n_features)):
            raise ValidationError(f"path must cover every feature exactly once, got {seen}")

    @property
    def n_pairs(self) -> int:
        return sum(1 for group in self.groups if group.is_pair)


@dataclass(frozen=True, eq=False)
class UncertaintyReport:
    """Per-feature contribution distributions across sampled feature orders."""

    K: int
    seed: int
    feature_names: Tuple[str, ...]
    per_feature_samples: np.ndarray  # shape (p, K)
    means: np.ndarray
    q1: np.ndarray
    q3: np.ndarray
    iqr: np.ndarray
    minimum: np.ndarray
    maximum: np.ndarray
    baseline_explanation: Optional[Explanation] = None

    def __post_init__(self):
        for name in ("per_feature_samples", "means", "q1", "q3", "iqr", "minimum", "maximum"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @classmethod
    def from_samples(
        cls,
        samples: np.ndarray,
        seed: int,
        feature_names: Sequence[str],
        baseline_explanation: Optional[Explanation] = None,
    ) -> "UncertaintyReport":
        samples = np.asarray(samples, dtype=np.float64)
        q1, q3 = np.quantile(samples, [0.25, 0.75], axis=1, method="linear")
        return cls(
            K=int(samples.shape[1]),
            seed=int(seed),
            feature_names=tuple(feature_names),
            per_feature_samples=samples,
            means=samples.mean(axis=1),
            q1=q1,
            q3=q3,
            iqr=np.maximum(q3 - q1, 0.0),
            minimum=samples.min(axis=1),
            maximum=samples.max(axis=1),
            baseline_explanation=baseline_explanation,
        )

    def unstable_features(self, tolerance: float = 1e-10) -> List[str]:
        """Features whose contribution depends on the order (IQR above tolerance)."""
        return [name for name, iqr in zip(self.feature_names, self.iqr) if iqr > tolerance]

    def to_document(self):
        from app.schemas.explanation import UncertaintyDocument

        return UncertaintyDocument.from_report(self)
