"""Sequential explanations with interactions, order-specified explanations,
explanation-level uncertainty and sampled Shapley values."""

import itertools
import logging
import math
from typing import List, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field

from app.core.types import (
    CandidateGroup,
    Dataset,
    Explanation,
    ExplanationMeta,
    FeatureOrder,
    InteractionMatrix,
    Observation,
    PathPlan,
    Step,
    UncertaintyReport,
)
from app.errors import ValidationError
from app.models.base import BaseModelHandle
from app.services.kernel import DEFAULT_MAX_ROWS, ContributionKernel

logger = logging.getLogger(__name__)

DEFAULT_PERMUTATIONS = 100
EXHAUSTIVE_MAX_FEATURES = 8


class ExplainConfig(BaseModel):
    """Knobs shared by every explanation operation."""

    model_config = ConfigDict(frozen=True)

    interaction_preference: float = Field(default=1.0, gt=0)
    max_rows: Optional[int] = Field(default=DEFAULT_MAX_ROWS, ge=1)
    seed: int = 0
    workers: int = Field(default=1, ge=1)


OrderLike = Union[FeatureOrder, Sequence[int]]


def _kernel(model, dataset, observation, config: ExplainConfig) -> ContributionKernel:
    return ContributionKernel(model, dataset, observation, config.max_rows, config.seed, config.workers)


def _candidate_key(group: CandidateGroup, interaction_preference: float):
    strength = abs(group.order_score)
    if group.is_pair:
        strength /= interaction_preference
    # descending strength; singles before pairs; ascending indices
    return (-strength, 1 if group.is_pair else 0, group.features)


def plan_path(matrix: InteractionMatrix, interaction_preference: float = 1.0) -> PathPlan:
    """
    Rank singles by |delta_i| and pairs by |interaction_ij| and pick the path.

    Candidates are accepted greedily in rank order when all their features
    are still open. The ranking is a total order, so the path does not
    depend on the order in which candidates are generated.

    Args:
        matrix: Single and pairwise contributions
        interaction_preference: Pair strengths are divided by this factor before ranking

    Returns:
        PathPlan: Disjoint groups covering every feature
    """
    if not interaction_preference > 0:
        raise ValidationError(
            f"interaction_preference must be > 0, got {interaction_preference}", "interaction_preference"
        )
    candidates = [CandidateGroup.single(i, matrix.deltas_i[i]) for i in range(matrix.n_features)]
    candidates += [CandidateGroup.pair(i, j, interaction) for i, j, _, interaction in matrix.pairs()]
    candidates.sort(key=lambda group: _candidate_key(group, interaction_preference))

    open_features = set(range(matrix.n_features))
    path: List[CandidateGroup] = []
    for group in candidates:
        if open_features.issuperset(group.features):
            path.append(group)
            open_features.difference_update(group.features)
        if not open_features:
            break
    return PathPlan(groups=tuple(path), n_features=matrix.n_features)


def _conditioned_explanation(kernel: ContributionKernel, groups: Sequence[CandidateGroup]) -> Explanation:
    """attribution[k] = avg_yhat[k] - avg_yhat[k-1], avg_yhat[0] = baseline."""
    baseline = kernel.baseline()
    previous = baseline
    history: tuple = ()
    steps = []
    for group in groups:
        history = history + group.features
        current = kernel.group_expectation(history)
        steps.append(Step(group=group, attribution=current - previous))
        previous = current

    return Explanation(
        baseline=baseline,
        prediction=kernel.prediction(),
        steps=tuple(steps),
        feature_names=kernel.dataset.feature_names,
        meta=ExplanationMeta(
            seed=kernel.seed,
            background_rows=kernel.background_rows,
            model=kernel.model.name,
        ),
        display=kernel.observation.display,
    )


def sequential_explain(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    config: Optional[ExplainConfig] = None,
    kernel: Optional[ContributionKernel] = None,
) -> Explanation:
    """
    Explanation whose path mixes single features and interacting pairs.

    Args:
        model: Model to explain
        dataset: Background data
        observation: Instance to explain
        config: Interaction preference, row cap, seed and worker count
        kernel: Reuse an existing kernel (and its memo table) for this observation

    Returns:
        Explanation: Baseline plus one step per path group
    """
    config = config or ExplainConfig()
    kernel = kernel or _kernel(model, dataset, observation, config)
    matrix = kernel.interaction_matrix()
    plan = plan_path(matrix, config.interaction_preference)
    logger.debug(f"Path for {model.name}: {[g.features for g in plan.groups]} ({plan.n_pairs} pairs)")
    return _conditioned_explanation(kernel, plan.groups)


def default_order(kernel: ContributionKernel) -> FeatureOrder:
    """Additive default order: descending |delta_i|, ties by ascending index."""
    deltas = [kernel.single_contribution(i) for i in range(kernel.n_features)]
    return FeatureOrder(tuple(sorted(range(kernel.n_features), key=lambda i: (-abs(deltas[i]), i))))


def _as_order(order: OrderLike, n_features: int) -> FeatureOrder:
    if not isinstance(order, FeatureOrder):
        order = FeatureOrder(tuple(int(i) for i in order))
    if len(order.permutation) != n_features:
        raise ValidationError(
            f"invalid permutation: expected {n_features} features, got {len(order.permutation)}", "order"
        )
    return order


def explain_with_order(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    order: Optional[OrderLike] = None,
    config: Optional[ExplainConfig] = None,
    kernel: Optional[ContributionKernel] = None,
) -> Explanation:
    """
    Additive explanation that conditions on single features in a given order.

    ``attribution[k]`` is the added contribution of ``order[k]`` given
    ``order[:k]``. Without an order the additive default order is used.
    """
    config = config or ExplainConfig()
    kernel = kernel or _kernel(model, dataset, observation, config)
    order = default_order(kernel) if order is None else _as_order(order, dataset.n_features)
    groups = [CandidateGroup.single(i, kernel.single_contribution(i)) for i in order.permutation]
    return _conditioned_explanation(kernel, groups)


def attributions_by_feature(explanation: Explanation) -> np.ndarray:
    """Per-feature attribution vector of an explanation made of single steps."""
    vector = np.zeros(len(explanation.feature_names))
    for step in explanation.steps:
        if step.group.is_pair:
            raise ValidationError("explanation contains pair steps", "explanation")
        vector[step.group.features[0]] = step.attribution
    return vector


def _sample_orders(n_features: int, K: int, seed: int) -> List[FeatureOrder]:
    """K i.i.d. uniform permutations (Fisher-Yates on numpy's PCG64 generator)."""
    rng = np.random.default_rng(seed)
    return [FeatureOrder(tuple(int(i) for i in rng.permutation(n_features))) for _ in range(K)]


def _order_samples(kernel: ContributionKernel, orders: Sequence[FeatureOrder]) -> np.ndarray:
    """Matrix (p, len(orders)) of per-feature contributions, one column per order."""

    def contributions(order: FeatureOrder) -> np.ndarray:
        explanation = explain_with_order(kernel.model, kernel.dataset, kernel.observation, order, kernel=kernel)
        return attributions_by_feature(explanation)

    # warm the shared memo with the quantities every order needs
    kernel.baseline()
    kernel.prediction()
    if kernel.workers == 1 or len(orders) < 2:
        columns = [contributions(order) for order in orders]
    else:
        with Parallel(n_jobs=kernel.workers, prefer="threads") as parallel:
            columns = parallel(delayed(contributions)(order) for order in orders)
    return np.column_stack(columns)


def uncertainty_profile(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    K: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
    config: Optional[ExplainConfig] = None,
) -> UncertaintyReport:
    """
    Contribution distributions over K random feature orders.

    The mean over orders is the sampled Shapley value; the interquartile
    range measures how much the additive explanation depends on the order.

    Raises:
        ValidationError: If K < 1
    """
    if K < 1:
        raise ValidationError(f"K must be >= 1, got {K}", "permutations")
    config = config or ExplainConfig(seed=seed)
    kernel = _kernel(model, dataset, observation, config)

    orders = _sample_orders(dataset.n_features, K, seed)
    samples = _order_samples(kernel, orders)
    baseline_explanation = explain_with_order(model, dataset, observation, kernel=kernel)

    report = UncertaintyReport.from_samples(samples, seed, dataset.feature_names, baseline_explanation)
    logger.info(
        f"Uncertainty over {K} orders used {kernel.n_evaluations} group expectations; "
        f"unstable features: {report.unstable_features()}"
    )
    return report


def shapley_estimate(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    K: Optional[int] = DEFAULT_PERMUTATIONS,
    exhaustive: bool = False,
    seed: int = 0,
    config: Optional[ExplainConfig] = None,
    max_exhaustive_features: int = EXHAUSTIVE_MAX_FEATURES,
) -> np.ndarray:
    """
    Shapley values as the average of order-specific contributions.

    Exhaustive mode averages over all p! orders (the exact Shapley value)
    and is limited to ``max_exhaustive_features`` features. Sampled mode
    averages over K seeded random orders.
    """
    p = dataset.n_features
    config = config or ExplainConfig(seed=seed)
    kernel = _kernel(model, dataset, observation, config)

    if exhaustive:
        if p > max_exhaustive_features:
            raise ValidationError(
                f"exhaustive Shapley limited to p <= {max_exhaustive_features}, got p = {p}", "exhaustive"
            )
        total = np.zeros(p)
        for permutation in itertools.permutations(range(p)):
            history: tuple = ()
            previous = kernel.baseline()
            for i in permutation:
                history = history + (i,)
                current = kernel.group_expectation(history)
                total[i] += current - previous
                previous = current
        return total / math.factorial(p)

    if K is None or K < 1:
        raise ValidationError(f"K must be >= 1, got {K}", "permutations")
    samples = _order_samples(kernel, _sample_orders(p, K, seed))
    return samples.mean(axis=1)


def order_divergence(
    model: BaseModelHandle,
    dataset: Dataset,
    observation: Observation,
    first: OrderLike,
    second: OrderLike,
    config: Optional[ExplainConfig] = None,
) -> np.ndarray:
    """Per-feature attribution under ``second`` minus under ``first``; all zeros for additive models."""
    config = config or ExplainConfig()
    kernel = _kernel(model, dataset, observation, config)
    a = attributions_by_feature(explain_with_order(model, dataset, observation, first, kernel=kernel))
    b = attributions_by_feature(explain_with_order(model, dataset, observation, second, kernel=kernel))
    return b - a
