"""Business logic: contribution kernel, explainer and benchmark harness."""

from .bench import (
    FAMILIES,
    BenchResult,
    BenchRow,
    bundled_suite,
    count_interactions,
    depth_trend,
    mean_interactions,
    render_bucket_table,
    run_benchmark,
)
from .explainer import (
    ExplainConfig,
    default_order,
    explain_with_order,
    order_divergence,
    plan_path,
    sequential_explain,
    shapley_estimate,
    uncertainty_profile,
)
from .kernel import (
    ContributionKernel,
    baseline,
    conditional_contribution,
    group_expectation,
    interaction_matrix,
    pair_contribution,
    single_contribution,
)

__all__ = [
    "FAMILIES",
    "BenchResult",
    "BenchRow",
    "bundled_suite",
    "count_interactions",
    "depth_trend",
    "mean_interactions",
    "render_bucket_table",
    "run_benchmark",
    "ExplainConfig",
    "default_order",
    "explain_with_order",
    "order_divergence",
    "plan_path",
    "sequential_explain",
    "shapley_estimate",
    "uncertainty_profile",
    "ContributionKernel",
    "baseline",
    "conditional_contribution",
    "group_expectation",
    "interaction_matrix",
    "pair_contribution",
    "single_contribution",
]
