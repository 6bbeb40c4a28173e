"""
Benchmark harness: train a model matrix per task, explain sampled test
observations and bucket the number of interactions in each path.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.stats import rankdata

from app.core.types import Dataset, Explanation
from app.data import load_task, sample_observations, split
from app.errors import BenchmarkError, ExplainHubError
from app.models import parse_model_spec
from app.schemas.bench import BenchResultDocument, BenchRowDocument, TaskSpec
from app.services.explainer import ExplainConfig, sequential_explain
from app.services.kernel import DEFAULT_MAX_ROWS

logger = logging.getLogger(__name__)

FAMILIES = ("rf", "gbm1", "gbm2", "gbm3")
BUCKET_LABELS = ("0", "1", "2", "3", "4+")
STATUS_OK = "ok"
STATUS_FAILED = "failed"


def count_interactions(explanation: Explanation) -> int:
    """Number of pair steps in the explanation path."""
    return sum(1 for step in explanation.steps if step.group.is_pair)


def bucket_counts(counts: Sequence[int]) -> Tuple[int, ...]:
    buckets = [0] * len(BUCKET_LABELS)
    for count in counts:
        buckets[min(count, len(BUCKET_LABELS) - 1)] += 1
    return tuple(buckets)


def rank_auc(scores: np.ndarray, labels: np.ndarray) -> Optional[float]:
    """
    Area under the ROC curve by the midrank formula.

    Tied scores share their average rank, so a constant scorer gets 0.5.
    Returns None when only one class is present.
    """
    labels = np.asarray(labels, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(np.asarray(scores, dtype=np.float64), method="average")
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def auc_labels(targets: np.ndarray) -> np.ndarray:
    """0/1 targets as is; real-valued targets binarized at their median."""
    targets = np.asarray(targets, dtype=np.float64)
    if np.all((targets == 0.0) | (targets == 1.0)):
        return targets == 1.0
    return targets > np.median(targets)


@dataclass(frozen=True)
class BenchRow:
    """One (task, model family) cell."""

    task: str
    family: str
    status: str
    buckets: Tuple[int, ...] = (0, 0, 0, 0, 0)
    interaction_counts: Tuple[int, ...] = ()
    auc: Optional[float] = None
    error_message: Optional[str] = None
    seconds: float = 0.0

    @property
    def n_explained(self) -> int:
        return sum(self.buckets)

    def to_document(self) -> BenchRowDocument:
        return BenchRowDocument(
            task=self.task,
            family=self.family,
            status=self.status,
            buckets=list(self.buckets),
            auc=self.auc,
            error_message=self.error_message,
        )


@dataclass(frozen=True)
class BenchResult:
    """Rows in (task, family) order. Timing stays in memory; artifacts omit it."""

    seed: int
    observations_per_task: Optional[int]
    rows: Tuple[BenchRow, ...] = field(default_factory=tuple)

    def to_document(self) -> BenchResultDocument:
        return BenchResultDocument(
            seed=self.seed,
            observations_per_task=self.observations_per_task,
            rows=[row.to_document() for row in self.rows],
        )

    @property
    def failed(self) -> List[BenchRow]:
        return [row for row in self.rows if row.status != STATUS_OK]


def _failed_row(task: str, family: str, error: Exception, started: float) -> BenchRow:
    message = error.message if isinstance(error, ExplainHubError) else str(error)
    logger.warning(f"Benchmark cell {task}/{family} failed: {message}")
    return BenchRow(
        task=task,
        family=family,
        status=STATUS_FAILED,
        error_message=message,
        seconds=time.perf_counter() - started,
    )


def _run_cell(
    task: TaskSpec,
    family: str,
    train: Tuple[Dataset, np.ndarray],
    test: Tuple[Dataset, np.ndarray],
    n_obs: int,
    seed: int,
    max_rows: Optional[int],
    defaults: Dict[str, Dict[str, Any]],
) -> BenchRow:
    started = time.perf_counter()
    try:
        train_data, train_targets = train
        test_data, test_targets = test
        model = parse_model_spec(family).build(train_data, train_targets, seed=seed, defaults=defaults)
        auc = rank_auc(model.predict(test_data.matrix), auc_labels(test_targets))

        sample = sample_observations(test_data, n_obs, seed)
        config = ExplainConfig(seed=seed, max_rows=max_rows)
        counts = tuple(
            count_interactions(sequential_explain(model, train_data, observation, config))
            for observation in sample
        )
    except Exception as e:
        return _failed_row(task.name, family, e, started)

    seconds = time.perf_counter() - started
    logger.info(f"{task.name}/{family}: {len(counts)} explanations, AUC {auc}, {seconds:.2f}s")
    return BenchRow(
        task=task.name,
        family=family,
        status=STATUS_OK,
        buckets=bucket_counts(counts),
        interaction_counts=counts,
        auc=auc,
        seconds=seconds,
    )


def run_benchmark(
    tasks: Sequence[TaskSpec],
    families: Sequence[str] = FAMILIES,
    n_obs: Optional[int] = None,
    seed: int = 0,
    workers: int = 1,
    max_rows: Optional[int] = DEFAULT_MAX_ROWS,
    defaults: Optional[Dict[str, Dict[str, Any]]] = None,
) -> BenchResult:
    """
    Run the task x family matrix.

    For each task: split with the task seed, train every family on the train
    split, compute the rank AUC on the test split, and explain ``n_obs``
    sampled test observations against the train split as background. A task
    or cell that fails is recorded as failed and skipped.

    Args:
        tasks: Task specifications
        families: Model families (``rf``, ``gbm1``, ``gbm2``, ``gbm3`` or any model spec)
        n_obs: Observations per task; overrides each task's ``n_obs``
        seed: Seed for training, sampling and explanations
        workers: Parallel (task, family) cells
        max_rows: Background row cap
        defaults: Per-family trainer keywords used where a family spec is silent

    Returns:
        BenchResult: One row per (task, family)

    Raises:
        BenchmarkError: If there are no tasks or no families
    """
    if not tasks:
        raise BenchmarkError("benchmark needs at least one task")
    if not families:
        raise BenchmarkError("benchmark needs at least one model family")
    defaults = defaults or {}

    rows: Dict[Tuple[int, int], BenchRow] = {}
    cells = []
    for t, task in enumerate(tasks):
        started = time.perf_counter()
        try:
            dataset, targets = load_task(task)
            train, test = split(dataset, targets, task.split_fraction, task.seed)
        except Exception as e:
            for f, family in enumerate(families):
                rows[(t, f)] = _failed_row(task.name, family, e, started)
            continue
        for f, family in enumerate(families):
            count = n_obs if n_obs is not None else task.n_obs
            cells.append(((t, f), (task, family, train, test, count, seed, max_rows, defaults)))

    if workers == 1 or len(cells) < 2:
        results = [_run_cell(*arguments) for _, arguments in cells]
    else:
        with Parallel(n_jobs=workers, prefer="threads") as parallel:
            results = parallel(delayed(_run_cell)(*arguments) for _, arguments in cells)
    for (key, _), row in zip(cells, results):
        rows[key] = row

    ordered = tuple(rows[key] for key in sorted(rows))
    result = BenchResult(seed=seed, observations_per_task=n_obs, rows=ordered)
    logger.info(
        f"Benchmark finished: {len(ordered)} cells, {len(result.failed)} failed, "
        f"{sum(row.seconds for row in ordered):.1f}s total"
    )
    return result


def mean_interactions(row: BenchRow) -> float:
    """Mean number of pair steps per explanation (the 4+ bucket counts as 4 without raw counts)."""
    if row.interaction_counts:
        return float(np.mean(row.interaction_counts))
    if row.n_explained == 0:
        return 0.0
    return float(np.dot(np.arange(len(row.buckets)), row.buckets) / row.n_explained)


def depth_trend(result: BenchResult) -> Dict[str, bool]:
    """Per task: does the mean interaction count not decrease from gbm1 to gbm2 to gbm3?"""
    trend: Dict[str, bool] = {}
    by_task: Dict[str, Dict[str, BenchRow]] = {}
    for row in result.rows:
        if row.status == STATUS_OK:
            by_task.setdefault(row.task, {})[row.family] = row
    for task, families in by_task.items():
        if not all(name in families for name in ("gbm1", "gbm2", "gbm3")):
            continue
        means = [mean_interactions(families[name]) for name in ("gbm1", "gbm2", "gbm3")]
        trend[task] = means[0] <= means[1] <= means[2]
    return trend


def format_buckets(buckets: Sequence[int]) -> str:
    return " ".join(str(count) for count in buckets)


def _format_auc(auc: Optional[float]) -> str:
    return "-" if auc is None or pd.isna(auc) else f"{auc:.4f}"


def render_bucket_table(result: BenchResult) -> Tuple[str, str]:
    """
    Render the interaction bucket table.

    Returns:
        Tuple[str, str]: Pretty text table and CSV, one row per (task, family)

    Raises:
        BenchmarkError: If the result has no rows
    """
    if not result.rows:
        raise BenchmarkError("empty benchmark result")

    frame = pd.DataFrame(
        [
            {
                "task": row.task,
                "family": row.family,
                **{label: count for label, count in zip(BUCKET_LABELS, row.buckets)},
                "auc": row.auc,
                "status": row.status,
                "error": row.error_message or "",
            }
            for row in result.rows
        ],
        columns=["task", "family", *BUCKET_LABELS, "auc", "status", "error"],
    )
    csv = frame.to_csv(index=False, lineterminator="\n")

    status = frame["status"].where(frame["status"] == STATUS_OK, frame["status"] + ": " + frame["error"])
    view = pd.DataFrame(
        {
            "task": frame["task"],
            "family": frame["family"],
            " ".join(BUCKET_LABELS): [format_buckets(row.buckets) for row in result.rows],
            "auc": frame["auc"],
            "status": status,
        }
    )
    text = view.to_string(index=False, justify="left", formatters={"auc": _format_auc}) + "\n"
    return text, csv


def bundled_suite(
    n_obs: int = 50, seed: int = 0, n_rows: int = 500, split_fraction: float = 0.7
) -> List[TaskSpec]:
    """The bundled synthetic manifest: one interaction task, one additive, one noisy product."""
    shared = {"n_obs": n_obs, "n_rows": n_rows, "seed": seed, "split_fraction": split_fraction}
    return [TaskSpec(name=name, generator=name, **shared) for name in ("xor", "additive", "product-noise")]
