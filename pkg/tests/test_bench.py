"""Benchmark harness: interaction buckets, rank AUC and the bucket table."""

import numpy as np
import pytest

from app.config import Settings
from app.core.types import CandidateGroup, Explanation, ExplanationMeta, Step
from app.errors import BenchmarkError
from app.main import trainer_defaults
from app.schemas.bench import TaskSpec
from app.services.bench import (
    BenchResult,
    BenchRow,
    STATUS_FAILED,
    STATUS_OK,
    bucket_counts,
    bundled_suite,
    count_interactions,
    depth_trend,
    format_buckets,
    rank_auc,
    render_bucket_table,
    run_benchmark,
)

FAST = {"gbm": {"n_trees": 40, "min_leaf": 2}, "rf": {"n_trees": 8, "min_leaf": 2}}


def _xor_task(**overrides):
    fields = {"name": "xor", "generator": "xor", "n_rows": 120, "n_obs": 6}
    fields.update(overrides)
    return TaskSpec(**fields)


def test_count_interactions():
    steps = (
        Step(CandidateGroup.pair(0, 1), 0.5),
        Step(CandidateGroup.single(2), -0.25),
    )
    explanation = Explanation(
        feature_names=("a", "b", "c"),
        baseline=0.25,
        prediction=0.5,
        steps=steps,
        meta=ExplanationMeta(model="m", seed=0, background_rows=4),
    )

    assert count_interactions(explanation) == 1


def test_bucket_counts_caps_at_four():
    assert bucket_counts([0, 0, 1, 2, 3, 4, 7]) == (2, 1, 1, 1, 2)
    assert format_buckets((49, 1, 0, 0, 0)) == "49 1 0 0 0"


def test_rank_auc():
    labels = np.array([0, 0, 1, 1])

    assert rank_auc(np.array([0.1, 0.2, 0.8, 0.9]), labels) == 1.0
    assert rank_auc(np.array([0.9, 0.8, 0.2, 0.1]), labels) == 0.0
    assert rank_auc(np.full(4, 0.3), labels) == 0.5
    assert rank_auc(np.array([0.1, 0.2]), np.array([1, 1])) is None


def test_matrix_rows_and_buckets():
    families = ("rf", "gbm1", "gbm2", "gbm3")

    result = run_benchmark([_xor_task()], families=families, defaults=FAST)

    assert [(row.task, row.family) for row in result.rows] == [("xor", family) for family in families]
    for row in result.rows:
        assert row.status == STATUS_OK
        assert sum(row.buckets) == 6
        assert row.auc is not None


def test_depth_one_models_never_show_pairs():
    tasks = [_xor_task(), TaskSpec(name="additive", generator="additive", n_rows=120, n_obs=6)]

    result = run_benchmark(tasks, families=("gbm1",), defaults=FAST)

    for row in result.rows:
        assert row.buckets == (6, 0, 0, 0, 0)


def test_depth_two_models_find_the_xor_pair():
    result = run_benchmark([_xor_task(n_rows=300, n_obs=10)], families=("gbm1", "gbm2"), defaults=FAST)

    gbm1, gbm2 = result.rows
    assert gbm1.buckets[0] == 10
    assert gbm2.buckets[1] >= 8
    assert gbm2.auc > 0.9


def test_depth_trend():
    def row(family, buckets):
        return BenchRow(task="t", family=family, status=STATUS_OK, buckets=buckets)

    rising = BenchResult(seed=0, observations_per_task=2, rows=(
        row("gbm1", (2, 0, 0, 0, 0)), row("gbm2", (1, 1, 0, 0, 0)), row("gbm3", (0, 1, 1, 0, 0)),
    ))
    falling = BenchResult(seed=0, observations_per_task=2, rows=(
        row("gbm1", (0, 2, 0, 0, 0)), row("gbm2", (2, 0, 0, 0, 0)), row("gbm3", (2, 0, 0, 0, 0)),
    ))

    assert depth_trend(rising) == {"t": True}
    assert depth_trend(falling) == {"t": False}


def test_failed_task_is_recorded(tmp_path):
    missing = TaskSpec(name="missing", path=str(tmp_path / "absent.csv"))

    result = run_benchmark([missing, _xor_task(n_obs=2)], families=("gbm1",), defaults=FAST)

    failed, ok = result.rows
    assert failed.status == STATUS_FAILED
    assert "file not found" in failed.error_message
    assert failed.buckets == (0, 0, 0, 0, 0)
    assert ok.status == STATUS_OK
    assert result.failed == [failed]


def test_workers_do_not_change_results():
    tasks = [_xor_task(n_obs=4), TaskSpec(name="additive", generator="additive", n_rows=80, n_obs=4)]

    serial = run_benchmark(tasks, families=("gbm1", "gbm2"), defaults=FAST, workers=1)
    threaded = run_benchmark(tasks, families=("gbm1", "gbm2"), defaults=FAST, workers=4)

    assert render_bucket_table(serial)[1] == render_bucket_table(threaded)[1]
    assert serial.to_document().to_json() == threaded.to_document().to_json()


def test_empty_inputs_raise():
    with pytest.raises(BenchmarkError):
        run_benchmark([])
    with pytest.raises(BenchmarkError):
        run_benchmark([_xor_task()], families=())


def test_bucket_table():
    rows = tuple(
        BenchRow(task="t", family=family, status=STATUS_OK, buckets=(49, 1, 0, 0, 0), auc=0.75)
        for family in ("rf", "gbm1", "gbm2")
    ) + (BenchRow(task="t", family="gbm3", status=STATUS_FAILED, error_message="boom"),)

    text, csv = render_bucket_table(BenchResult(seed=0, observations_per_task=50, rows=rows))

    lines = csv.splitlines()
    assert lines[0] == "task,family,0,1,2,3,4+,auc,status,error"
    assert len(lines) == 5
    assert lines[1] == "t,rf,49,1,0,0,0,0.75,ok,"
    assert "49 1 0 0 0" in text
    assert "failed: boom" in text


def test_bucket_text_table_columns():
    rows = (
        BenchRow(task="xor", family="rf", status=STATUS_OK, buckets=(3, 2, 0, 0, 0), auc=0.5),
        BenchRow(task="xor", family="gbm3", status=STATUS_FAILED, error_message="boom"),
    )

    text, _ = render_bucket_table(BenchResult(seed=0, observations_per_task=5, rows=rows))

    lines = text.splitlines()
    assert lines[0].split() == ["task", "family", "0", "1", "2", "3", "4+", "auc", "status"]
    assert lines[1].split() == ["xor", "rf", "3", "2", "0", "0", "0", "0.5000", "ok"]
    assert lines[2].split() == ["xor", "gbm3", "0", "0", "0", "0", "0", "-", "failed:", "boom"]


def test_bucket_table_needs_rows():
    with pytest.raises(BenchmarkError, match="empty"):
        render_bucket_table(BenchResult(seed=0, observations_per_task=None))


def test_bundled_suite():
    suite = bundled_suite(n_obs=5, n_rows=100)

    assert [task.name for task in suite] == ["xor", "additive", "product-noise"]
    assert all(task.n_obs == 5 and task.n_rows == 100 for task in suite)


@pytest.mark.slow
def test_bundled_suite_end_to_end():
    result = run_benchmark(bundled_suite(n_obs=50, seed=42), seed=42, defaults=trainer_defaults(Settings()))

    assert len(result.rows) == 12
    assert not result.failed
    assert all(row.n_explained == 50 for row in result.rows)
    assert all(row.buckets == (50, 0, 0, 0, 0) for row in result.rows if row.family == "gbm1")
    assert depth_trend(result) == {"xor": True, "additive": True, "product-noise": True}
