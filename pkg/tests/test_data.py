"""CSV loading, synthetic generators, splits, observation sampling and manifests."""

import json

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from app.core.types import FeatureKind
from app.data import load_csv, load_manifest, load_task, sample_observations, split, synth, train_size
from app.errors import ValidationError
from app.schemas.bench import TaskSpec


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_csv_removes_target(tmp_path):
    path = _write(tmp_path, "x1,x2,target\n0,0,0\n0,1,0\n1,0,0\n1,1,1\n")

    dataset, targets = load_csv(path, "target")

    assert dataset.feature_names == ("x1", "x2")
    np.testing.assert_array_equal(dataset.matrix, [[0, 0], [0, 1], [1, 0], [1, 1]])
    np.testing.assert_array_equal(targets, [0, 0, 0, 1])


def test_load_csv_interns_categorical_columns(tmp_path):
    path = _write(tmp_path, "color,size,label\nred,1.5,yes\nblue,2,no\nred,3,yes\n")

    dataset, targets = load_csv(path, "label", positive_label="yes")

    assert dataset.feature_kinds == (FeatureKind.CATEGORICAL, FeatureKind.NUMERIC)
    assert dataset.levels["color"] == ("blue", "red")
    assert dataset.display_value(0, dataset.matrix[0, 0]) == "red"
    np.testing.assert_array_equal(targets, [1, 0, 1])


def test_load_csv_missing_value(tmp_path):
    path = _write(tmp_path, "x1,x2,target\n0,NA,0\n1,1,1\n")

    with pytest.raises(ValidationError, match="missing value in column 'x2', row 1"):
        load_csv(path, "target")


def test_load_csv_non_binary_target(tmp_path):
    path = _write(tmp_path, "x1,target\n0,a\n1,b\n2,c\n")

    with pytest.raises(ValidationError, match="non-binary target"):
        load_csv(path, "target", positive_label="a")


def test_load_csv_requires_positive_label_for_tokens(tmp_path):
    path = _write(tmp_path, "x1,target\n0,no\n1,yes\n")

    with pytest.raises(ValidationError, match="non-binary target"):
        load_csv(path, "target")


def test_load_csv_unknown_target(tmp_path):
    path = _write(tmp_path, "x1,x2\n0,1\n")

    with pytest.raises(ValidationError, match="unknown target 'y'"):
        load_csv(path, "y")


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(ValidationError, match="file not found"):
        load_csv(tmp_path / "absent.csv", "target")


def test_synth_grid4():
    dataset, targets = synth("grid4")

    np.testing.assert_array_equal(dataset.matrix, [[0, 0], [0, 1], [1, 0], [1, 1]])
    np.testing.assert_array_equal(targets, [0, 0, 0, 1])


def test_synth_xor_parity_and_noise():
    dataset, targets = synth("xor", n=200, seed=4, n_noise=2)

    assert dataset.feature_names == ("x1", "x2", "noise1", "noise2")
    np.testing.assert_array_equal(targets, (dataset.matrix[:, 0] != dataset.matrix[:, 1]).astype(float))


def test_synth_is_seeded():
    first, _ = synth("additive", n=20, seed=9)
    second, _ = synth("additive", n=20, seed=9)

    np.testing.assert_array_equal(first.matrix, second.matrix)


def test_synth_unknown_generator():
    with pytest.raises(ValidationError, match="unknown generator"):
        synth("spiral")


def test_split_sizes_and_order():
    dataset, targets = synth("additive", n=100, seed=0)

    (train, y_train), (test, y_test) = split(dataset, targets, 0.5, seed=3)

    assert (train.n_rows, test.n_rows) == (50, 50)
    assert len(y_train) == 50 and len(y_test) == 50
    rows = {tuple(row) for row in train.matrix} | {tuple(row) for row in test.matrix}
    assert len(rows) == 100


def test_split_is_seeded():
    dataset, targets = synth("additive", n=30, seed=0)

    (first, _), _ = split(dataset, targets, 0.7, seed=11)
    (second, _), _ = split(dataset, targets, 0.7, seed=11)

    np.testing.assert_array_equal(first.matrix, second.matrix)


def test_split_keeps_one_test_row():
    dataset, targets = synth("grid4")

    (train, _), (test, _) = split(dataset, targets, 0.999)

    assert (train.n_rows, test.n_rows) == (3, 1)
    assert train_size(4, 0.999) == 3
    assert train_size(1, 0.1) == 1


def test_split_rejects_bad_fraction():
    dataset, targets = synth("grid4")

    with pytest.raises(ValidationError, match="split fraction"):
        split(dataset, targets, 1.0)


def test_sample_without_replacement():
    dataset, _ = synth("additive", n=1000, seed=0)

    sample = sample_observations(dataset, 50, seed=2)

    assert len(sample) == 50
    assert len(set(sample.rows)) == 50
    assert not sample.with_replacement
    np.testing.assert_array_equal(next(iter(sample)).values, dataset.matrix[sample.rows[0]])


def test_sample_every_row():
    dataset, _ = synth("additive", n=20, seed=0)

    sample = sample_observations(dataset, 20, seed=5)

    assert sorted(sample.rows) == list(range(20))


def test_sample_with_replacement_is_flagged():
    dataset, _ = synth("grid4")

    sample = sample_observations(dataset, 10)

    assert len(sample) == 10
    assert sample.with_replacement


def test_load_manifest_resolves_relative_paths(tmp_path):
    _write(tmp_path, "x1,target\n0,0\n1,1\n", name="tiny.csv")
    manifest = tmp_path / "tasks.json"
    manifest.write_text(
        json.dumps([{"name": "tiny", "path": "tiny.csv"}, {"name": "xor", "generator": "xor", "n_rows": 40}])
    )

    tasks = load_manifest(manifest)

    assert [task.name for task in tasks] == ["tiny", "xor"]
    assert tasks[0].path == str(tmp_path / "tiny.csv")
    dataset, _ = load_task(tasks[1])
    assert dataset.n_rows == 40


def test_load_manifest_rejects_ambiguous_tasks(tmp_path):
    manifest = tmp_path / "tasks.json"
    manifest.write_text(json.dumps([{"name": "bad", "path": "a.csv", "generator": "xor"}]))

    with pytest.raises(ValidationError, match="invalid manifest"):
        load_manifest(manifest)


def test_task_spec_needs_a_source():
    with pytest.raises(PydanticValidationError, match="exactly one"):
        TaskSpec(name="empty")
