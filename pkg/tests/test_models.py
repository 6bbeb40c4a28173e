"""Model zoo: trees, boosting, bagging, least squares and model specifications."""

import numpy as np
import pandas as pd
import pytest

from app.core.types import Dataset, FeatureKind
from app.data import synth
from app.errors import SingularDesignError, TrainingError, ValidationError
from app.models import TreeEnsemble, TreeNode, parse_model_spec, train_gbm, train_linear, train_random_forest
from app.models.trees import RegressionTreeBuilder, evaluate_tree, tree_depth
from app.utils.validators import validate_dataset


def test_stump_splits_at_midpoint():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])

    nodes = RegressionTreeBuilder(max_depth=1, min_leaf=1).build(X, y)

    assert nodes[0].feature == 0
    assert nodes[0].threshold == 2.5
    np.testing.assert_array_equal(evaluate_tree(nodes, X), y)


def test_min_leaf_blocks_small_splits():
    X = np.arange(8, dtype=float).reshape(-1, 1)
    y = np.arange(8, dtype=float)

    nodes = RegressionTreeBuilder(max_depth=3, min_leaf=5).build(X, y)

    assert len(nodes) == 1
    assert nodes[0].value == pytest.approx(3.5)


def test_categorical_split_is_one_level_versus_rest():
    table = pd.DataFrame({"color": ["a", "b", "c"] * 4}, dtype=str)
    dataset = validate_dataset(table)
    y = np.array([5.0 if c == "b" else 0.0 for c in table["color"]])

    nodes = RegressionTreeBuilder(max_depth=1, min_leaf=2, categorical=[True]).build(dataset.matrix, y)

    assert nodes[0].levels == (1,)
    np.testing.assert_array_equal(evaluate_tree(nodes, dataset.matrix), y)


def test_ensemble_rejects_deep_trees():
    stump = [TreeNode(feature=0, threshold=0.5, left=1, right=2), TreeNode(value=0.0), TreeNode(value=1.0)]

    with pytest.raises(ValueError, match="exceeds max_depth"):
        TreeEnsemble([stump], max_depth=0)
    assert tree_depth(stump) == 1


def test_boosted_scoring_sums_trees():
    stump = [TreeNode(feature=0, threshold=0.5, left=1, right=2), TreeNode(value=-1.0), TreeNode(value=1.0)]
    model = TreeEnsemble([stump, stump], mode="boosted", max_depth=1, learning_rate=0.5, init_score=2.0)

    np.testing.assert_array_equal(model.predict(np.array([[0.0], [1.0]])), [1.0, 3.0])


def test_batch_decomposability():
    dataset, targets = synth("product-noise", n=120, seed=1)
    model = train_gbm(dataset, targets, max_depth=3, n_trees=20)
    rows = dataset.matrix

    joined = model.predict(rows)
    split = np.concatenate([model.predict(rows[:37]), model.predict(rows[37:])])

    np.testing.assert_array_equal(joined, split)
    np.testing.assert_array_equal(joined, model.predict(rows))


def test_gbm_learns_xor():
    dataset, targets = synth("xor", n=500, seed=0)

    model = train_gbm(dataset, targets, max_depth=2, n_trees=200, learning_rate=0.1)

    assert np.mean((model.predict(dataset.matrix) - targets) ** 2) <= 0.05
    assert model.name == "gbm2"


def test_gbm_depth_is_limited():
    dataset, targets = synth("xor", n=50, seed=0)

    with pytest.raises(TrainingError, match="max_depth"):
        train_gbm(dataset, targets, max_depth=4)


def test_random_forest_is_seeded():
    dataset, targets = synth("additive", n=150, seed=0)

    first = train_random_forest(dataset, targets, n_trees=10, seed=3)
    second = train_random_forest(dataset, targets, n_trees=10, seed=3)

    np.testing.assert_array_equal(first.predict(dataset.matrix), second.predict(dataset.matrix))
    assert first.family == "random_forest"


def test_random_forest_learns_xor():
    dataset, targets = synth("xor", n=500, seed=0)

    model = train_random_forest(dataset, targets, n_trees=100, max_depth=4, seed=0)

    assert np.mean((model.predict(dataset.matrix) - targets) ** 2) <= 0.1


def test_random_forest_on_constant_targets_is_constant():
    dataset, _ = synth("additive", n=60, seed=1)

    model = train_random_forest(dataset, np.full(60, 0.3), n_trees=10, seed=2)

    np.testing.assert_allclose(model.predict(dataset.matrix), 0.3)


def test_single_full_step_gbm_on_constant_targets_predicts_the_constant():
    dataset, _ = synth("additive", n=40, seed=1)

    model = train_gbm(dataset, np.full(40, -1.25), max_depth=3, n_trees=1, learning_rate=1.0)

    np.testing.assert_allclose(model.predict(dataset.matrix), -1.25)


def test_linear_on_constant_targets_has_zero_weights():
    dataset, _ = synth("additive", n=40, seed=1)

    model = train_linear(dataset, np.full(40, 2.0))

    assert model.intercept == pytest.approx(2.0)
    np.testing.assert_allclose(model.weights, 0.0, atol=1e-10)


def test_training_rejects_non_finite_targets():
    dataset, targets = synth("additive", n=30, seed=0)
    targets[3] = np.nan

    with pytest.raises(TrainingError, match="non-finite"):
        train_gbm(dataset, targets, max_depth=1, n_trees=2)


def test_linear_recovers_weights():
    dataset, _ = synth("additive", n=80, seed=5)
    targets = 1.5 + dataset.matrix @ np.array([2.0, -1.0, 0.5])

    model = train_linear(dataset, targets)

    assert model.intercept == pytest.approx(1.5)
    np.testing.assert_allclose(model.weights, [2.0, -1.0, 0.5], atol=1e-10)


def test_linear_singular_design_reports_condition_number():
    matrix = np.column_stack([np.arange(10.0), 2 * np.arange(10.0)])
    dataset = Dataset(("a", "b"), (FeatureKind.NUMERIC,) * 2, matrix)

    with pytest.raises(SingularDesignError, match="condition number"):
        train_linear(dataset, np.arange(10.0))


def test_parse_model_spec_families():
    gbm = parse_model_spec("gbm:depth=2,trees=200,rate=0.1")
    assert (gbm.source, gbm.family) == ("train", "gbm")
    assert gbm.parameters == {"max_depth": 2, "n_trees": 200, "learning_rate": 0.1}

    assert parse_model_spec("gbm3").parameters == {"max_depth": 3}
    assert parse_model_spec("rf").family == "rf"
    assert parse_model_spec("external:python score.py").command == "python score.py"
    assert parse_model_spec("models/gbm.json").source == "file"


def test_parse_model_spec_rejects_unknown_parameters():
    with pytest.raises(ValidationError, match="invalid model parameter"):
        parse_model_spec("rf:rate=0.1")


def test_recipe_uses_family_defaults():
    dataset, targets = synth("xor", n=60, seed=0)

    model = parse_model_spec("gbm").build(
        dataset, targets, defaults={"gbm": {"max_depth": 1, "n_trees": 3}, "rf": {"max_depth": 9}}
    )

    assert model.max_depth == 1
    assert len(model.trees) == 3
