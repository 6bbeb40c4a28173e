"""Regression trees and vectorised tree-ensemble scoring."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.types import Dataset
from app.models.base import BaseModelHandle

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreeNode:
    """A tree node. Leaves have ``left == right == -1``.

    Numeric splits send ``x <= threshold`` left; categorical splits send
    ``x in levels`` left (one level versus the rest).
    """

    feature: int = -1
    threshold: Optional[float] = None
    levels: Optional[Tuple[int, ...]] = None
    left: int = -1
    right: int = -1
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left < 0


def tree_depth(nodes: Sequence[TreeNode], node: int = 0) -> int:
    if nodes[node].is_leaf:
        return 0
    return 1 + max(tree_depth(nodes, nodes[node].left), tree_depth(nodes, nodes[node].right))


@dataclass
class _Split:
    gain: float
    feature: int
    threshold: Optional[float]
    level: Optional[int]
    left_mask: np.ndarray


class RegressionTreeBuilder:
    """Exact greedy CART builder with squared error (variance reduction).

    Candidate splits are midpoints between sorted unique values for numeric
    features and one-level-vs-rest partitions for categorical ones. The first
    strictly best split wins (features ascending, thresholds ascending). A
    node is split whenever depth allows, its targets are not constant and a
    split with both children of at least ``min_leaf`` rows exists.
    """

    def __init__(
        self,
        max_depth: int,
        min_leaf: int = 5,
        categorical: Sequence[bool] = (),
        max_features: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.categorical = list(categorical)
        self.max_features = max_features
        self.rng = rng

    def build(self, X: np.ndarray, y: np.ndarray) -> List[TreeNode]:
        nodes: List[Optional[TreeNode]] = []
        self._grow(X, y, np.arange(X.shape[0]), 0, nodes)
        return [node for node in nodes if node is not None]

    def _grow(self, X: np.ndarray, y: np.ndarray, rows: np.ndarray, depth: int, nodes: list) -> int:
        node_id = len(nodes)
        nodes.append(None)
        targets = y[rows]
        value = float(np.mean(targets))

        split = None
        if depth < self.max_depth and rows.shape[0] >= 2 * self.min_leaf and np.ptp(targets) > 0:
            split = self._best_split(X, targets, rows)

        if split is None:
            nodes[node_id] = TreeNode(value=value)
            return node_id

        left = self._grow(X, y, rows[split.left_mask], depth + 1, nodes)
        right = self._grow(X, y, rows[~split.left_mask], depth + 1, nodes)
        nodes[node_id] = TreeNode(
            feature=split.feature,
            threshold=split.threshold,
            levels=(split.level,) if split.level is not None else None,
            left=left,
            right=right,
            value=value,
        )
        return node_id

    def _candidate_features(self, p: int) -> np.ndarray:
        if self.max_features is None or self.max_features >= p:
            return np.arange(p)
        return np.sort(self.rng.choice(p, size=self.max_features, replace=False))

    def _best_split(self, X: np.ndarray, targets: np.ndarray, rows: np.ndarray) -> Optional[_Split]:
        best: Optional[_Split] = None
        n = targets.shape[0]
        total = targets.sum()
        base = total * total / n

        for feature in self._candidate_features(X.shape[1]):
            x = X[rows, feature]
            if self.categorical and self.categorical[feature]:
                candidate = self._categorical_split(x, targets, total, base, n, int(feature))
            else:
                candidate = self._numeric_split(x, targets, total, base, n, int(feature))
            if candidate is not None and (best is None or candidate.gain > best.gain):
                best = candidate
        return best

    def _numeric_split(
        self, x: np.ndarray, targets: np.ndarray, total: float, base: float, n: int, feature: int
    ) -> Optional[_Split]:
        order = np.argsort(x, kind="stable")
        xs = x[order]
        left_sum = np.cumsum(targets[order])[:-1]
        left_n = np.arange(1, n, dtype=np.float64)
        valid = (xs[:-1] < xs[1:]) & (left_n >= self.min_leaf) & (n - left_n >= self.min_leaf)
        if not valid.any():
            return None
        right_sum = total - left_sum
        gains = left_sum * left_sum / left_n + right_sum * right_sum / (n - left_n) - base
        gains = np.where(valid, gains, -np.inf)
        k = int(np.argmax(gains))
        threshold = float((xs[k] + xs[k + 1]) / 2.0)
        return _Split(float(gains[k]), feature, threshold, None, x <= threshold)

    def _categorical_split(
        self, x: np.ndarray, targets: np.ndarray, total: float, base: float, n: int, feature: int
    ) -> Optional[_Split]:
        best: Optional[_Split] = None
        for level in np.unique(x):
            mask = x == level
            left_n = int(mask.sum())
            if left_n < self.min_leaf or n - left_n < self.min_leaf:
                continue
            left_sum = targets[mask].sum()
            right_sum = total - left_sum
            gain = float(left_sum * left_sum / left_n + right_sum * right_sum / (n - left_n) - base)
            if best is None or gain > best.gain:
                best = _Split(gain, feature, None, int(level), mask)
        return best


def evaluate_tree(nodes: Sequence[TreeNode], rows: np.ndarray) -> np.ndarray:
    """Score rows with a single tree (reference path, used in training and tests)."""
    return TreeEnsemble([list(nodes)], mode="bagged", max_depth=tree_depth(nodes)).raw_tree_outputs(rows)[0]


class TreeEnsemble(BaseModelHandle):
    """Boosted or bagged ensemble of regression trees.

    Boosted: ``init_score + sum(learning_rate * tree(x))``.
    Bagged: ``mean(tree(x))``.
    """

    family = "tree_ensemble"

    def __init__(
        self,
        trees: List[List[TreeNode]],
        mode: str = "boosted",
        max_depth: int = 1,
        learning_rate: float = 1.0,
        init_score: float = 0.0,
        name: str = "ensemble",
        feature_names: Sequence[str] = (),
        hyperparameters: Optional[dict] = None,
    ):
        super().__init__(name, hyperparameters)
        if mode not in ("boosted", "bagged"):
            raise ValueError(f"unknown ensemble mode '{mode}'")
        if not trees:
            raise ValueError("ensemble needs at least one tree")
        for nodes in trees:
            depth = tree_depth(nodes)
            if depth > max_depth:
                raise ValueError(f"tree depth {depth} exceeds max_depth {max_depth}")
            for node in nodes:
                if node.threshold is not None and not np.isfinite(node.threshold):
                    raise ValueError("tree thresholds must be finite")
                if node.levels is not None and len(node.levels) != 1:
                    raise ValueError("categorical splits hold exactly one level")
        self.trees = [list(nodes) for nodes in trees]
        self.mode = mode
        self.max_depth = max_depth
        self.learning_rate = float(learning_rate)
        self.init_score = float(init_score)
        self.feature_names = tuple(feature_names)
        self.family = "gbm" if mode == "boosted" else "random_forest"
        self._stack()

    def _stack(self) -> None:
        """Pack trees into flat padded arrays; leaves and padding loop onto themselves.

        Node ``k`` of tree ``t`` lives at flat index ``t * width + k`` and
        child pointers are flat indices as well.
        """
        n_trees = len(self.trees)
        width = max(len(nodes) for nodes in self.trees)
        size = n_trees * width
        self._width = width
        self._feature = np.zeros(size, dtype=np.intp)
        self._threshold = np.zeros(size, dtype=np.float64)
        self._categorical = np.zeros(size, dtype=bool)
        self._left = np.arange(size, dtype=np.intp)
        self._right = self._left.copy()
        self._value = np.zeros(size, dtype=np.float64)
        for t, nodes in enumerate(self.trees):
            offset = t * width
            for k, node in enumerate(nodes):
                flat = offset + k
                self._value[flat] = node.value
                if node.is_leaf:
                    continue
                self._feature[flat] = node.feature
                self._left[flat] = offset + node.left
                self._right[flat] = offset + node.right
                if node.levels is not None:
                    self._categorical[flat] = True
                    self._threshold[flat] = float(node.levels[0])
                else:
                    self._threshold[flat] = node.threshold
        self._has_categorical = bool(self._categorical.any())

    def raw_tree_outputs(self, rows: np.ndarray) -> np.ndarray:
        """Leaf value reached by every row in every tree, shape (n_trees, m)."""
        rows = np.ascontiguousarray(rows, dtype=np.float64)
        m, p = rows.shape
        flat_rows = rows.reshape(-1)
        row_offsets = (np.arange(m, dtype=np.intp) * p)[None, :]
        node = np.repeat((np.arange(len(self.trees), dtype=np.intp) * self._width)[:, None], m, axis=1)
        for _ in range(self.max_depth):
            x = np.take(flat_rows, row_offsets + np.take(self._feature, node))
            threshold = np.take(self._threshold, node)
            go_left = x <= threshold
            if self._has_categorical:
                go_left = np.where(np.take(self._categorical, node), x == threshold, go_left)
            node = np.where(go_left, np.take(self._left, node), np.take(self._right, node))
        return np.take(self._value, node)

    def _score(self, rows: np.ndarray) -> np.ndarray:
        outputs = self.raw_tree_outputs(rows)
        total = np.zeros(outputs.shape[1], dtype=np.float64)
        if self.mode == "boosted":
            for tree_output in outputs:
                total += self.learning_rate * tree_output
            return self.init_score + total
        for tree_output in outputs:
            total += tree_output
        return total / len(self.trees)


def categorical_mask(dataset: Dataset) -> List[bool]:
    return [dataset.is_categorical(i) for i in range(dataset.n_features)]
