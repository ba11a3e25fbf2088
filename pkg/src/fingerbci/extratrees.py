"""Extremely randomized trees for binary classification.

Every tree is grown unpruned on the full training set (no bootstrap).  At
each node a handful of candidate attributes is drawn, one uniformly random
cut per attribute, and the split with the highest Shannon information gain
wins.  The forest predicts by majority vote over trees.  All tie-breaks
are deterministic (lowest attribute index / smaller cut / class 0), so a
fixed seed gives bit-identical forests and predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crossval import stratified_folds
from .rng import child_seed, stream


@dataclass(frozen=True)
class EtParams:
    """Forest settings: attributes drawn per split, minimum node size to
    split, number of trees, and the seed for all growth randomness."""

    max_features: int
    min_samples_split: int
    n_estimators: int
    seed: int = 0

    def validate(self, feature_dim: int) -> None:
        if not 1 <= self.max_features <= feature_dim:
            raise ValueError(f"max_features must be in [1, {feature_dim}], got {self.max_features}")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")


class EtNode:
    """Internal node (attribute, cut, children) or leaf (class counts)."""

    __slots__ = ("attribute", "cut", "left", "right", "counts")

    def __init__(self, attribute=None, cut=None, left=None, right=None, counts=None):
        self.attribute = attribute
        self.cut = cut
        self.left = left
        self.right = right
        self.counts = counts

    @property
    def is_leaf(self) -> bool:
        return self.attribute is None


@dataclass
class EtForest:
    trees: list[EtNode]
    params: EtParams
    feature_dim: int


def _entropy(counts) -> float:
    total = counts[0] + counts[1]
    h = 0.0
    for c in counts:
        if 0 < c < total:
            p = c / total
            h -= p * np.log2(p)
    return h


def _draw_cut(rng: np.random.Generator, lo: float, hi: float) -> float:
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    cut = lo + (hi - lo) * u
    if cut >= hi:  # float rounding; keep the right child non-empty
        cut = np.nextafter(hi, lo)
    return float(cut)


def _grow(x: np.ndarray, y: np.ndarray, min_samples_split: int, max_features: int, rng: np.random.Generator) -> EtNode:
    counts = (int(np.sum(y == 0)), int(np.sum(y == 1)))
    if len(y) < min_samples_split or counts[0] == 0 or counts[1] == 0:
        return EtNode(counts=counts)
    lows = x.min(axis=0)
    highs = x.max(axis=0)
    candidates = np.flatnonzero(lows < highs)
    if len(candidates) == 0:
        return EtNode(counts=counts)

    k = min(max_features, len(candidates))
    drawn = rng.choice(candidates, size=k, replace=False)
    parent_entropy = _entropy(counts)
    best = None  # (gain, attribute, cut, mask)
    for attribute in drawn:
        attribute = int(attribute)
        cut = _draw_cut(rng, float(lows[attribute]), float(highs[attribute]))
        mask = x[:, attribute] <= cut
        n_left = int(mask.sum())
        left_ones = int(np.sum(y[mask]))
        right_ones = counts[1] - left_ones
        n = len(y)
        gain = (
            parent_entropy
            - n_left / n * _entropy((n_left - left_ones, left_ones))
            - (n - n_left) / n * _entropy((n - n_left - right_ones, right_ones))
        )
        if (
            best is None
            or gain > best[0]
            or (gain == best[0] and (attribute < best[1] or (attribute == best[1] and cut < best[2])))
        ):
            best = (gain, attribute, cut, mask)

    _, attribute, cut, mask = best
    return EtNode(
        attribute=attribute,
        cut=cut,
        left=_grow(x[mask], y[mask], min_samples_split, max_features, rng),
        right=_grow(x[~mask], y[~mask], min_samples_split, max_features, rng),
    )


def fit(features: np.ndarray, labels: np.ndarray, params: EtParams) -> EtForest:
    """Grow ``n_estimators`` trees, each on the full training set."""
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or len(x) != len(y):
        raise ValueError("features must be (n_samples, n_features) matching labels")
    if len(y) < 2:
        raise ValueError("need at least 2 samples")
    if len(np.unique(y)) < 2:
        raise ValueError("training labels contain a single class")
    params.validate(x.shape[1])
    trees = [
        _grow(x, y, params.min_samples_split, params.max_features, stream(params.seed, t))
        for t in range(params.n_estimators)
    ]
    return EtForest(trees=trees, params=params, feature_dim=x.shape[1])


def tree_predict(node: EtNode, x: np.ndarray) -> int:
    """Single tree vote for one sample; leaf ties go to class 0."""
    while not node.is_leaf:
        node = node.left if x[node.attribute] <= node.cut else node.right
    return 1 if node.counts[1] > node.counts[0] else 0


def predict(forest: EtForest, features: np.ndarray) -> np.ndarray:
    """Majority vote over trees; a tied forest votes class 0."""
    x = np.asarray(features, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[np.newaxis, :]
    if x.shape[1] != forest.feature_dim:
        raise ValueError(f"feature dimension {x.shape[1]} != trained dimension {forest.feature_dim}")
    votes = np.zeros(len(x), dtype=np.int64)
    for tree in forest.trees:
        for i in range(len(x)):
            votes[i] += tree_predict(tree, x[i])
    labels = (votes * 2 > len(forest.trees)).astype(np.int64)
    return labels[0] if single else labels


def tune(
    features: np.ndarray,
    labels: np.ndarray,
    max_features_grid: list[int],
    min_samples_split_grid: list[int],
    n_estimators_grid: list[int],
    folds: int = 5,
    seed: int = 0,
) -> EtParams:
    """Pick the grid point with the best mean stratified-CV accuracy.

    Ties prefer the cheapest model: fewer trees, then fewer attributes per
    split, then a larger minimum node size.  The returned params carry
    ``seed`` so a subsequent :func:`fit` is reproducible.
    """
    if not max_features_grid or not min_samples_split_grid or not n_estimators_grid:
        raise ValueError("parameter grids must be non-empty")
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    grid = [
        EtParams(max_features=mf, min_samples_split=ms, n_estimators=ne, seed=seed)
        for mf in max_features_grid
        for ms in min_samples_split_grid
        for ne in n_estimators_grid
    ]
    for params in grid:
        params.validate(x.shape[1])
    if len(grid) == 1:
        return grid[0]

    fold_ids = stratified_folds(y, folds, stream(seed, 0))
    best_params = None
    best_key = None
    for gi, params in enumerate(grid):
        accuracies = []
        for k in range(folds):
            test_mask = fold_ids == k
            forest = fit(
                x[~test_mask],
                y[~test_mask],
                EtParams(params.max_features, params.min_samples_split, params.n_estimators,
                         seed=child_seed(seed, 1, gi, k)),
            )
            accuracies.append(float(np.mean(predict(forest, x[test_mask]) == y[test_mask])))
        key = (np.mean(accuracies), -params.n_estimators, -params.max_features, params.min_samples_split)
        if best_key is None or key > best_key:
            best_key = key
            best_params = params
    return best_params
