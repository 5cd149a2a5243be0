"""Bagged CART forest with recorded split gains.

Trees are stored as flat node arrays (feature, threshold, gain, left, right,
value, n_samples); a negative feature id marks a leaf. Growth is best-first
(largest-gain frontier leaf expands next) so the leaf cap is meaningful next
to the depth cap. Classification splits on gini decrease, regression on
variance reduction; scores are oriented so that higher is always better
(accuracy, negative mean absolute error).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import _kernels
from .data import CLASSIFICATION, Dataset
from ._kernels import LEAF


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    feature_fraction: float = 1.0
    num_leaves: int = 32
    max_depth: int = 5
    bagging_fraction: float = 0.632
    min_samples_leaf: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if not 0.0 < self.feature_fraction <= 1.0:
            raise ValueError("feature_fraction must be in (0, 1]")
        if not 0.0 < self.bagging_fraction <= 1.0:
            raise ValueError("bagging_fraction must be in (0, 1]")
        if self.num_leaves < 1 or self.max_depth < 1 or self.min_samples_leaf < 1:
            raise ValueError("num_leaves, max_depth and min_samples_leaf must be positive")


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float


@dataclass(frozen=True)
class Tree:
    """One fitted tree as parallel node arrays; `candidates` is its feature subset."""

    feature: np.ndarray
    threshold: np.ndarray
    gain: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    candidates: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def n_leaves(self) -> int:
        return int((self.feature == LEAF).sum())


@dataclass(frozen=True)
class Forest:
    trees: tuple[Tree, ...]
    params: ForestParams
    d: int
    task: str


def _sorted_streams(
    X: np.ndarray, y: np.ndarray, feats: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    m = X.shape[0]
    svals = np.empty((len(feats), m), dtype=np.float64)
    sy = np.empty((len(feats), m), dtype=np.float64)
    for t, j in enumerate(feats):
        order = np.argsort(X[:, j], kind="stable")
        svals[t] = X[order, j]
        sy[t] = y[order]
    return svals, sy


def best_split(X: np.ndarray, y: np.ndarray, candidates: Iterable[int], task: str) -> Optional[Split]:
    """Exhaustive best split of the given rows over the candidate features.

    Scans every midpoint between consecutive distinct sorted values per
    candidate and returns the split with the largest impurity decrease, or
    None when no split has positive gain. Ties go to the lowest feature
    index, then the lowest threshold. This is the same evaluation the tree
    grower runs at every node.
    """
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    y = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    if X.shape[0] < 2:
        raise ValueError("need at least 2 rows to split")
    feats = np.array(sorted(set(int(c) for c in candidates)), dtype=np.int64)
    svals, sy = _sorted_streams(X, y, feats)
    tot, totq = _kernels._segment_stats(sy, 0, X.shape[0])
    gain, jpos, _, thr = _kernels._eval_node(
        svals, sy, 0, X.shape[0], tot, totq, task == CLASSIFICATION, 1
    )
    if jpos < 0:
        return None
    return Split(int(feats[jpos]), float(thr), float(gain))


def fit(params: ForestParams, ds: Dataset, rng: np.random.Generator | None = None) -> Forest:
    """Fit a forest: each tree grows on a without-replacement row subsample and
    a per-tree random feature subset of size ceil(feature_fraction * d).

    Columns are presorted once per fit; each tree draws from its own substream
    spawned off `rng`, so results do not depend on evaluation order.
    Identical (params, ds, seed) give identical forests.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    n, d = ds.n, ds.d
    bag_size = max(1, int(round(params.bagging_fraction * n)))
    k = math.ceil(params.feature_fraction * d)
    is_cls = ds.task == CLASSIFICATION
    max_nodes = 2 * params.num_leaves
    fsvals, forder = _kernels.presort_columns(ds.X)
    y = np.ascontiguousarray(ds.y)
    trees = []
    for stream in rng.spawn(params.n_trees):
        bag = stream.choice(n, size=bag_size, replace=False).astype(np.int64)
        feats = stream.choice(d, size=k, replace=False).astype(np.int64)
        # A full subset has no random draw, so candidates keep canonical
        # ascending order; a proper subset is scanned in draw order, which
        # spreads exactly-tied splits (e.g. duplicated-information columns)
        # across the group instead of always electing the lowest index.
        if k == d:
            feats = np.sort(feats)
        feature = np.empty(max_nodes, dtype=np.int64)
        threshold = np.empty(max_nodes, dtype=np.float64)
        gain = np.empty(max_nodes, dtype=np.float64)
        left = np.empty(max_nodes, dtype=np.int64)
        right = np.empty(max_nodes, dtype=np.int64)
        value = np.empty(max_nodes, dtype=np.float64)
        count = np.empty(max_nodes, dtype=np.int64)
        used = _kernels.grow_tree(
            fsvals,
            forder,
            y,
            bag,
            feats,
            is_cls,
            params.max_depth,
            params.num_leaves,
            params.min_samples_leaf,
            feature,
            threshold,
            gain,
            left,
            right,
            value,
            count,
        )
        trees.append(
            Tree(
                feature[:used].copy(),
                threshold[:used].copy(),
                gain[:used].copy(),
                left[:used].copy(),
                right[:used].copy(),
                value[:used].copy(),
                count[:used].copy(),
                feats,
            )
        )
    return Forest(tuple(trees), params, d, ds.task)


def predict(forest: Forest, X: np.ndarray) -> np.ndarray:
    """Majority vote over trees (classification) or mean of tree means (regression)."""
    X = np.asfortranarray(np.asarray(X, dtype=np.float64))
    if X.ndim != 2 or X.shape[1] != forest.d:
        raise ValueError(f"expected {forest.d} columns, got shape {X.shape}")
    n = X.shape[0]
    acc = np.zeros(n, dtype=np.float64)
    buf = np.empty(n, dtype=np.float64)
    is_cls = forest.task == CLASSIFICATION
    for t in forest.trees:
        _kernels.tree_leaf_values(X, t.feature, t.threshold, t.left, t.right, t.value, buf)
        if is_cls:
            acc += buf > 0.5
        else:
            acc += buf
    if is_cls:
        return (acc * 2 > len(forest.trees)).astype(np.float64)
    return acc / len(forest.trees)


def score(forest: Forest, ds: Dataset) -> float:
    """Training-style score on a dataset: accuracy, or negative MAE for regression."""
    pred = predict(forest, ds.X)
    if forest.task == CLASSIFICATION:
        return float(np.mean(pred == ds.y))
    return float(-np.mean(np.abs(pred - ds.y)))


def importance_gain(forest: Forest) -> np.ndarray:
    """Per-feature split gains summed over all trees, divided by the tree count."""
    imp = np.zeros(forest.d, dtype=np.float64)
    for t in forest.trees:
        internal = t.feature != LEAF
        np.add.at(imp, t.feature[internal], t.gain[internal])
    return imp / len(forest.trees)


def forest_to_json(forest: Forest) -> dict:
    """JSON-ready dump of a fitted forest as plain node arrays (debug aid)."""
    return {
        "task": forest.task,
        "d": forest.d,
        "params": {
            "n_trees": forest.params.n_trees,
            "feature_fraction": forest.params.feature_fraction,
            "num_leaves": forest.params.num_leaves,
            "max_depth": forest.params.max_depth,
            "bagging_fraction": forest.params.bagging_fraction,
            "min_samples_leaf": forest.params.min_samples_leaf,
            "seed": forest.params.seed,
        },
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "gain": t.gain.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": t.value.tolist(),
                "n_samples": t.n_samples.tolist(),
                "candidates": t.candidates.tolist(),
            }
            for t in forest.trees
        ],
    }
