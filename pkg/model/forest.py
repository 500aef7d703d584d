"""
Random forest of CART trees (Gini impurity) with seeded bootstrap and feature sampling
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field, field_validator

from errors import DegenerateLabels, DimensionMismatch

from .rng import SplitMix64

logger = logging.getLogger(__name__)

LEAF = -1


class ForestConfig(BaseModel):
    """Random forest hyperparameters"""

    n_trees: int = Field(default=100, ge=1)
    max_depth: Optional[int] = Field(default=None, ge=1, description="None grows trees until leaves are pure")
    min_samples_leaf: int = Field(default=1, ge=1)
    features_per_split: Union[Literal["sqrt", "all"], int] = Field(
        default="sqrt", description="Candidate features per node: 'sqrt', 'all' or a fixed count"
    )
    bootstrap: bool = Field(default=True, description="Resample rows with replacement per tree")
    seed: int = Field(default=0)
    n_jobs: int = Field(default=1, description="Trees grown in parallel")

    @field_validator("features_per_split")
    @classmethod
    def _positive_count(cls, value):
        if isinstance(value, int) and value < 1:
            raise ValueError("features_per_split must be at least 1")
        return value

    def candidate_count(self, n_features: int) -> int:
        if self.features_per_split == "sqrt":
            return max(1, int(math.sqrt(n_features)))
        if self.features_per_split == "all":
            return n_features
        return min(int(self.features_per_split), n_features)


@dataclass(frozen=True)
class Prediction:
    """Per-swallow class probabilities"""

    class_probs: Tuple[float, ...]

    @property
    def predicted_class(self) -> int:
        """Argmax, ties to the lowest index"""
        return int(np.argmax(self.class_probs))

    @property
    def n_classes(self) -> int:
        return len(self.class_probs)


@dataclass(frozen=True)
class Tree:
    """Flat node arrays; feature == LEAF marks a leaf, counts hold bootstrap class counts"""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row"""
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            current = node[rows]
            go_left = X[rows, self.feature[current]] <= self.threshold[current]
            node[rows] = np.where(go_left, self.left[current], self.right[current])
            active = self.feature[node] != LEAF
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        counts = self.counts[self.apply(X)]
        return counts / counts.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class Forest:
    trees: List[Tree]
    n_features: int
    n_classes: int
    config: ForestConfig

    def predict_proba_matrix(self, X) -> np.ndarray:
        """Mean over trees of leaf class frequencies, shape [n_rows, n_classes]"""
        X = _as_matrix(X)
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"forest expects {self.n_features} features, got {X.shape[1]}")
        total = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"feature matrix must be 2-D, got shape {X.shape}")
    return X


def _best_split(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    feature_order: List[int],
    n_candidates: int,
    min_leaf: int,
    n_classes: int,
) -> Optional[Tuple[int, float]]:
    """Lowest weighted Gini split over the first n_candidates non-constant features"""
    m = rows.size
    best_score = math.inf
    best: Optional[Tuple[int, float]] = None
    n_left = np.arange(1, m)
    n_right = m - n_left
    evaluated = 0
    for f in feature_order:
        if evaluated >= n_candidates:
            break
        x = X[rows, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        if xs[0] == xs[-1]:
            continue
        evaluated += 1

        onehot = np.eye(n_classes)[y[rows][order]]
        cumulative = np.cumsum(onehot, axis=0)
        left = cumulative[:-1]
        right = cumulative[-1] - left
        valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        # m * weighted Gini = m - sum(l^2)/n_l - sum(r^2)/n_r
        score = m - (left ** 2).sum(axis=1) / n_left - (right ** 2).sum(axis=1) / n_right
        score[~valid] = math.inf
        i = int(np.argmin(score))
        if score[i] < best_score:
            threshold = 0.5 * (xs[i] + xs[i + 1])
            if not xs[i] <= threshold < xs[i + 1]:
                threshold = xs[i]
            best_score = score[i]
            best = (f, float(threshold))
    return best


def _grow_tree(X: np.ndarray, y: np.ndarray, n_classes: int, cfg: ForestConfig, tree_index: int) -> Tree:
    rng = SplitMix64.stream(cfg.seed, tree_index)
    n_rows, n_features = X.shape
    rows = np.array(rng.choices(n_rows, n_rows), dtype=np.int64) if cfg.bootstrap else np.arange(n_rows)
    n_candidates = cfg.candidate_count(n_features)

    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    counts: List[np.ndarray] = []

    def new_node(node_rows: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        counts.append(np.bincount(y[node_rows], minlength=n_classes).astype(np.float64))
        return len(feature) - 1

    # Depth-first, left child first, so the random stream is consumed in a fixed order
    stack = [(rows, 0, new_node(rows))]
    while stack:
        node_rows, depth, node = stack.pop()
        node_counts = counts[node]
        if (
            np.count_nonzero(node_counts) < 2
            or node_rows.size < 2 * cfg.min_samples_leaf
            or (cfg.max_depth is not None and depth >= cfg.max_depth)
        ):
            continue
        split = _best_split(
            X, y, node_rows, rng.permutation(n_features), n_candidates, cfg.min_samples_leaf, n_classes
        )
        if split is None:
            continue
        f, t = split
        goes_left = X[node_rows, f] <= t
        left_rows, right_rows = node_rows[goes_left], node_rows[~goes_left]
        feature[node], threshold[node] = f, t
        left[node] = new_node(left_rows)
        right[node] = new_node(right_rows)
        stack.append((right_rows, depth + 1, right[node]))
        stack.append((left_rows, depth + 1, left[node]))

    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        counts=np.vstack(counts),
    )


def train_forest(X, y, cfg: ForestConfig, n_classes: Optional[int] = None) -> Forest:
    """Fit cfg.n_trees CART trees; tree i draws from the stream derived from (seed, i)"""
    X = _as_matrix(X)
    y = np.asarray(y).astype(np.int64).reshape(-1)
    if X.shape[0] != y.size:
        raise DimensionMismatch(f"{X.shape[0]} feature rows but {y.size} labels")
    if y.size < 2:
        raise DimensionMismatch("need at least two training rows")
    if np.unique(y).size < 2:
        raise DegenerateLabels(f"training labels hold a single class {np.unique(y).tolist()}")
    if y.min() < 0:
        raise ValueError("class labels must be non-negative integers")
    n_classes = int(n_classes if n_classes is not None else y.max() + 1)

    trees = Parallel(n_jobs=cfg.n_jobs, prefer="threads")(
        delayed(_grow_tree)(X, y, n_classes, cfg, i) for i in range(cfg.n_trees)
    )
    logger.debug(f"grew {len(trees)} trees, mean {np.mean([t.n_nodes for t in trees]):.1f} nodes")
    return Forest(trees=list(trees), n_features=X.shape[1], n_classes=n_classes, config=cfg)


def predict_proba(forest: Forest, x) -> Prediction:
    """Class probabilities for a single feature vector"""
    row = np.asarray(x, dtype=np.float64).reshape(1, -1)
    probs = forest.predict_proba_matrix(row)[0]
    return Prediction(class_probs=tuple(float(p) for p in probs))
