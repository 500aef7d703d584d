"""
Permutation feature importance
"""

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .forest import Forest
from .metrics import auc_roc, balanced_accuracy, multiclass_auc
from .rng import SplitMix64

logger = logging.getLogger(__name__)

Metric = Callable[[Forest, np.ndarray, np.ndarray], float]
Shuffler = Callable[[int, SplitMix64], Sequence[int]]


def auc_metric(forest: Forest, X: np.ndarray, y: np.ndarray) -> float:
    """Swallow-level AUC-ROC (macro one-vs-rest for more than two classes)"""
    probs = forest.predict_proba_matrix(X)
    if forest.n_classes == 2:
        return auc_roc(probs[:, 1], y == 1)
    return multiclass_auc(probs, y)


def balanced_accuracy_metric(forest: Forest, X: np.ndarray, y: np.ndarray) -> float:
    return balanced_accuracy(np.argmax(forest.predict_proba_matrix(X), axis=1), y)


def _seeded_shuffle(n: int, rng: SplitMix64) -> Sequence[int]:
    return rng.permutation(n)


def permutation_importance(
    forest: Forest,
    X,
    y,
    metric: Metric = auc_metric,
    n_repeats: int = 5,
    seed: int = 0,
    feature_names: Optional[Sequence[str]] = None,
    shuffler: Shuffler = _seeded_shuffle,
) -> List[Tuple[str, float]]:
    """
    Mean metric drop when each feature column is shuffled

    Args:
        forest: fitted forest
        X, y: evaluation rows and labels
        metric: score function, higher is better
        n_repeats: shuffles per feature
        seed: the shuffle for repeat r of feature j draws from stream (seed, j, r)
        feature_names: labels for the output, defaults to column indices
        shuffler: permutation source, (n_rows, rng) -> row order

    Returns:
        (feature, mean drop) pairs sorted by descending drop, ties by column index
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).reshape(-1)
    names = list(feature_names) if feature_names is not None else [str(j) for j in range(X.shape[1])]
    baseline = metric(forest, X, y)

    drops = []
    for j in range(X.shape[1]):
        repeats = []
        for r in range(n_repeats):
            order = np.asarray(shuffler(X.shape[0], SplitMix64.stream(seed, j, r)), dtype=np.int64)
            shuffled = X.copy()
            shuffled[:, j] = X[order, j]
            repeats.append(baseline - metric(forest, shuffled, y))
        drops.append(float(np.mean(repeats)))

    ranking = sorted(range(len(drops)), key=lambda j: (-drops[j], j))
    logger.debug(f"permutation importance baseline {baseline:.4f}, top feature {names[ranking[0]]}")
    return [(names[j], drops[j]) for j in ranking]
