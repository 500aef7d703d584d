import numpy as np

from model import ForestConfig, permutation_importance, train_forest
from model.importance import balanced_accuracy_metric


def _informative(rng, n=80):
    y = np.array([0, 1] * (n // 2))
    signal = rng.normal(0.0, 0.3, n) + 3.0 * y
    return signal, y


def test_noise_feature_is_unimportant(rng):
    signal, y = _informative(rng)
    X = np.column_stack([signal, rng.normal(size=y.size)])
    forest = train_forest(X, y, ForestConfig(n_trees=30, features_per_split="all", seed=5))
    ranking = dict(permutation_importance(forest, X, y, n_repeats=5, seed=1, feature_names=["signal", "noise"]))
    assert abs(ranking["noise"]) < 0.05
    assert ranking["signal"] > 0.3
    assert list(ranking) == ["signal", "noise"]


def test_identity_shuffle_changes_nothing(rng):
    signal, y = _informative(rng)
    X = np.column_stack([signal, rng.normal(size=y.size), rng.normal(size=y.size)])
    forest = train_forest(X, y, ForestConfig(n_trees=10, seed=2))
    result = permutation_importance(forest, X, y, shuffler=lambda n, _rng: list(range(n)))
    assert [name for name, _ in result] == ["0", "1", "2"]
    assert all(drop == 0.0 for _, drop in result)


def test_duplicated_feature_shares_importance(rng):
    signal, y = _informative(rng)
    noise = rng.normal(size=y.size)
    cfg = ForestConfig(n_trees=50, features_per_split="all", seed=3)
    single = train_forest(np.column_stack([signal, noise]), y, cfg)
    single_drop = dict(permutation_importance(single, np.column_stack([signal, noise]), y, seed=4))["0"]
    X_dup = np.column_stack([signal, signal, noise])
    double = train_forest(X_dup, y, cfg)
    ranking = dict(permutation_importance(double, X_dup, y, seed=4))
    assert ranking["0"] < single_drop
    assert ranking["1"] < single_drop


def test_importance_is_reproducible(rng):
    signal, y = _informative(rng)
    X = np.column_stack([signal + rng.normal(0, 1.5, y.size), rng.normal(size=y.size)])
    forest = train_forest(X, y, ForestConfig(n_trees=10, seed=6))
    a = permutation_importance(forest, X, y, metric=balanced_accuracy_metric, seed=9)
    b = permutation_importance(forest, X, y, metric=balanced_accuracy_metric, seed=9)
    assert a == b
