import json

import numpy as np
import pytest

from errors import DegenerateLabels, DimensionMismatch, UnsupportedModelVersion
from model import Forest, ForestConfig, load_forest, predict_proba, save_forest, train_forest
from model.forest import LEAF, Tree


def _blobs(rng, n=60):
    X0 = rng.normal(0.0, 0.5, size=(n, 3))
    X1 = rng.normal(5.0, 0.5, size=(n, 3))
    return np.vstack([X0, X1]), np.array([0] * n + [1] * n)


def test_separable_blobs(rng):
    X, y = _blobs(rng)
    forest = train_forest(X, y, ForestConfig(n_trees=25, seed=1))
    X_test, y_test = _blobs(rng, 20)
    predicted = np.argmax(forest.predict_proba_matrix(X_test), axis=1)
    assert np.mean(predicted == y_test) == 1.0


def test_training_is_deterministic_and_thread_independent(rng):
    X, y = _blobs(rng)
    X[:, 2] = rng.normal(size=X.shape[0])
    a = train_forest(X, y, ForestConfig(n_trees=12, seed=4, n_jobs=1)).predict_proba_matrix(X)
    b = train_forest(X, y, ForestConfig(n_trees=12, seed=4, n_jobs=1)).predict_proba_matrix(X)
    c = train_forest(X, y, ForestConfig(n_trees=12, seed=4, n_jobs=4)).predict_proba_matrix(X)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a, c)


def test_probability_rows_sum_to_one(rng):
    X = rng.normal(size=(40, 4))
    y = rng.integers(0, 3, size=40)
    forest = train_forest(X, y, ForestConfig(n_trees=10, max_depth=3, seed=2), n_classes=3)
    probs = forest.predict_proba_matrix(rng.normal(size=(15, 4)))
    assert probs.shape == (15, 3)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0)
    assert np.all((probs >= 0) & (probs <= 1))


def test_unpruned_tree_fits_training_rows(rng):
    X = rng.normal(size=(30, 2))
    y = (X[:, 0] * X[:, 1] > 0).astype(int)
    forest = train_forest(X, y, ForestConfig(n_trees=1, bootstrap=False, features_per_split="all"))
    np.testing.assert_array_equal(forest.predict_proba_matrix(X)[:, 1], y)


def test_leaf_frequencies():
    tree = Tree(
        feature=np.array([LEAF]),
        threshold=np.array([0.0]),
        left=np.array([LEAF]),
        right=np.array([LEAF]),
        counts=np.array([[3.0, 1.0]]),
    )
    forest = Forest(trees=[tree], n_features=2, n_classes=2, config=ForestConfig())
    prediction = predict_proba(forest, [0.3, -1.0])
    assert prediction.class_probs == (0.75, 0.25)
    assert prediction.predicted_class == 0


def test_training_errors(rng):
    X = rng.normal(size=(10, 2))
    with pytest.raises(DegenerateLabels):
        train_forest(X, np.zeros(10, dtype=int), ForestConfig(n_trees=2))
    with pytest.raises(DimensionMismatch):
        train_forest(X, np.array([0, 1] * 4), ForestConfig(n_trees=2))
    forest = train_forest(X, np.array([0, 1] * 5), ForestConfig(n_trees=2))
    with pytest.raises(DimensionMismatch):
        forest.predict_proba_matrix(np.zeros((3, 5)))


def test_candidate_counts():
    assert ForestConfig().candidate_count(12) == 3
    assert ForestConfig(features_per_split="all").candidate_count(12) == 12
    assert ForestConfig(features_per_split=20).candidate_count(12) == 12


def test_forest_file_round_trip(tmp_path, rng):
    X, y = _blobs(rng, 20)
    forest = train_forest(X, y, ForestConfig(n_trees=5, seed=8))
    path = save_forest(forest, tmp_path / "model.json")
    loaded = load_forest(path)
    assert loaded.config == forest.config
    np.testing.assert_array_equal(loaded.predict_proba_matrix(X), forest.predict_proba_matrix(X))

    payload = json.loads(path.read_text(encoding="utf-8"))
    payload["version"] = 99
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(UnsupportedModelVersion):
        load_forest(path)
