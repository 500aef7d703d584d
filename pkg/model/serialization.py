"""
Versioned JSON persistence for fitted forests
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from errors import UnsupportedModelVersion

from .forest import Forest, ForestConfig, Tree

FORMAT_NAME = "swallowsense-forest"
FORMAT_VERSION = 1


def forest_to_dict(forest: Forest) -> Dict[str, Any]:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "n_features": forest.n_features,
        "n_classes": forest.n_classes,
        "config": forest.config.model_dump(),
        "trees": [
            {
                "feature": tree.feature.tolist(),
                "threshold": tree.threshold.tolist(),
                "left": tree.left.tolist(),
                "right": tree.right.tolist(),
                "counts": tree.counts.astype(np.int64).tolist(),
            }
            for tree in forest.trees
        ],
    }


def forest_from_dict(payload: Dict[str, Any]) -> Forest:
    if payload.get("format") != FORMAT_NAME or payload.get("version") != FORMAT_VERSION:
        raise UnsupportedModelVersion(
            f"expected {FORMAT_NAME} v{FORMAT_VERSION}, got {payload.get('format')} v{payload.get('version')}"
        )
    trees = [
        Tree(
            feature=np.array(t["feature"], dtype=np.int64),
            threshold=np.array(t["threshold"], dtype=np.float64),
            left=np.array(t["left"], dtype=np.int64),
            right=np.array(t["right"], dtype=np.int64),
            counts=np.array(t["counts"], dtype=np.float64).reshape(len(t["feature"]), -1),
        )
        for t in payload["trees"]
    ]
    return Forest(
        trees=trees,
        n_features=int(payload["n_features"]),
        n_classes=int(payload["n_classes"]),
        config=ForestConfig.model_validate(payload["config"]),
    )


def save_forest(forest: Forest, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(forest_to_dict(forest)), encoding="utf-8")
    return path


def load_forest(path: Union[str, Path]) -> Forest:
    return forest_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
