"""
Train tool: fit a forest on every manifest swallow and save it as JSON
"""

import logging
from typing import Any, Dict, Optional

import numpy as np
from pydantic import Field

from cohort.manifest import LabelScheme, load_manifest
from model.forest import train_forest
from model.serialization import save_forest
from services.pipeline import SegmentationMode, pipeline
from settings import get_settings

from .base import ForestOptions, SegmentationOptions, Tool

logger = logging.getLogger(__name__)


class TrainParams(SegmentationOptions, ForestOptions):
    """Train command parameters"""

    manifest: str = Field(..., description="Manifest CSV")
    out: str = Field(..., description="Forest JSON path")
    label_scheme: LabelScheme = Field(default=LabelScheme.ABNORMALITY)
    mode: SegmentationMode = Field(default=SegmentationMode.HUMAN)
    seed: int = Field(default=0)
    n_jobs: Optional[int] = Field(default=None)


class TrainTool(Tool):
    name = "train"
    description = "Train a random forest on swallow features labelled by each patient's PAS"

    def execute(self, params: TrainParams) -> Dict[str, Any]:
        records = load_manifest(params.manifest, defaults=params.segmentation_params())
        n_jobs = params.n_jobs if params.n_jobs is not None else get_settings().n_jobs
        table = pipeline.table(records, params.mode, params.segmentation_params(), n_jobs=n_jobs)

        labels = {r.patient_id: params.label_scheme.label(r.pas) for r in records}
        y = np.array([labels[p] for p in table.patient_ids], dtype=np.int64)
        cfg = params.forest_config(seed=params.seed, n_jobs=n_jobs)
        forest = train_forest(table.X, y, cfg, n_classes=len(params.label_scheme.classes))
        path = save_forest(forest, params.out)
        logger.info(f"trained {cfg.n_trees} trees on {table.n_rows} swallows, saved to {path}")
        return {
            "command": self.name,
            "config": params.model_dump(mode="json"),
            "model": str(path),
            "n_swallows": table.n_rows,
            "feature_names": table.feature_names,
            "class_counts": np.bincount(y, minlength=len(params.label_scheme.classes)).tolist(),
        }
