"""
Predict tool: per-patient risk reports from a saved forest
"""

import logging
from typing import Any, Dict, List, Optional

from pydantic import Field

from cohort.manifest import load_manifest
from model.aggregation import build_risk_report
from model.forest import Prediction
from model.serialization import load_forest
from services.pipeline import SegmentationMode, pipeline

from .base import SegmentationOptions, Tool, write_report

logger = logging.getLogger(__name__)


class PredictParams(SegmentationOptions):
    """Predict command parameters"""

    manifest: str = Field(..., description="Manifest CSV")
    model: str = Field(..., description="Forest JSON written by the train command")
    out: Optional[str] = Field(default=None, description="Risk report JSON path")
    mode: SegmentationMode = Field(default=SegmentationMode.FIXED)
    n_jobs: Optional[int] = Field(default=None)


class PredictTool(Tool):
    name = "predict"
    description = "Score every patient's swallows and aggregate them into mean, max and mode risk"

    def execute(self, params: PredictParams) -> Dict[str, Any]:
        forest = load_forest(params.model)
        records = load_manifest(params.manifest, defaults=params.segmentation_params())
        table = pipeline.table(records, params.mode, params.segmentation_params(), n_jobs=params.n_jobs)
        probs = forest.predict_proba_matrix(table.X) if table.n_rows else []

        reports: List[Dict[str, Any]] = []
        unscored: List[str] = []
        for record in records:
            rows = [i for i, p in enumerate(table.patient_ids) if p == record.patient_id]
            if not rows:
                logger.warning(f"patient {record.patient_id}: no swallows found, skipping")
                unscored.append(record.patient_id)
                continue
            preds = [Prediction(tuple(float(v) for v in probs[i])) for i in rows]
            reports.append(build_risk_report(record.patient_id, preds).model_dump())

        payload = {
            "command": self.name,
            "config": params.model_dump(mode="json"),
            "reports": reports,
            "unscored_patients": unscored,
        }
        if params.out:
            write_report(payload, params.out)
        return payload
