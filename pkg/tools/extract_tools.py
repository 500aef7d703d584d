"""
Extract tool: swallow feature table as CSV
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd
from pydantic import Field

from cohort.manifest import load_manifest
from services.pipeline import SegmentationMode, SwallowTable, pipeline

from .base import SegmentationOptions, Tool

logger = logging.getLogger(__name__)


class ExtractParams(SegmentationOptions):
    """Extract command parameters"""

    manifest: str = Field(..., description="Manifest CSV")
    out: Optional[str] = Field(default=None, description="Feature CSV path")
    mode: SegmentationMode = Field(default=SegmentationMode.HUMAN, description="human, fixed or sliding")
    n_jobs: Optional[int] = Field(default=None, description="Recordings processed in parallel")


def table_frame(table: SwallowTable) -> pd.DataFrame:
    """One row per swallow: key columns then the feature columns"""
    frame = pd.DataFrame(table.X, columns=table.feature_names)
    frame.insert(0, "segment_index", table.segment_indices)
    frame.insert(0, "source_id", table.source_ids)
    frame.insert(0, "patient_id", table.patient_ids)
    return frame


class ExtractTool(Tool):
    name = "extract"
    description = "Segment every recording and write one feature row per swallow"

    def execute(self, params: ExtractParams) -> Dict[str, Any]:
        records = load_manifest(params.manifest, defaults=params.segmentation_params())
        table = pipeline.table(records, params.mode, params.segmentation_params(), n_jobs=params.n_jobs)
        frame = table_frame(table)
        if params.out:
            Path(params.out).parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(params.out, index=False, lineterminator="\n")
            logger.info(f"wrote {len(frame)} swallow rows to {params.out}")
        return {
            "command": self.name,
            "config": params.model_dump(mode="json"),
            "n_swallows": table.n_rows,
            "n_patients": len(set(table.patient_ids)),
            "columns": list(frame.columns),
        }
