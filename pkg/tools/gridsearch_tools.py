"""
Grid-search tool: pick the global segmentation thresholds that best match the annotations
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field

from audio.wav_io import load_wav_file
from cohort.manifest import load_manifest
from errors import MissingAnnotation
from segmentation.annotations import load_annotation
from segmentation.grid_search import ParamGrid, grid_search_params
from segmentation.scoring import segments_to_mask

from .base import Tool, write_report

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["top_db", "gap_time", "min_amplitude", "max_amplitude", "mean_iou"]


class GridSearchParams(BaseModel):
    """Grid-search command parameters"""

    manifest: str = Field(..., description="Manifest CSV whose recordings are all annotated")
    out: Optional[str] = Field(default=None, description="Directory for grid_table.csv and best_params.json")
    top_db: List[float] = Field(default_factory=lambda: [20.0])
    gap_time: List[float] = Field(default_factory=lambda: [0.6])
    min_amplitude: List[float] = Field(default_factory=lambda: [0.0])
    max_amplitude: List[float] = Field(default_factory=lambda: [2.0])
    n_jobs: int = Field(default=1, description="Grid points evaluated in parallel")


def grid_table(result) -> pd.DataFrame:
    rows = [{**point.params.model_dump(), "mean_iou": point.mean_iou} for point in result.table]
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


class GridSearchTool(Tool):
    """Exhaustive search over the four segmentation thresholds"""

    name = "gridsearch"
    description = "Score every threshold combination by mean IoU against the human annotations"

    def execute(self, params: GridSearchParams) -> Dict[str, Any]:
        records = load_manifest(params.manifest)
        clips = []
        for record in records:
            for recording in record.recordings:
                if recording.annotation_path is None or not Path(recording.annotation_path).exists():
                    raise MissingAnnotation(f"{recording.source_id}: grid search needs an annotation for every recording")
                clip = load_wav_file(recording.wav_path, source_id=recording.source_id)
                truth = segments_to_mask(load_annotation(recording.annotation_path).segments, clip.duration_s)
                clips.append((clip, truth))

        grid = ParamGrid(
            top_db=params.top_db,
            gap_time=params.gap_time,
            min_amplitude=params.min_amplitude,
            max_amplitude=params.max_amplitude,
        )
        result = grid_search_params(clips, grid, n_jobs=params.n_jobs)
        table = grid_table(result)

        report = {
            "command": self.name,
            "config": params.model_dump(mode="json"),
            "best": result.best.model_dump(),
            "best_iou": result.best_iou,
            "n_points": len(table),
        }
        if params.out:
            out_dir = Path(params.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            table.to_csv(out_dir / "grid_table.csv", index=False, lineterminator="\n")
            write_report(report, out_dir / "best_params.json")
        report["table"] = table.to_dict(orient="records")
        return report
