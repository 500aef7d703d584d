"""
Segment tool: per-recording swallow segments plus agreement with annotations
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import Field

from audio.wav_io import load_wav_file
from cohort.manifest import load_manifest
from errors import SwallowSenseError
from segmentation.annotations import load_annotation, write_annotation
from segmentation.scoring import score_segmentation, segments_to_mask
from services.pipeline import SegmentationMode, recording_segments

from .base import SegmentationOptions, Tool, source_stem, write_report

logger = logging.getLogger(__name__)


class SegmentParams(SegmentationOptions):
    """Segment command parameters"""

    manifest: str = Field(..., description="Manifest CSV")
    out: Optional[str] = Field(default=None, description="Directory for segment JSONs and the score report")
    mode: SegmentationMode = Field(default=SegmentationMode.FIXED, description="fixed, sliding or human")


class SegmentTool(Tool):
    """Segment every manifest recording and score it against its annotation when one exists"""

    name = "segment"
    description = "Detect swallow segments per recording and report IoU, sensitivity and specificity"

    def execute(self, params: SegmentParams) -> Dict[str, Any]:
        records = load_manifest(params.manifest, defaults=params.segmentation_params())
        global_params = params.segmentation_params()
        out_dir = Path(params.out) if params.out else None

        recordings: List[Dict[str, Any]] = []
        failures: List[Dict[str, str]] = []
        for record in records:
            for recording in record.recordings:
                try:
                    clip = load_wav_file(recording.wav_path, source_id=recording.source_id)
                    segments = recording_segments(recording, clip, params.mode, global_params)
                    entry: Dict[str, Any] = {
                        "patient_id": record.patient_id,
                        "source_id": recording.source_id,
                        "duration_s": clip.duration_s,
                        "segments": [s.model_dump() for s in segments],
                        "score": None,
                    }
                    if recording.annotation_path is not None and Path(recording.annotation_path).exists():
                        truth = load_annotation(recording.annotation_path).segments
                        predicted_mask = segments_to_mask(segments, clip.duration_s)
                        truth_mask = segments_to_mask(truth, clip.duration_s)
                        entry["score"] = score_segmentation(predicted_mask, truth_mask).model_dump()
                except (SwallowSenseError, OSError, ValueError) as exc:
                    logger.warning(f"{recording.source_id}: {type(exc).__name__}: {exc}")
                    failures.append({"source_id": recording.source_id, "error": f"{type(exc).__name__}: {exc}"})
                    continue

                if out_dir is not None:
                    write_annotation(recording.source_id, segments, out_dir / "segments" / f"{source_stem(recording.source_id)}.json")
                recordings.append(entry)

        scored = [r["score"] for r in recordings if r["score"] is not None]
        mean_score = None
        if scored:
            mean_score = {key: float(np.mean([s[key] for s in scored])) for key in ("iou", "sensitivity", "specificity")}
            logger.info(
                f"mean over {len(scored)} annotated recordings: IoU {mean_score['iou']:.4f}, "
                f"sensitivity {mean_score['sensitivity']:.4f}, specificity {mean_score['specificity']:.4f}"
            )

        report = {
            "command": self.name,
            "config": params.model_dump(mode="json"),
            "recordings": recordings,
            "mean_score": mean_score,
            "failures": failures,
        }
        if out_dir is not None:
            write_report(report, out_dir / "segmentation_report.json")
        return report
