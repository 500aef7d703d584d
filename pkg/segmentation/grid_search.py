"""
Exhaustive search over segmentation thresholds, maximising mean IoU against ground truth
"""

import itertools
import logging
from typing import List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field, ValidationError

from audio.dsp import DEFAULT_HOP, DEFAULT_N_FFT, frame_rms
from audio.wav_io import AudioClip
from errors import EmptyGrid

from .detector import SegmentationParams, detect_segments
from .scoring import DEFAULT_MASK_RESOLUTION_HZ, score_segmentation, segments_to_mask

logger = logging.getLogger(__name__)


class ParamGrid(BaseModel):
    """Candidate values per segmentation parameter"""

    top_db: List[float] = Field(default_factory=lambda: [20.0])
    gap_time: List[float] = Field(default_factory=lambda: [0.6])
    min_amplitude: List[float] = Field(default_factory=lambda: [0.0])
    max_amplitude: List[float] = Field(default_factory=lambda: [2.0])

    def points(self) -> List[Tuple[float, float, float, float]]:
        """Cartesian product in declaration order"""
        return list(itertools.product(self.top_db, self.gap_time, self.min_amplitude, self.max_amplitude))


class GridPoint(BaseModel):
    params: SegmentationParams
    mean_iou: float


class GridSearchResult(BaseModel):
    best: SegmentationParams
    best_iou: float
    table: List[GridPoint]


def _mean_iou(
    clips: Sequence[Tuple[AudioClip, np.ndarray]],
    envelopes: Sequence[np.ndarray],
    params: SegmentationParams,
    resolution_hz: int,
) -> float:
    ious = []
    for (clip, truth), envelope in zip(clips, envelopes):
        predicted = segments_to_mask(detect_segments(clip, params, envelope=envelope), clip.duration_s, resolution_hz)
        ious.append(score_segmentation(predicted, truth).iou)
    return float(np.mean(ious))


def grid_search_params(
    clips: Sequence[Tuple[AudioClip, np.ndarray]],
    grid: ParamGrid,
    resolution_hz: int = DEFAULT_MASK_RESOLUTION_HZ,
    n_jobs: int = 1,
) -> GridSearchResult:
    """
    Evaluate every grid point and return the one with the highest mean IoU

    Ties go to the higher top_db, then the lower gap_time, then the earlier point.
    """
    if not clips:
        raise ValueError("grid search needs at least one annotated clip")
    points = grid.points()
    if not points:
        raise EmptyGrid("every parameter needs at least one candidate value")

    candidates: List[SegmentationParams] = []
    for top_db, gap_time, min_amp, max_amp in points:
        try:
            candidates.append(SegmentationParams(
                top_db=top_db, gap_time=gap_time, min_amplitude=min_amp, max_amplitude=max_amp
            ))
        except ValidationError:
            logger.warning(f"skipping invalid grid point top_db={top_db} gap={gap_time} min={min_amp} max={max_amp}")
    if not candidates:
        raise EmptyGrid("no valid parameter combination in the grid")

    # The RMS envelope does not depend on the thresholds
    envelopes = [frame_rms(clip, DEFAULT_N_FFT, DEFAULT_HOP)[1] for clip, _ in clips]
    scores = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_mean_iou)(clips, envelopes, params, resolution_hz) for params in candidates
    )

    table = [GridPoint(params=p, mean_iou=s) for p, s in zip(candidates, scores)]
    best_index = max(
        range(len(table)),
        key=lambda i: (table[i].mean_iou, table[i].params.top_db, -table[i].params.gap_time, -i),
    )
    best = table[best_index]
    logger.info(f"best of {len(table)} grid points: {best.params.model_dump()} mean IoU {best.mean_iou:.4f}")
    return GridSearchResult(best=best.params, best_iou=best.mean_iou, table=table)
