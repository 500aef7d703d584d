"""
Segmentation scoring on time masks
"""

import math
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field

from errors import LengthMismatch, SegmentOutOfRange

from .detector import Segment

DEFAULT_MASK_RESOLUTION_HZ = 100

_EPS = 1e-9


class SegmentationScore(BaseModel):
    """Cell-level overlap of predicted and ground-truth masks"""

    iou: float = Field(..., ge=0.0, le=1.0)
    sensitivity: float = Field(..., ge=0.0, le=1.0)
    specificity: float = Field(..., ge=0.0, le=1.0)


def segments_to_mask(
    segments: Sequence[Segment],
    duration_s: float,
    resolution_hz: int = DEFAULT_MASK_RESOLUTION_HZ,
) -> np.ndarray:
    """Boolean mask; cell i is set iff its centre time falls inside a segment"""
    if resolution_hz < 1:
        raise ValueError(f"resolution_hz must be a positive integer, got {resolution_hz}")
    n_cells = max(int(math.ceil(duration_s * resolution_hz - _EPS)), 0)
    centres = (np.arange(n_cells) + 0.5) / resolution_hz
    mask = np.zeros(n_cells, dtype=bool)
    for seg in segments:
        if seg.start_s < 0 or seg.end_s > duration_s + _EPS:
            raise SegmentOutOfRange(
                f"segment {seg.start_s:.4f}-{seg.end_s:.4f}s outside [0, {duration_s:.4f}]"
            )
        mask |= (centres >= seg.start_s) & (centres < seg.end_s)
    return mask


def _ratio(num: int, den: int) -> float:
    return 1.0 if den == 0 else num / den


def score_segmentation(predicted: np.ndarray, truth: np.ndarray) -> SegmentationScore:
    """IoU, sensitivity and specificity over mask cells"""
    pred = np.asarray(predicted, dtype=bool)
    true = np.asarray(truth, dtype=bool)
    if pred.shape != true.shape or pred.size == 0:
        raise LengthMismatch(f"mask lengths {pred.size} and {true.size} must match and be non-empty")

    tp = int(np.sum(pred & true))
    fp = int(np.sum(pred & ~true))
    fn = int(np.sum(~pred & true))
    tn = int(np.sum(~pred & ~true))
    return SegmentationScore(
        iou=_ratio(tp, tp + fp + fn),
        sensitivity=_ratio(tp, tp + fn),
        specificity=_ratio(tn, tn + fp),
    )
