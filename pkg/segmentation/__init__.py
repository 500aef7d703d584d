"""
Swallow segmentation: detection, sliding windows, scoring and threshold search
"""

from .detector import (
    Segment,
    SegmentationParams,
    candidate_segments,
    default_params,
    detect_segments,
    merge_segments,
    sliding_windows,
)
from .scoring import SegmentationScore, score_segmentation, segments_to_mask
from .grid_search import GridSearchResult, ParamGrid, grid_search_params
from .annotations import Annotation, load_annotation, write_annotation
