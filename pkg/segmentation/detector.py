"""
Swallow event detection
Fixed-parameter silence-threshold segmentation and sliding-window segmentation.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from audio.dsp import DEFAULT_HOP, DEFAULT_N_FFT, amplitude_to_db, frame_rms
from audio.wav_io import AudioClip

logger = logging.getLogger(__name__)


class Segment(BaseModel):
    """A single swallow interval in seconds"""

    model_config = ConfigDict(frozen=True)

    start_s: float = Field(..., ge=0.0, description="Segment start in seconds")
    end_s: float = Field(..., description="Segment end in seconds")

    @model_validator(mode="after")
    def _check_order(self) -> "Segment":
        if not self.start_s < self.end_s:
            raise ValueError(f"segment start {self.start_s} must precede end {self.end_s}")
        return self

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    def sample_bounds(self, sample_rate: int) -> Tuple[int, int]:
        """Sample indices [start, end) covered by the segment"""
        return int(round(self.start_s * sample_rate)), int(round(self.end_s * sample_rate))


class SegmentationParams(BaseModel):
    """The four segmentation thresholds"""

    model_config = ConfigDict(frozen=True)

    top_db: float = Field(default=20.0, gt=0.0, description="dB below the peak RMS treated as silence")
    gap_time: float = Field(default=0.6, ge=0.0, description="Segments closer than this (seconds) are merged")
    min_amplitude: float = Field(default=0.0, ge=0.0, description="Discard segments whose peak is below this")
    max_amplitude: float = Field(default=2.0, description="Discard segments whose peak is above this")

    @model_validator(mode="after")
    def _check_amplitudes(self) -> "SegmentationParams":
        if not self.min_amplitude < self.max_amplitude:
            raise ValueError(
                f"min_amplitude {self.min_amplitude} must be below max_amplitude {self.max_amplitude}"
            )
        return self


def default_params() -> SegmentationParams:
    """Optimum reported for the clinical cohort: top_db 20, gap 0.6 s, min 0, max 2"""
    return SegmentationParams(top_db=20.0, gap_time=0.6, min_amplitude=0.0, max_amplitude=2.0)


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Inclusive (first, last) index pairs of contiguous True runs"""
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return [(int(a), int(b) - 1) for a, b in zip(edges[::2], edges[1::2])]


def candidate_segments(
    clip: AudioClip,
    top_db: float,
    frame_len: int = DEFAULT_N_FFT,
    hop: int = DEFAULT_HOP,
    envelope: Optional[np.ndarray] = None,
) -> List[Segment]:
    """Non-silent runs of the RMS envelope, thresholded at -top_db relative to its peak"""
    rms = envelope if envelope is not None else frame_rms(clip, frame_len, hop)[1]
    peak = float(np.max(rms))
    if peak <= 0.0:
        return []
    non_silent = amplitude_to_db(rms, peak) > -top_db

    segments = []
    for first, last in _runs(non_silent):
        start = first * hop
        end = min((last + 1) * hop, clip.n_samples)
        if end > start:
            segments.append(Segment(start_s=start / clip.sample_rate, end_s=end / clip.sample_rate))
    return segments


def merge_segments(segments: Sequence[Segment], gap_time: float) -> List[Segment]:
    """Merge neighbours whose gap is shorter than gap_time"""
    merged: List[Segment] = []
    for seg in sorted(segments, key=lambda s: (s.start_s, s.end_s)):
        if merged and seg.start_s - merged[-1].end_s < gap_time:
            last = merged[-1]
            merged[-1] = Segment(start_s=last.start_s, end_s=max(last.end_s, seg.end_s))
        else:
            merged.append(seg)
    return merged


def segment_peak(clip: AudioClip, segment: Segment) -> float:
    """Peak absolute sample value inside a segment"""
    start, end = segment.sample_bounds(clip.sample_rate)
    window = clip.samples[start:max(end, start + 1)]
    return float(np.max(np.abs(window))) if window.size else 0.0


def detect_segments(
    clip: AudioClip,
    params: SegmentationParams,
    frame_len: int = DEFAULT_N_FFT,
    hop: int = DEFAULT_HOP,
    envelope: Optional[np.ndarray] = None,
) -> List[Segment]:
    """Silence threshold, gap merge, then min/max peak-amplitude gating"""
    candidates = candidate_segments(clip, params.top_db, frame_len, hop, envelope)
    merged = merge_segments(candidates, params.gap_time)

    kept = []
    for seg in merged:
        peak = segment_peak(clip, seg)
        if peak < params.min_amplitude or peak > params.max_amplitude:
            logger.debug(f"{clip.source_id}: discarding {seg.start_s:.3f}-{seg.end_s:.3f}s (peak {peak:.4f})")
            continue
        kept.append(seg)
    logger.debug(f"{clip.source_id}: {len(kept)} segments ({len(candidates)} candidates)")
    return kept


def sliding_windows(clip: AudioClip, window_s: float = 1.0, overlap: float = 0.5) -> List[Segment]:
    """Fixed windows at stride window_s * (1 - overlap); a remainder gets a right-aligned window"""
    if not window_s > 0:
        raise ValueError(f"window_s must be positive, got {window_s}")
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap must lie in [0, 1), got {overlap}")

    duration = clip.duration_s
    if duration <= window_s:
        return [Segment(start_s=0.0, end_s=duration)]

    stride = window_s * (1.0 - overlap)
    n_windows = int(math.floor((duration - window_s) / stride + 1e-9)) + 1
    windows = [Segment(start_s=k * stride, end_s=k * stride + window_s) for k in range(n_windows)]
    if windows[-1].end_s < duration - 1e-9:
        windows.append(Segment(start_s=duration - window_s, end_s=duration))
    return windows
