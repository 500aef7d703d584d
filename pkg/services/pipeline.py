"""
Recording-to-feature-table orchestration shared by the CLI tools and the HTTP service
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from audio.dsp import DEFAULT_HOP, DEFAULT_N_FFT
from audio.wav_io import AudioClip, load_wav_file
from cohort.manifest import PatientRecord, Recording
from errors import MissingAnnotation
from features.extractor import FEATURE_NAMES, SwallowFeatures, extract_features
from model.aggregation import RiskReport, build_risk_report
from model.forest import Forest, Prediction
from segmentation.annotations import load_annotation
from segmentation.detector import Segment, SegmentationParams, detect_segments, sliding_windows
from settings import get_settings

logger = logging.getLogger(__name__)

SWALLOW_COUNT = "swallow_count"
TABLE_COLUMNS: List[str] = [*FEATURE_NAMES, SWALLOW_COUNT]


class SegmentationMode(str, Enum):
    """Where swallow segments come from"""

    HUMAN = "human"
    FIXED = "fixed"
    SLIDING = "sliding"


def recording_segments(
    recording: Recording,
    clip: AudioClip,
    mode: SegmentationMode,
    params: SegmentationParams,
) -> List[Segment]:
    """
    Segments of one recording

    human reads the annotation file, fixed runs the silence-threshold detector with the
    recording's own overrides when present, sliding cuts 1 s windows at 50% overlap.
    """
    mode = SegmentationMode(mode)
    if mode is SegmentationMode.HUMAN:
        if recording.annotation_path is None:
            raise MissingAnnotation(f"{recording.source_id}: no annotation_path for human segmentation")
        if not Path(recording.annotation_path).exists():
            raise MissingAnnotation(f"{recording.source_id}: annotation {recording.annotation_path} not found")
        return list(load_annotation(recording.annotation_path).segments)
    if mode is SegmentationMode.FIXED:
        return detect_segments(clip, recording.params or params)
    return sliding_windows(clip)


@dataclass
class RecordingSwallows:
    """Segments and features of one recording"""

    patient_id: str
    source_id: str
    segments: List[Segment]
    features: List[SwallowFeatures]


@dataclass
class SwallowTable:
    """One row per swallow, in manifest order"""

    X: np.ndarray
    patient_ids: List[str]
    source_ids: List[str]
    segment_indices: List[int]
    feature_names: List[str]
    segments: Dict[str, List[Segment]] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return len(self.patient_ids)

    def keys(self) -> List[Tuple[str, int]]:
        return list(zip(self.source_ids, self.segment_indices))

    def rows_for(self, patient_ids: Sequence[str]) -> np.ndarray:
        """Boolean row mask for the given patients"""
        wanted = set(patient_ids)
        return np.array([p in wanted for p in self.patient_ids], dtype=bool)

    def with_columns(self, X: np.ndarray, feature_names: Sequence[str]) -> "SwallowTable":
        """Same rows, different feature columns"""
        return SwallowTable(
            X=np.asarray(X, dtype=np.float64),
            patient_ids=self.patient_ids,
            source_ids=self.source_ids,
            segment_indices=self.segment_indices,
            feature_names=list(feature_names),
            segments=self.segments,
        )


def swallow_matrix(features: Sequence[SwallowFeatures], swallow_count: int) -> np.ndarray:
    """Feature vectors with the patient's swallow count appended as the last column"""
    if not features:
        return np.empty((0, len(TABLE_COLUMNS)), dtype=np.float64)
    return np.array([[*f.as_vector(), float(swallow_count)] for f in features], dtype=np.float64)


def _process_recording(
    record: PatientRecord,
    recording: Recording,
    mode: SegmentationMode,
    params: SegmentationParams,
    n_fft: int,
    hop: int,
) -> RecordingSwallows:
    clip = load_wav_file(recording.wav_path, source_id=recording.source_id)
    segments = recording_segments(recording, clip, mode, params)
    features = [extract_features(clip, seg, record.demographics, n_fft=n_fft, hop=hop) for seg in segments]
    logger.debug(f"{recording.source_id}: {len(segments)} swallows")
    return RecordingSwallows(record.patient_id, recording.source_id, segments, features)


def build_swallow_table(
    records: Sequence[PatientRecord],
    mode: SegmentationMode,
    params: SegmentationParams,
    n_jobs: int = 1,
    n_fft: int = DEFAULT_N_FFT,
    hop: int = DEFAULT_HOP,
) -> SwallowTable:
    """Segment and featurise every recording; recordings run in parallel and are reduced in manifest order"""
    mode = SegmentationMode(mode)
    jobs = [(record, recording) for record in records for recording in record.recordings]
    results: List[RecordingSwallows] = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_process_recording)(record, recording, mode, params, n_fft, hop) for record, recording in jobs
    )

    counts: Dict[str, int] = {}
    for result in results:
        counts[result.patient_id] = counts.get(result.patient_id, 0) + len(result.segments)

    blocks, patient_ids, source_ids, segment_indices = [], [], [], []
    segments: Dict[str, List[Segment]] = {}
    for result in results:
        segments[result.source_id] = result.segments
        blocks.append(swallow_matrix(result.features, counts[result.patient_id]))
        patient_ids.extend([result.patient_id] * len(result.features))
        source_ids.extend([result.source_id] * len(result.features))
        segment_indices.extend(range(len(result.features)))

    X = np.vstack(blocks) if blocks else np.empty((0, len(TABLE_COLUMNS)))
    logger.info(f"{mode.value} segmentation: {len(patient_ids)} swallows from {len(jobs)} recordings")
    return SwallowTable(
        X=X,
        patient_ids=patient_ids,
        source_ids=source_ids,
        segment_indices=segment_indices,
        feature_names=list(TABLE_COLUMNS),
        segments=segments,
    )


class SwallowPipeline:
    """Single-recording scoring plus cohort table building with process settings"""

    def __init__(self, n_fft: int = DEFAULT_N_FFT, hop: int = DEFAULT_HOP):
        self.n_fft = n_fft
        self.hop = hop

    def segment_clip(self, clip: AudioClip, mode: SegmentationMode, params: SegmentationParams) -> List[Segment]:
        """Automatic segmentation of an uploaded clip (no annotation available)"""
        mode = SegmentationMode(mode)
        if mode is SegmentationMode.HUMAN:
            raise MissingAnnotation("human segmentation needs an annotation file")
        if mode is SegmentationMode.FIXED:
            return detect_segments(clip, params)
        return sliding_windows(clip)

    def clip_features(
        self, clip: AudioClip, segments: Sequence[Segment], demographics: Tuple[float, int]
    ) -> List[SwallowFeatures]:
        return [extract_features(clip, seg, demographics, n_fft=self.n_fft, hop=self.hop) for seg in segments]

    def score_clip(
        self,
        forest: Forest,
        patient_id: str,
        clip: AudioClip,
        demographics: Tuple[float, int],
        mode: SegmentationMode,
        params: SegmentationParams,
        swallow_count: Optional[int] = None,
    ) -> Optional[RiskReport]:
        """Risk report for one recording, or None when no swallow was found

        swallow_count is the patient-level count fed to the model; it defaults to the swallows found here.
        """
        segments = self.segment_clip(clip, mode, params)
        features = self.clip_features(clip, segments, demographics)
        if not features:
            return None
        count = swallow_count if swallow_count is not None else len(features)
        probs = forest.predict_proba_matrix(swallow_matrix(features, count))
        return build_risk_report(patient_id, [Prediction(tuple(float(p) for p in row)) for row in probs])

    def table(
        self,
        records: Sequence[PatientRecord],
        mode: SegmentationMode,
        params: SegmentationParams,
        n_jobs: Optional[int] = None,
    ) -> SwallowTable:
        n_jobs = n_jobs if n_jobs is not None else get_settings().n_jobs
        return build_swallow_table(records, mode, params, n_jobs=n_jobs, n_fft=self.n_fft, hop=self.hop)


# Global pipeline instance
pipeline = SwallowPipeline()
