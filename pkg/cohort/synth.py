"""
Deterministic synthetic cohort generator
Writes the same manifest / WAV / annotation formats the rest of the toolkit consumes.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Literal, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field
from scipy.signal import butter, sosfiltfilt
from scipy.signal.windows import tukey

from audio.wav_io import AudioClip, write_wav
from errors import InvalidConfig
from segmentation.annotations import Annotation, dump_annotation
from segmentation.detector import Segment

logger = logging.getLogger(__name__)

NORMAL = "normal"
ABNORMAL = "abnormal"

# Fraction of each burst spent in the Hann-shaped fade in / fade out
BURST_TAPER = 0.25


class ClassProfile(BaseModel):
    """Acoustic profile of one class of synthetic swallows"""

    amplitude: Tuple[float, float] = Field(..., description="Burst peak amplitude range")
    dominant_freq: Tuple[float, float] = Field(..., description="Band centre range in Hz")
    duration: Tuple[float, float] = Field(..., description="Burst duration range in seconds")
    noise_floor: float = Field(..., ge=0.0, description="Background noise standard deviation")


def _default_profiles() -> Dict[str, ClassProfile]:
    # Weaker, lower-pitched swallows stand in for dysphagia; floors sit ~40 dB under each class peak
    return {
        NORMAL: ClassProfile(amplitude=(0.5, 0.9), dominant_freq=(600.0, 900.0), duration=(0.5, 0.78), noise_floor=0.003),
        ABNORMAL: ClassProfile(amplitude=(0.08, 0.2), dominant_freq=(250.0, 450.0), duration=(0.5, 0.78), noise_floor=0.0008),
    }


class SynthConfig(BaseModel):
    """Synthetic cohort parameters"""

    n_patients: int = Field(default=40, ge=1)
    swallows_per_patient: Tuple[int, int] = Field(default=(10, 15))
    swallows_per_recording: Tuple[int, int] = Field(default=(2, 5))
    sample_rate: int = Field(default=16000, gt=0)
    abnormal_fraction: float = Field(default=0.5, ge=0.0, le=1.0)
    separability: Literal["strict", "overlap"] = Field(default="strict")
    class_profiles: Dict[str, ClassProfile] = Field(default_factory=_default_profiles)
    gap_s: Tuple[float, float] = Field(default=(1.5, 2.5), description="Silence between bursts")
    edge_s: Tuple[float, float] = Field(default=(0.5, 1.0), description="Silence before the first / after the last burst")
    bandwidth_hz: float = Field(default=200.0, gt=0.0)
    seed: int = Field(default=7)

    def check(self) -> None:
        """Semantic validation beyond field types"""
        for name, (lo, hi) in (
            ("swallows_per_patient", self.swallows_per_patient),
            ("swallows_per_recording", self.swallows_per_recording),
            ("gap_s", self.gap_s),
            ("edge_s", self.edge_s),
        ):
            if not 0 < lo <= hi:
                raise InvalidConfig(f"{name} must be an increasing positive range, got {(lo, hi)}")
        if self.gap_s[0] < 1.5:
            raise InvalidConfig("bursts must be separated by at least 1.5 s of silence")
        missing = {NORMAL, ABNORMAL} - set(self.class_profiles)
        if missing:
            raise InvalidConfig(f"class_profiles missing {sorted(missing)}")
        nyquist = self.sample_rate / 2
        for name, profile in self.class_profiles.items():
            for field_name in ("amplitude", "dominant_freq", "duration"):
                lo, hi = getattr(profile, field_name)
                if not 0 < lo <= hi:
                    raise InvalidConfig(f"{name}.{field_name} must be an increasing positive range")
            if profile.amplitude[1] > 1.0:
                raise InvalidConfig(f"{name}.amplitude must not exceed 1.0")
            if profile.dominant_freq[0] - self.bandwidth_hz / 2 <= 0 or profile.dominant_freq[1] + self.bandwidth_hz / 2 >= nyquist:
                raise InvalidConfig(f"{name}.dominant_freq band must fit inside (0, {nyquist}) Hz")
        if self.separability == "strict":
            normal, abnormal = self.class_profiles[NORMAL].amplitude, self.class_profiles[ABNORMAL].amplitude
            if not (abnormal[1] < normal[0] or normal[1] < abnormal[0]):
                raise InvalidConfig("strict separability requires disjoint class amplitude ranges")


@dataclass
class SyntheticCohort:
    """Generated files keyed by path relative to the cohort root"""

    manifest: pd.DataFrame
    wavs: Dict[str, bytes] = field(default_factory=dict)
    annotations: Dict[str, str] = field(default_factory=dict)
    true_segments: Dict[str, List[Segment]] = field(default_factory=dict)
    labels: Dict[str, int] = field(default_factory=dict)


def _uniform(rng: np.random.Generator, bounds: Tuple[float, float]) -> float:
    return float(rng.uniform(bounds[0], bounds[1]))


def _burst(rng: np.random.Generator, n: int, centre: float, cfg: SynthConfig) -> np.ndarray:
    """Peak-normalised band-passed noise with a tapered envelope"""
    low = centre - cfg.bandwidth_hz / 2
    high = centre + cfg.bandwidth_hz / 2
    sos = butter(4, [low, high], btype="bandpass", fs=cfg.sample_rate, output="sos")
    band = sosfiltfilt(sos, rng.standard_normal(n))
    band /= np.max(np.abs(band))
    return band * tukey(n, alpha=BURST_TAPER)


def _recording(
    rng: np.random.Generator, n_bursts: int, profile: ClassProfile, cfg: SynthConfig
) -> Tuple[np.ndarray, List[Segment]]:
    sr = cfg.sample_rate
    lengths = [int(round(_uniform(rng, profile.duration) * sr)) for _ in range(n_bursts)]
    amplitudes = [_uniform(rng, profile.amplitude) for _ in range(n_bursts)]
    centres = [_uniform(rng, profile.dominant_freq) for _ in range(n_bursts)]
    lead = int(round(_uniform(rng, cfg.edge_s) * sr))
    gaps = [int(round(_uniform(rng, cfg.gap_s) * sr)) for _ in range(n_bursts - 1)]
    trail = int(round(_uniform(rng, cfg.edge_s) * sr))

    total = lead + sum(lengths) + sum(gaps) + trail
    signal = rng.normal(0.0, profile.noise_floor, total)
    segments = []
    offset = lead
    for i, (n, amp, centre) in enumerate(zip(lengths, amplitudes, centres)):
        signal[offset:offset + n] += amp * _burst(rng, n, centre, cfg)
        segments.append(Segment(start_s=offset / sr, end_s=(offset + n) / sr))
        offset += n + (gaps[i] if i < len(gaps) else 0)
    return np.clip(signal, -1.0, 1.0), segments


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def generate_cohort(cfg: SynthConfig) -> SyntheticCohort:
    """Generate every patient's demographics, PAS, recordings and ground-truth annotations"""
    cfg.check()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_patients
    n_abnormal = _round_half_up(cfg.abnormal_fraction * n)
    is_abnormal = rng.permutation(np.array([1] * n_abnormal + [0] * (n - n_abnormal)))
    genders = rng.permutation(np.arange(n) % 2)

    cohort = SyntheticCohort(manifest=pd.DataFrame())
    rows = []
    for index in range(n):
        patient_id = f"P{index + 1:03d}"
        abnormal = bool(is_abnormal[index])
        profile = cfg.class_profiles[ABNORMAL if abnormal else NORMAL]
        age = int(rng.integers(30, 97))
        pas = int(rng.integers(3, 9)) if abnormal else int(rng.integers(1, 3))
        gender = "male" if genders[index] else "female"
        cohort.labels[patient_id] = int(abnormal)

        remaining = int(rng.integers(cfg.swallows_per_patient[0], cfg.swallows_per_patient[1] + 1))
        recording_index = 0
        while remaining > 0:
            recording_index += 1
            n_bursts = min(remaining, int(rng.integers(cfg.swallows_per_recording[0], cfg.swallows_per_recording[1] + 1)))
            remaining -= n_bursts
            samples, segments = _recording(rng, n_bursts, profile, cfg)

            stem = f"{patient_id}_r{recording_index}"
            wav_rel = f"audio/{stem}.wav"
            annotation_rel = f"annotations/{stem}.json"
            cohort.wavs[wav_rel] = write_wav(AudioClip(samples, cfg.sample_rate, wav_rel))
            cohort.annotations[annotation_rel] = dump_annotation(Annotation(source_id=wav_rel, segments=segments))
            cohort.true_segments[wav_rel] = segments
            rows.append({
                "patient_id": patient_id,
                "age": age,
                "gender": gender,
                "pas": pas,
                "wav_path": wav_rel,
                "annotation_path": annotation_rel,
            })

    cohort.manifest = pd.DataFrame(rows, columns=["patient_id", "age", "gender", "pas", "wav_path", "annotation_path"])
    logger.info(
        f"generated {n} synthetic patients ({n_abnormal} abnormal), "
        f"{len(cohort.wavs)} recordings, {sum(len(s) for s in cohort.true_segments.values())} swallows"
    )
    return cohort


def write_cohort(cohort: SyntheticCohort, out_dir: Union[str, Path]) -> Path:
    """Write manifest.csv, audio/*.wav and annotations/*.json; returns the manifest path"""
    out_dir = Path(out_dir)
    for rel, payload in cohort.wavs.items():
        target = out_dir / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(payload)
    for rel, text in cohort.annotations.items():
        target = out_dir / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    manifest_path = out_dir / "manifest.csv"
    cohort.manifest.to_csv(manifest_path, index=False, lineterminator="\n")
    return manifest_path
