"""
Domain-informed swallow features
Spectral peaks and centroids, amplitude statistics, and the area under the absolute waveform.
"""

from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from audio.dsp import DEFAULT_HOP, DEFAULT_N_FFT, Spectrogram, stft
from audio.wav_io import AudioClip
from errors import EmptySegment, EmptySpectrogram, SegmentOutOfBounds, TooFewBins, TooFewSamples
from segmentation.detector import Segment

N_TOP_FREQS = 5

# centroid summaries are quantised to 1e-6 Hz
FREQ_DECIMALS = 6

FEATURE_NAMES: List[str] = [
    *(f"freq_{i}" for i in range(1, N_TOP_FREQS + 1)),
    "mean_freq",
    "median_freq",
    "peak_amp",
    "avg_amp",
    "auc",
    "age",
    "gender",
]

GENDER_CODES = {"female": 0, "male": 1}


class SwallowFeatures(BaseModel):
    """Feature vector of one swallow segment"""

    top_freqs: List[float] = Field(..., description="Five most salient STFT bin frequencies (Hz), descending salience")
    mean_freq: float = Field(..., ge=0.0, description="Time-average of per-frame spectral centroids (Hz)")
    median_freq: float = Field(..., ge=0.0, description="Median of per-frame spectral centroids (Hz)")
    peak_amp: float = Field(..., ge=0.0, le=1.0)
    avg_amp: float = Field(..., ge=0.0, le=1.0)
    auc: float = Field(..., ge=0.0, description="Trapezoid integral of |waveform| in amplitude-seconds")
    duration_s: float = Field(..., gt=0.0)
    age: float = Field(..., gt=0.0)
    gender: int = Field(..., ge=0, le=1, description="0 female, 1 male")

    @field_validator("top_freqs")
    @classmethod
    def _five_freqs(cls, value: List[float]) -> List[float]:
        if len(value) != N_TOP_FREQS:
            raise ValueError(f"expected {N_TOP_FREQS} top frequencies, got {len(value)}")
        return value

    @model_validator(mode="after")
    def _amplitude_order(self) -> "SwallowFeatures":
        if self.avg_amp > self.peak_amp:
            raise ValueError("avg_amp cannot exceed peak_amp")
        return self

    def as_vector(self) -> List[float]:
        """Values in FEATURE_NAMES order"""
        return [
            *self.top_freqs,
            self.mean_freq,
            self.median_freq,
            self.peak_amp,
            self.avg_amp,
            self.auc,
            self.age,
            float(self.gender),
        ]


def top_k_frequencies(spec: Spectrogram, k: int = N_TOP_FREQS) -> List[float]:
    """Centre frequencies of the k bins with highest mean magnitude; ties go to the lower frequency"""
    if spec.n_bins < k:
        raise TooFewBins(f"spectrogram has {spec.n_bins} bins, need {k}")
    salience = spec.magnitudes.mean(axis=1)
    order = np.lexsort((spec.bin_freqs, -salience))
    return [float(spec.bin_freqs[i]) for i in order[:k]]


def spectral_centroids(spec: Spectrogram) -> np.ndarray:
    """Per-frame magnitude-weighted mean frequency; silent frames give 0"""
    totals = spec.magnitudes.sum(axis=0)
    weighted = spec.bin_freqs @ spec.magnitudes
    return np.divide(weighted, totals, out=np.zeros_like(weighted), where=totals > 0)


def mean_median_frequency(spec: Spectrogram) -> Tuple[float, float]:
    """Mean and median over frames of the spectral centroid"""
    if spec.n_frames == 0 or spec.n_bins == 0:
        raise EmptySpectrogram("cannot summarise an empty spectrogram")
    centroids = spectral_centroids(spec)
    return (
        round(float(np.mean(centroids)), FREQ_DECIMALS),
        round(float(np.median(centroids)), FREQ_DECIMALS),
    )


def amplitude_stats(samples) -> Tuple[float, float]:
    """(peak |s|, mean |s|)"""
    magnitude = np.abs(np.asarray(samples, dtype=np.float64))
    if magnitude.size == 0:
        raise EmptySegment("amplitude statistics of an empty segment")
    peak = float(magnitude.max())
    # Summation rounding can push the mean of a constant run one ulp past its peak
    return peak, min(float(magnitude.mean()), peak)


def area_under_curve(samples, sample_rate: int) -> float:
    """Composite trapezoid integral of |s| with spacing 1/sample_rate"""
    magnitude = np.abs(np.asarray(samples, dtype=np.float64))
    if magnitude.size < 2:
        raise TooFewSamples(f"trapezoid rule needs at least 2 samples, got {magnitude.size}")
    return float(np.trapezoid(magnitude, dx=1.0 / sample_rate))


def extract_features(
    clip: AudioClip,
    segment: Segment,
    demographics: Tuple[float, int],
    n_fft: int = DEFAULT_N_FFT,
    hop: int = DEFAULT_HOP,
) -> SwallowFeatures:
    """Slice one segment out of a clip and compute its full feature vector"""
    start, end = segment.sample_bounds(clip.sample_rate)
    if start < 0 or end > clip.n_samples:
        raise SegmentOutOfBounds(
            f"{clip.source_id}: segment {segment.start_s:.4f}-{segment.end_s:.4f}s outside clip of {clip.duration_s:.4f}s"
        )
    if end - start < 2:
        raise TooFewSamples(f"{clip.source_id}: segment spans {end - start} samples")

    window = clip.slice(start, end)
    spec = stft(window, n_fft=n_fft, hop=hop)
    mean_freq, median_freq = mean_median_frequency(spec)
    peak_amp, avg_amp = amplitude_stats(window.samples)
    age, gender = demographics
    return SwallowFeatures(
        top_freqs=top_k_frequencies(spec),
        mean_freq=mean_freq,
        median_freq=median_freq,
        peak_amp=peak_amp,
        avg_amp=avg_amp,
        auc=area_under_curve(window.samples, clip.sample_rate),
        duration_s=window.duration_s,
        age=age,
        gender=gender,
    )
