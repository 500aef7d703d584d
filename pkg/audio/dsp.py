"""
Numerical kernels: DFT, STFT, dB conversion and RMS envelopes
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import get_window

from errors import EmptySignal, InvalidWindow, NonPositiveReference

from .wav_io import AudioClip

# STFT defaults shared by feature extraction and the segmentation envelope
DEFAULT_N_FFT = 2048
DEFAULT_HOP = 512

DB_FLOOR = 1e-10


@dataclass(frozen=True)
class Spectrogram:
    """Magnitude STFT, shape [n_bins x n_frames]"""

    magnitudes: np.ndarray
    bin_freqs: np.ndarray
    frame_times: np.ndarray
    n_fft: int
    hop: int
    sample_rate: int

    @property
    def n_bins(self) -> int:
        return int(self.magnitudes.shape[0])

    @property
    def n_frames(self) -> int:
        return int(self.magnitudes.shape[1])


def naive_dft(signal) -> np.ndarray:
    """Direct O(N^2) evaluation of X[k] = sum_n x[n] exp(-2j pi k n / N)"""
    x = np.asarray(signal, dtype=np.complex128).reshape(-1)
    n = x.size
    if n == 0:
        raise EmptySignal("DFT of an empty signal")
    k = np.arange(n)
    # Reduce k*n mod N before scaling so large products keep full phase precision
    phase = (np.outer(k, k) % n) * (-2j * np.pi / n)
    return np.exp(phase) @ x


def dft(signal) -> np.ndarray:
    """Discrete Fourier transform; radix-2 FFT for power-of-two lengths, direct form otherwise"""
    x = np.asarray(signal, dtype=np.float64).reshape(-1)
    n = x.size
    if n == 0:
        raise EmptySignal("DFT of an empty signal")
    if n & (n - 1) == 0:
        return np.fft.fft(x)
    return naive_dft(x)


def _centered_frames(samples: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    """Frames centred on multiples of hop; 1 + len // hop frames"""
    n_frames = 1 + samples.size // hop
    left = frame_len // 2
    right = frame_len - left
    # Reflection needs more samples than the pad width; very short inputs are zero padded
    mode = "reflect" if samples.size > max(left, right) else "constant"
    padded = np.pad(samples, (left, right), mode=mode)
    return sliding_window_view(padded, frame_len)[::hop][:n_frames]


def stft(clip: AudioClip, n_fft: int = DEFAULT_N_FFT, hop: int = DEFAULT_HOP) -> Spectrogram:
    """Hann-windowed, centred short-time Fourier transform magnitudes"""
    if n_fft < 2 or hop < 1 or hop > n_fft:
        raise InvalidWindow(f"invalid STFT window n_fft={n_fft}, hop={hop}")

    frames = _centered_frames(clip.samples, n_fft, hop)
    window = get_window("hann", n_fft, fftbins=True)
    magnitudes = np.abs(np.fft.rfft(frames * window, axis=1)).T
    bin_freqs = np.arange(n_fft // 2 + 1) * clip.sample_rate / n_fft
    frame_times = np.arange(magnitudes.shape[1]) * hop / clip.sample_rate
    return Spectrogram(
        magnitudes=magnitudes,
        bin_freqs=bin_freqs,
        frame_times=frame_times,
        n_fft=n_fft,
        hop=hop,
        sample_rate=clip.sample_rate,
    )


def amplitude_to_db(magnitudes, reference: float = 1.0) -> np.ndarray:
    """20 log10(max(m, 1e-10) / reference)"""
    if not reference > 0:
        raise NonPositiveReference(f"dB reference must be positive, got {reference}")
    m = np.maximum(np.asarray(magnitudes, dtype=np.float64), DB_FLOOR)
    return 20.0 * np.log10(m / reference)


def frame_rms(
    clip: AudioClip, frame_len: int = DEFAULT_N_FFT, hop: int = DEFAULT_HOP
) -> Tuple[np.ndarray, np.ndarray]:
    """RMS of centred frames; returns (frame centre times in seconds, rms)"""
    if frame_len < 1 or hop < 1:
        raise InvalidWindow(f"invalid RMS window frame_len={frame_len}, hop={hop}")
    frames = _centered_frames(clip.samples, frame_len, hop)
    rms = np.sqrt(np.mean(frames ** 2, axis=1))
    times = np.arange(rms.size) * hop / clip.sample_rate
    return times, rms
