"""
Shared fixtures: deterministic generators, tiny WAV builders and session-wide synthetic cohorts
"""

import struct

import numpy as np
import pytest

from audio.wav_io import AudioClip
from cohort.manifest import load_manifest
from cohort.synth import SynthConfig, generate_cohort, write_cohort
from segmentation.detector import default_params
from services.pipeline import SegmentationMode, build_swallow_table


def wav_bytes(payload: bytes, channels: int = 1, sample_rate: int = 8000, bits: int = 16, audio_format: int = 1,
              extra_chunks: bytes = b"") -> bytes:
    """Hand-built RIFF/WAVE file around a raw data payload"""
    block_align = channels * bits // 8
    fmt = struct.pack("<HHIIHH", audio_format, channels, sample_rate, sample_rate * block_align, block_align, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + extra_chunks
    body += b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", len(body)) + body


def sine_burst_clip(sample_rate: int = 16000, amplitude: float = 0.5, freq: float = 440.0) -> AudioClip:
    """1 s silence, 0.5 s tone, 1 s silence, 0.5 s tone, 1 s silence"""
    t = np.arange(int(0.5 * sample_rate)) / sample_rate
    tone = amplitude * np.sin(2 * np.pi * freq * t)
    silence = np.zeros(sample_rate)
    return AudioClip(np.concatenate([silence, tone, silence, tone, silence]), sample_rate, "bursts")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def make_wav():
    return wav_bytes


@pytest.fixture
def burst_clip():
    return sine_burst_clip()


@pytest.fixture(scope="session")
def cohort_dir(tmp_path_factory):
    """Default 40-patient strict-separability cohort, seed 7"""
    out = tmp_path_factory.mktemp("cohort")
    write_cohort(generate_cohort(SynthConfig()), out)
    return out


@pytest.fixture(scope="session")
def small_cohort_dir(tmp_path_factory):
    """12 patients with few swallows, for CLI and service runs"""
    out = tmp_path_factory.mktemp("small_cohort")
    write_cohort(generate_cohort(SynthConfig(n_patients=12, swallows_per_patient=(4, 6), seed=3)), out)
    return out


@pytest.fixture(scope="session")
def cohort_records(cohort_dir):
    return load_manifest(cohort_dir / "manifest.csv")


@pytest.fixture(scope="session")
def human_table(cohort_records):
    return build_swallow_table(cohort_records, SegmentationMode.HUMAN, default_params())
