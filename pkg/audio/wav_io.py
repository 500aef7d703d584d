"""
RIFF/WAVE parsing and encoding
Decodes PCM (format 1) and IEEE float (format 3) into normalised mono clips.
"""

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from errors import EmptyAudio, MalformedContainer, UnsupportedEncoding

logger = logging.getLogger(__name__)

WAVE_FORMAT_PCM = 1
WAVE_FORMAT_IEEE_FLOAT = 3

PCM_BIT_DEPTHS = (8, 16, 24, 32)
FLOAT_BIT_DEPTHS = (32, 64)


@dataclass(frozen=True)
class AudioClip:
    """Normalised mono waveform; samples are read-only float64 in [-1, 1]"""

    samples: np.ndarray
    sample_rate: int
    source_id: str = ""

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64).reshape(-1)
        if samples.size == 0:
            raise EmptyAudio(f"{self.source_id or 'clip'} has no samples")
        if not np.all(np.isfinite(samples)) or np.any(np.abs(samples) > 1.0):
            raise ValueError("samples must be finite and lie in [-1.0, 1.0]")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def n_samples(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate

    def slice(self, start: int, end: int) -> "AudioClip":
        """Sub-clip of samples [start, end)"""
        return AudioClip(self.samples[start:end], self.sample_rate, self.source_id)


@dataclass
class _FormatChunk:
    audio_format: int
    channels: int
    sample_rate: int
    byte_rate: int
    block_align: int
    bits_per_sample: int


def _iter_chunks(data: bytes) -> Dict[bytes, bytes]:
    """Split the RIFF body into chunks; the first occurrence of each id wins"""
    if len(data) < 12:
        raise MalformedContainer("file shorter than the RIFF header")
    riff_id, _, wave_id = struct.unpack("<4sI4s", data[:12])
    if riff_id != b"RIFF" or wave_id != b"WAVE":
        raise MalformedContainer("missing RIFF/WAVE signature")

    # Some writers leave riff_size stale; parse what is actually present
    end = len(data)
    chunks: Dict[bytes, bytes] = {}
    offset = 12
    while offset + 8 <= end:
        chunk_id, chunk_size = struct.unpack("<4sI", data[offset:offset + 8])
        body_start = offset + 8
        body_end = body_start + chunk_size
        if body_end > end:
            raise MalformedContainer(
                f"chunk {chunk_id!r} declares {chunk_size} bytes, only {end - body_start} present"
            )
        chunks.setdefault(chunk_id, data[body_start:body_end])
        offset = body_end + (chunk_size & 1)
    return chunks


def _parse_fmt(body: bytes) -> _FormatChunk:
    if len(body) < 16:
        raise MalformedContainer(f"fmt chunk is {len(body)} bytes, need at least 16")
    fmt = _FormatChunk(*struct.unpack("<HHIIHH", body[:16]))
    if fmt.audio_format not in (WAVE_FORMAT_PCM, WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedEncoding(f"format code {fmt.audio_format} is not PCM or IEEE float")
    allowed = PCM_BIT_DEPTHS if fmt.audio_format == WAVE_FORMAT_PCM else FLOAT_BIT_DEPTHS
    if fmt.bits_per_sample not in allowed:
        raise UnsupportedEncoding(
            f"{fmt.bits_per_sample}-bit samples unsupported for format {fmt.audio_format}"
        )
    if fmt.channels < 1:
        raise MalformedContainer("fmt chunk declares zero channels")
    if fmt.sample_rate < 1:
        raise MalformedContainer("fmt chunk declares a zero sample rate")
    if fmt.block_align != fmt.channels * fmt.bits_per_sample // 8:
        raise MalformedContainer(
            f"block_align {fmt.block_align} inconsistent with {fmt.channels}ch x {fmt.bits_per_sample}bit"
        )
    return fmt


def _decode_samples(raw: bytes, fmt: _FormatChunk) -> np.ndarray:
    """Decode interleaved frames to float64 in [-1, 1], shape (frames, channels)"""
    width = fmt.bits_per_sample // 8
    if fmt.audio_format == WAVE_FORMAT_IEEE_FLOAT:
        values = np.frombuffer(raw, dtype="<f4" if width == 4 else "<f8").astype(np.float64)
        if not np.all(np.isfinite(values)):
            raise MalformedContainer("float data contains non-finite samples")
        values = np.clip(values, -1.0, 1.0)
    elif width == 1:
        values = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif width == 2:
        values = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    elif width == 3:
        triples = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        ints = triples[:, 0] | (triples[:, 1] << 8) | (triples[:, 2] << 16)
        ints = np.where(ints & 0x800000, ints - (1 << 24), ints)
        values = ints.astype(np.float64) / float(1 << 23)
    else:
        values = np.frombuffer(raw, dtype="<i4").astype(np.float64) / float(1 << 31)
    return values.reshape(-1, fmt.channels)


def load_wav(data: bytes, source_id: str = "") -> AudioClip:
    """Parse a RIFF/WAVE byte string into a normalised mono AudioClip"""
    chunks = _iter_chunks(bytes(data))
    if b"fmt " not in chunks:
        raise MalformedContainer("missing fmt chunk")
    if b"data" not in chunks:
        raise MalformedContainer("missing data chunk")

    fmt = _parse_fmt(chunks[b"fmt "])
    raw = chunks[b"data"]
    n_frames = len(raw) // fmt.block_align
    if n_frames == 0:
        raise EmptyAudio(f"{source_id or 'input'} contains zero frames")
    if len(raw) % fmt.block_align:
        logger.warning(
            f"{source_id or 'input'}: dropping {len(raw) % fmt.block_align} trailing bytes of a partial frame"
        )
        raw = raw[:n_frames * fmt.block_align]

    frames = _decode_samples(raw, fmt)
    mono = frames[:, 0] if fmt.channels == 1 else frames.mean(axis=1)
    return AudioClip(mono, fmt.sample_rate, source_id)


def write_wav(clip: AudioClip) -> bytes:
    """Encode a clip as 16-bit PCM mono RIFF/WAVE"""
    pcm = np.clip(np.rint(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    payload = pcm.tobytes()
    block_align = 2
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, WAVE_FORMAT_PCM, 1, clip.sample_rate,
        clip.sample_rate * block_align, block_align, 16,
        b"data", len(payload),
    )
    return header + payload


def load_wav_file(path: Union[str, Path], source_id: Optional[str] = None) -> AudioClip:
    """Read a WAV file from disk"""
    path = Path(path)
    return load_wav(path.read_bytes(), source_id if source_id is not None else str(path))


def write_wav_file(clip: AudioClip, path: Union[str, Path]) -> Path:
    """Write a clip as a 16-bit PCM WAV file"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(write_wav(clip))
    return path

