import struct

import numpy as np
import pytest

from audio.wav_io import AudioClip, load_wav, load_wav_file, write_wav, write_wav_file
from errors import EmptyAudio, MalformedContainer, SwallowSenseError, UnsupportedEncoding


def test_16bit_round_trip_is_exact(make_wav):
    ints = np.array([0, 1, -1, 16384, -32768, 32767], dtype="<i2")
    clip = load_wav(make_wav(ints.tobytes()))
    assert clip.sample_rate == 8000
    np.testing.assert_array_equal(clip.samples, ints / 32768.0)
    again = load_wav(write_wav(clip))
    np.testing.assert_array_equal(again.samples, clip.samples)


def test_8bit_is_unsigned(make_wav):
    clip = load_wav(make_wav(bytes([0, 128, 255]), bits=8))
    np.testing.assert_allclose(clip.samples, [-1.0, 0.0, 127 / 128])


def test_24bit_sign_extension(make_wav):
    payload = bytes([0xFF, 0xFF, 0xFF, 0x00, 0x00, 0x40, 0x00, 0x00, 0x80])
    clip = load_wav(make_wav(payload, bits=24))
    np.testing.assert_allclose(clip.samples, [-1 / 2 ** 23, 0.5, -1.0])


def test_32bit_pcm_scale(make_wav):
    payload = np.array([-(2 ** 31), 2 ** 30], dtype="<i4").tobytes()
    clip = load_wav(make_wav(payload, bits=32))
    np.testing.assert_allclose(clip.samples, [-1.0, 0.5])


def test_float_samples_are_clipped(make_wav):
    payload = np.array([1.5, -0.25, -3.0], dtype="<f4").tobytes()
    clip = load_wav(make_wav(payload, bits=32, audio_format=3))
    np.testing.assert_allclose(clip.samples, [1.0, -0.25, -1.0])


def test_float_nan_rejected(make_wav):
    payload = np.array([0.1, np.nan], dtype="<f8").tobytes()
    with pytest.raises(MalformedContainer):
        load_wav(make_wav(payload, bits=64, audio_format=3))


def test_stereo_is_averaged(make_wav):
    frames = np.array([[16384, 0], [-16384, -16384]], dtype="<i2")
    clip = load_wav(make_wav(frames.tobytes(), channels=2))
    np.testing.assert_allclose(clip.samples, [0.25, -0.5])


@pytest.mark.parametrize("channels", [2, 3, 4])
def test_identical_channels_match_mono(make_wav, rng, channels):
    mono = rng.integers(-32768, 32768, 64).astype("<i2")
    frames = np.repeat(mono[:, None], channels, axis=1)
    expected = load_wav(make_wav(mono.tobytes()))
    clip = load_wav(make_wav(frames.tobytes(), channels=channels))
    np.testing.assert_array_equal(clip.samples, expected.samples)


def test_unknown_chunks_and_pad_byte_are_skipped(make_wav):
    extra = b"LIST" + struct.pack("<I", 3) + b"abc" + b"\x00"
    clip = load_wav(make_wav(np.array([100, -100], dtype="<i2").tobytes(), extra_chunks=extra))
    assert clip.n_samples == 2


def test_partial_trailing_frame_dropped(make_wav):
    clip = load_wav(make_wav(np.array([1, 2, 3], dtype="<i2").tobytes() + b"\x01"))
    assert clip.n_samples == 3


@pytest.mark.parametrize("audio_format,bits", [(2, 16), (1, 12), (3, 16)])
def test_unsupported_encodings(make_wav, audio_format, bits):
    with pytest.raises(UnsupportedEncoding):
        load_wav(make_wav(b"\x00" * 8, bits=bits, audio_format=audio_format))


def test_structural_errors(make_wav):
    good = make_wav(np.zeros(4, dtype="<i2").tobytes())
    with pytest.raises(MalformedContainer):
        load_wav(b"RIFX" + good[4:])
    with pytest.raises(MalformedContainer):
        load_wav(good[:10])
    with pytest.raises(MalformedContainer):
        load_wav(good[:-2])
    no_data = good[:12] + good[12:36]
    with pytest.raises(MalformedContainer):
        load_wav(no_data)


def test_empty_data_chunk(make_wav):
    with pytest.raises(EmptyAudio):
        load_wav(make_wav(b""))


def test_clip_rejects_out_of_range_samples():
    with pytest.raises(ValueError):
        AudioClip(np.array([0.0, 1.5]), 8000)
    with pytest.raises(EmptyAudio):
        AudioClip(np.array([]), 8000)


def test_write_wav_header_fields():
    data = write_wav(AudioClip(np.zeros(4), 16000))
    assert data[:4] == b"RIFF" and data[8:12] == b"WAVE"
    assert struct.unpack("<I", data[24:28])[0] == 16000
    assert struct.unpack("<I", data[28:32])[0] == 32000
    assert data[36:40] == b"data"
    assert struct.unpack("<I", data[40:44])[0] == 8
    assert data[44:] == bytes(8)


def test_file_helpers(tmp_path):
    clip = AudioClip(np.linspace(-0.5, 0.5, 101), 16000, "ramp")
    path = write_wav_file(clip, tmp_path / "sub" / "ramp.wav")
    loaded = load_wav_file(path)
    assert loaded.source_id == str(path)
    np.testing.assert_allclose(loaded.samples, clip.samples, atol=1 / 32768)


def test_fuzzed_files_never_crash(make_wav):
    rng = np.random.default_rng(99)
    valid = make_wav((rng.standard_normal(200) * 8000).astype("<i2").tobytes(), sample_rate=16000)
    outcomes = {"clip": 0, "error": 0}
    for _ in range(10_000):
        data = bytearray(valid)
        action = rng.integers(3)
        if action == 0:
            data = data[:rng.integers(len(data))]
        elif action == 1:
            for pos in rng.integers(0, len(data), size=rng.integers(1, 8)):
                data[pos] = int(rng.integers(256))
        else:
            data = data[:rng.integers(len(data))]
            for pos in rng.integers(0, max(len(data), 1), size=rng.integers(1, 4)):
                if data:
                    data[pos] = int(rng.integers(256))
        try:
            clip = load_wav(bytes(data))
        except SwallowSenseError:
            outcomes["error"] += 1
        else:
            assert isinstance(clip, AudioClip)
            assert np.all(np.abs(clip.samples) <= 1.0)
            outcomes["clip"] += 1
    assert outcomes["clip"] > 0 and outcomes["error"] > 0
