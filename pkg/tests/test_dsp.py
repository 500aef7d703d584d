import numpy as np
import pytest

from audio.dsp import amplitude_to_db, dft, frame_rms, naive_dft, stft
from audio.wav_io import AudioClip
from errors import EmptySignal, InvalidWindow, NonPositiveReference


def _oracle_dft(x):
    n = len(x)
    out = np.zeros(n, dtype=np.complex128)
    for k in range(n):
        for t in range(n):
            out[k] += x[t] * np.exp(-2j * np.pi * ((k * t) % n) / n)
    return out


def test_fft_matches_direct_definition(rng):
    sizes = [2, 4, 8, 16, 32, 64]
    for trial in range(500):
        n = sizes[trial % len(sizes)]
        x = rng.uniform(-1, 1, n)
        expected = naive_dft(x) if n > 16 else _oracle_dft(x)
        np.testing.assert_allclose(dft(x), expected, rtol=0, atol=1e-9)


def test_naive_path_for_other_lengths(rng):
    x = rng.standard_normal(12)
    np.testing.assert_allclose(dft(x), np.fft.fft(x), atol=1e-9)
    np.testing.assert_allclose(naive_dft(x), _oracle_dft(x), atol=1e-9)


def test_linearity_and_parseval(rng):
    x, y = rng.standard_normal(32), rng.standard_normal(32)
    np.testing.assert_allclose(dft(2.0 * x + y), 2.0 * dft(x) + dft(y), atol=1e-9)
    spectrum = dft(x)
    assert np.sum(np.abs(spectrum) ** 2) / 32 == pytest.approx(np.sum(x ** 2), rel=1e-12)


def test_empty_signal():
    with pytest.raises(EmptySignal):
        dft([])
    with pytest.raises(EmptySignal):
        naive_dft([])


def test_stft_shape_and_peak_bin():
    sr, n_fft, hop = 8000, 256, 64
    t = np.arange(sr) / sr
    clip = AudioClip(0.5 * np.sin(2 * np.pi * (10 * sr / n_fft) * t), sr)
    spec = stft(clip, n_fft=n_fft, hop=hop)
    assert spec.n_bins == n_fft // 2 + 1
    assert spec.n_frames == 1 + sr // hop
    assert spec.sample_rate == sr
    assert int(np.argmax(spec.magnitudes.mean(axis=1))) == 10
    assert spec.bin_freqs[10] == pytest.approx(312.5)


def test_stft_short_input_is_zero_padded():
    spec = stft(AudioClip(np.full(10, 0.1), 8000), n_fft=64, hop=16)
    assert spec.n_frames == 1
    assert np.all(np.isfinite(spec.magnitudes))


@pytest.mark.parametrize("n_fft,hop", [(1, 1), (64, 0), (64, 65)])
def test_stft_invalid_window(n_fft, hop):
    with pytest.raises(InvalidWindow):
        stft(AudioClip(np.zeros(100), 8000), n_fft=n_fft, hop=hop)


def test_amplitude_to_db():
    np.testing.assert_allclose(amplitude_to_db([1.0, 0.1, 0.0]), [0.0, -20.0, -200.0])
    np.testing.assert_allclose(amplitude_to_db([0.5], reference=0.5), [0.0])
    with pytest.raises(NonPositiveReference):
        amplitude_to_db([1.0], reference=0.0)


def test_frame_rms_of_constant_signal():
    times, rms = frame_rms(AudioClip(np.full(4096, 0.5), 16000), frame_len=512, hop=128)
    assert rms.size == 1 + 4096 // 128
    np.testing.assert_allclose(rms, 0.5)
    assert times[1] == pytest.approx(128 / 16000)


def test_stft_of_silence_is_exactly_zero():
    spec = stft(AudioClip(np.zeros(4000), 8000), n_fft=256, hop=64)
    assert np.all(spec.magnitudes == 0.0)


def test_stft_magnitudes_ignore_polarity(rng):
    samples = 0.8 * rng.uniform(-1, 1, 4000)
    spec = stft(AudioClip(samples, 8000), n_fft=256, hop=64)
    flipped = stft(AudioClip(-samples, 8000), n_fft=256, hop=64)
    np.testing.assert_array_equal(spec.magnitudes, flipped.magnitudes)
