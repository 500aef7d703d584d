"""
Audio container I/O and numerical kernels
"""

from .wav_io import AudioClip, load_wav, load_wav_file, write_wav, write_wav_file
from .dsp import Spectrogram, amplitude_to_db, dft, frame_rms, naive_dft, stft
