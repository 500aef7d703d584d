"""
Error hierarchy for the SwallowSense toolkit
Input errors derive from SwallowSenseError; broken internal guarantees are AssertionErrors.
"""


class SwallowSenseError(Exception):
    """Base class for every recoverable input error"""


# Audio container parsing

class AudioError(SwallowSenseError):
    """WAV parsing / encoding failure"""


class MalformedContainer(AudioError):
    """Missing or truncated RIFF/WAVE structure"""


class UnsupportedEncoding(AudioError):
    """Compressed or otherwise unsupported sample format"""


class EmptyAudio(AudioError):
    """Data chunk holds zero frames"""


# Numerical kernels

class SignalError(SwallowSenseError):
    """Invalid input to a DSP kernel"""


class EmptySignal(SignalError):
    pass


class InvalidWindow(SignalError):
    pass


class NonPositiveReference(SignalError):
    pass


# Segmentation

class SegmentationError(SwallowSenseError):
    """Segmentation or segmentation scoring failure"""


class SegmentOutOfRange(SegmentationError):
    pass


class LengthMismatch(SegmentationError):
    pass


class EmptyGrid(SegmentationError):
    pass


# Features

class FeatureError(SwallowSenseError):
    """Feature extraction failure"""


class TooFewBins(FeatureError):
    pass


class EmptySpectrogram(FeatureError):
    pass


class EmptySegment(FeatureError):
    pass


class TooFewSamples(FeatureError):
    pass


class SegmentOutOfBounds(FeatureError):
    pass


class ExternalFeatureError(FeatureError):
    """External feature CSV could not be aligned to the swallow table"""


class MissingKey(ExternalFeatureError):
    pass


class DuplicateKey(ExternalFeatureError):
    pass


class NonNumericCell(ExternalFeatureError):
    pass


class HeaderMismatch(ExternalFeatureError):
    pass


# Manifest / cohort bookkeeping

class DatasetError(SwallowSenseError):
    """Manifest or split planning failure"""


class MissingColumn(DatasetError):
    pass


class InconsistentPatient(DatasetError):
    pass


class InvalidPAS(DatasetError):
    pass


class InvalidDemographics(DatasetError):
    pass


class ClassTooSmall(DatasetError):
    pass


class MissingAnnotation(DatasetError):
    pass


# Model

class ModelError(SwallowSenseError):
    """Training, prediction or metric failure"""


class DegenerateLabels(ModelError):
    pass


class DimensionMismatch(ModelError):
    pass


class EmptyPredictionList(ModelError):
    pass


class SingleClass(ModelError):
    pass


class NoPositives(ModelError):
    pass


class EmptyClass(ModelError):
    pass


class UnsupportedModelVersion(ModelError):
    pass


# Synthetic cohort

class SynthError(SwallowSenseError):
    pass


class InvalidConfig(SynthError):
    pass


# Hard assertions

class PatientLeakage(AssertionError):
    """A patient appears on both sides of a train/test split"""
