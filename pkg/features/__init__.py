"""
Swallow feature extraction
"""

from .extractor import (
    FEATURE_NAMES,
    GENDER_CODES,
    SwallowFeatures,
    amplitude_stats,
    area_under_curve,
    extract_features,
    mean_median_frequency,
    top_k_frequencies,
)
from .external import import_external_features
