"""
Classification, aggregation and evaluation
"""

from .rng import SplitMix64, derive_seed
from .forest import Forest, ForestConfig, Prediction, predict_proba, train_forest
from .aggregation import PatientScore, RiskReport, Strategy, aggregate_patient, build_risk_report
from .metrics import (
    EvalMetrics,
    auc_prc,
    auc_roc,
    balanced_accuracy,
    multiclass_auc,
    multiclass_auc_prc,
)
from .importance import permutation_importance
from .serialization import load_forest, save_forest
