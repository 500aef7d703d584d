"""
Patient-level aggregation of per-swallow predictions (mean-, max- and mode-risk)
"""

from enum import Enum
from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from errors import EmptyPredictionList

from .forest import Prediction


class Strategy(str, Enum):
    MEAN = "mean"
    MAX = "max"
    MODE = "mode"


class PatientScore(BaseModel):
    """Aggregated score; higher score means higher risk"""

    score: float = Field(..., ge=0.0, le=1.0, description="Real-valued risk used for AUC")
    predicted_class: int = Field(..., ge=0)
    class_scores: List[float] = Field(..., description="Per-class aggregate (probabilities or vote fractions)")


def _risks(probs: np.ndarray) -> np.ndarray:
    """P(class 1) for binary tasks, otherwise the probability of any non-normal class"""
    return probs[:, 1] if probs.shape[1] == 2 else 1.0 - probs[:, 0]


def aggregate_patient(preds: Sequence[Prediction], strategy: Strategy) -> PatientScore:
    """
    Collapse one patient's swallow predictions into a single score

    mean: average probability vector; max: the riskiest swallow; mode: majority vote over
    predicted classes (ties go to the higher-risk class), scored by the vote fraction
    oriented so that a higher value means higher risk.
    """
    if not preds:
        raise EmptyPredictionList("cannot aggregate zero predictions")
    strategy = Strategy(strategy)
    probs = np.array([p.class_probs for p in preds], dtype=np.float64)
    n_classes = probs.shape[1]

    if strategy is Strategy.MEAN:
        mean = probs.mean(axis=0)
        risks = _risks(probs)
        # Rounding in the mean must not lift it above the largest risk
        score = min(float(risks.mean()), float(risks.max()))
        return PatientScore(
            score=float(np.clip(score, 0.0, 1.0)),
            predicted_class=int(np.argmax(mean)),
            class_scores=mean.tolist(),
        )

    if strategy is Strategy.MAX:
        risks = _risks(probs)
        riskiest = int(np.argmax(risks))
        return PatientScore(
            score=float(np.clip(risks[riskiest], 0.0, 1.0)),
            predicted_class=preds[riskiest].predicted_class,
            class_scores=probs[riskiest].tolist(),
        )

    votes = np.bincount([p.predicted_class for p in preds], minlength=n_classes)
    # Highest index among the most-voted classes
    modal = int(np.flatnonzero(votes == votes.max())[-1])
    fraction = votes[modal] / len(preds)
    return PatientScore(
        score=float(fraction if modal != 0 else 1.0 - fraction),
        predicted_class=modal,
        class_scores=(votes / len(preds)).tolist(),
    )


class RiskReport(BaseModel):
    """Per-swallow probabilities and the three patient-level aggregates"""

    patient_id: str
    per_swallow: List[List[float]] = Field(..., description="Class probabilities per swallow")
    mean_risk: float
    max_risk: float
    mode_risk: int = Field(..., description="Modal predicted class")
    mode_score: float

    @model_validator(mode="after")
    def _mean_below_max(self) -> "RiskReport":
        if self.mean_risk > self.max_risk + 1e-12:
            raise ValueError("mean_risk cannot exceed max_risk")
        return self


def build_risk_report(patient_id: str, preds: Sequence[Prediction]) -> RiskReport:
    """Aggregate one patient's predictions under every strategy"""
    mean = aggregate_patient(preds, Strategy.MEAN)
    worst = aggregate_patient(preds, Strategy.MAX)
    mode = aggregate_patient(preds, Strategy.MODE)
    return RiskReport(
        patient_id=patient_id,
        per_swallow=[list(p.class_probs) for p in preds],
        mean_risk=mean.score,
        max_risk=worst.score,
        mode_risk=mode.predicted_class,
        mode_score=mode.score,
    )
