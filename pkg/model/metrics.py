"""
Ranking and classification metrics
"""

from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy.stats import rankdata

from errors import EmptyClass, NoPositives, SingleClass


class EvalMetrics(BaseModel):
    auc_roc: float = Field(..., ge=0.0, le=1.0)
    auc_prc: float = Field(..., ge=0.0, le=1.0)
    balanced_accuracy: float = Field(..., ge=0.0, le=1.0)


def _binary(labels) -> np.ndarray:
    return np.asarray(labels).reshape(-1).astype(bool)


def auc_roc(scores, labels) -> float:
    """P(score_pos > score_neg) + 0.5 P(tie), via the Mann-Whitney rank sum"""
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = _binary(labels)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUC-ROC needs both positive and negative labels")
    ranks = rankdata(s, method="average")
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def auc_prc(scores, labels) -> float:
    """Average precision: sum over descending thresholds of (R_i - R_{i-1}) * P_i"""
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = _binary(labels)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise NoPositives("AUC-PRC needs at least one positive label")

    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    # Last index of every block of tied scores
    cut = np.r_[np.flatnonzero(np.diff(s)), s.size - 1]
    tps = np.cumsum(y)[cut]
    precision = tps / (cut + 1)
    recall = tps / n_pos
    return float(np.sum(np.diff(recall, prepend=0.0) * precision))


def balanced_accuracy(pred_classes, labels, classes: Optional[Sequence[int]] = None) -> float:
    """Mean per-class recall over the classes present in labels (or the given classes)"""
    pred = np.asarray(pred_classes).reshape(-1)
    true = np.asarray(labels).reshape(-1)
    if classes is None:
        classes = np.unique(true).tolist()
    if len(classes) == 0:
        raise EmptyClass("balanced accuracy of an empty label set")
    recalls = []
    for c in classes:
        members = true == c
        if not members.any():
            raise EmptyClass(f"class {c} has no labelled samples")
        recalls.append(float(np.mean(pred[members] == c)))
    return float(np.mean(recalls))


def multiclass_auc(scores, labels) -> float:
    """Macro one-vs-rest AUC-ROC over the classes present"""
    probs = np.asarray(scores, dtype=np.float64)
    true = np.asarray(labels).reshape(-1)
    present = np.unique(true)
    if present.size < 2:
        raise SingleClass("multi-class AUC needs at least two classes present")
    return float(np.mean([auc_roc(probs[:, c], true == c) for c in present]))


def multiclass_auc_prc(scores, labels) -> float:
    """Macro one-vs-rest average precision over the classes present"""
    probs = np.asarray(scores, dtype=np.float64)
    true = np.asarray(labels).reshape(-1)
    present = np.unique(true)
    if present.size < 2:
        raise SingleClass("multi-class AUC-PRC needs at least two classes present")
    return float(np.mean([auc_prc(probs[:, c], true == c) for c in present]))
