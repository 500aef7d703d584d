"""
Evaluate tool: repeated patient-level train/test evaluation
For every split a forest is trained on the training patients' swallows, the test swallows are
scored, and predictions are aggregated per patient under every strategy.
"""

import logging
from typing import Any, Dict, List, Literal, Mapping, Optional, Sequence

import numpy as np
from pydantic import Field, model_validator

from cohort.manifest import LabelScheme, PatientRecord, load_manifest
from cohort.splits import SplitPlan, assert_no_leakage, load_split_plan, make_splits
from errors import DatasetError, EmptyClass, NoPositives, SingleClass
from features.external import import_external_features
from model.aggregation import Strategy, aggregate_patient
from model.forest import ForestConfig, Prediction, train_forest
from model.importance import auc_metric, permutation_importance
from model.metrics import (
    EvalMetrics,
    auc_prc,
    auc_roc,
    balanced_accuracy,
    multiclass_auc,
    multiclass_auc_prc,
)
from model.rng import derive_seed
from services.pipeline import SegmentationMode, SwallowTable, pipeline
from settings import get_settings

from .base import ForestOptions, SegmentationOptions, Tool, write_report

logger = logging.getLogger(__name__)

FeatureSet = Literal["domain", "external", "combined"]

METRIC_NAMES = ("auc_roc", "auc_prc", "balanced_accuracy")

# Figures measured on the private clinical cohort; carried in reports as context only
CLINICAL_REFERENCE = {
    "abnormality_swallow_auc_roc_human_segmentation": "0.904 ± 0.015",
    "abnormality_patient_auc_roc_fixed_segmentation_max_risk": "0.942 ± 0.051",
    "fixed_segmentation_iou": 0.4775,
    "fixed_segmentation_sensitivity": 0.658,
    "fixed_segmentation_specificity": 0.876,
}


class EvaluateParams(SegmentationOptions, ForestOptions):
    """Evaluate command parameters"""

    manifest: str = Field(..., description="Manifest CSV")
    out: Optional[str] = Field(default=None, description="Metrics report JSON path")
    label_scheme: LabelScheme = Field(default=LabelScheme.ABNORMALITY)
    mode: SegmentationMode = Field(default=SegmentationMode.HUMAN)
    aggregate: Strategy = Field(default=Strategy.MEAN, description="Strategy for the headline metrics")
    n_splits: int = Field(default=5, ge=1)
    test_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    seed: int = Field(default=0)
    feature_set: FeatureSet = Field(default="domain")
    external_features: Optional[str] = Field(default=None, description="CSV keyed by source_id,segment_index")
    split_plan: Optional[str] = Field(default=None, description="Stored SplitPlan JSON to reuse")
    importance: int = Field(default=0, ge=0, description="Permutation repeats per feature, 0 disables")
    n_jobs: Optional[int] = Field(default=None)

    @model_validator(mode="after")
    def _external_source(self) -> "EvaluateParams":
        if self.feature_set != "domain" and not self.external_features:
            raise ValueError(f"feature_set {self.feature_set!r} needs external_features")
        return self


def select_features(table: SwallowTable, feature_set: FeatureSet, external_path: Optional[str]) -> SwallowTable:
    """Domain columns, imported external columns, or both side by side"""
    if feature_set == "domain":
        return table
    external, columns = import_external_features(external_path, table.keys())
    if feature_set == "external":
        return table.with_columns(external, columns)
    return table.with_columns(np.hstack([table.X, external]), [*table.feature_names, *columns])


def level_metrics(
    scores: np.ndarray,
    class_scores: np.ndarray,
    predicted: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
) -> Optional[Dict[str, float]]:
    """AUC-ROC, AUC-PRC and balanced accuracy, or None when the labels cannot support them"""
    try:
        if n_classes == 2:
            auc, prc = auc_roc(scores, labels == 1), auc_prc(scores, labels == 1)
        else:
            auc, prc = multiclass_auc(class_scores, labels), multiclass_auc_prc(class_scores, labels)
        bacc = balanced_accuracy(predicted, labels)
    except (SingleClass, NoPositives, EmptyClass) as exc:
        logger.warning(f"metrics unavailable: {exc}")
        return None
    return EvalMetrics(auc_roc=auc, auc_prc=prc, balanced_accuracy=bacc).model_dump()


def summarise(entries: Sequence[Optional[Dict[str, float]]]) -> Optional[Dict[str, Any]]:
    """Mean and population std per metric over the splits that produced metrics"""
    valid = [e for e in entries if e is not None]
    if not valid:
        return None
    summary: Dict[str, Any] = {"n_splits": len(valid)}
    for name in METRIC_NAMES:
        values = np.array([e[name] for e in valid])
        summary[name] = {"mean": float(values.mean()), "std": float(values.std())}
    return summary


def evaluate_split(
    table: SwallowTable,
    labels: Mapping[str, int],
    train: Sequence[str],
    test: Sequence[str],
    cfg: ForestConfig,
    n_classes: int,
    split_index: int,
    importance_repeats: int = 0,
) -> Dict[str, Any]:
    """Train on one split's training patients and score its test patients"""
    train_mask = table.rows_for(train)
    test_mask = table.rows_for(test)
    y = np.array([labels[p] for p in table.patient_ids], dtype=np.int64)

    split_cfg = cfg.model_copy(update={"seed": derive_seed(cfg.seed, split_index)})
    forest = train_forest(table.X[train_mask], y[train_mask], split_cfg, n_classes=n_classes)
    X_test, y_test = table.X[test_mask], y[test_mask]
    probs = forest.predict_proba_matrix(X_test) if X_test.shape[0] else np.empty((0, n_classes))

    risks = probs[:, 1] if n_classes == 2 else 1.0 - probs[:, 0]
    swallow = level_metrics(risks, probs, np.argmax(probs, axis=1), y_test, n_classes)

    test_ids = [p for p, keep in zip(table.patient_ids, test_mask) if keep]
    by_patient: Dict[str, List[Prediction]] = {}
    for patient_id, row in zip(test_ids, probs):
        by_patient.setdefault(patient_id, []).append(Prediction(tuple(float(v) for v in row)))
    scored = sorted(by_patient)
    unscored = sorted(set(test) - set(scored))
    if unscored:
        logger.warning(f"split {split_index}: test patients without swallows {unscored}")

    patient_labels = np.array([labels[p] for p in scored], dtype=np.int64)
    patient: Dict[str, Any] = {}
    for strategy in Strategy:
        aggregates = [aggregate_patient(by_patient[p], strategy) for p in scored]
        patient[strategy.value] = level_metrics(
            np.array([a.score for a in aggregates]),
            np.array([a.class_scores for a in aggregates]),
            np.array([a.predicted_class for a in aggregates]),
            patient_labels,
            n_classes,
        ) if aggregates else None

    importance = None
    if importance_repeats > 0:
        try:
            ranked = permutation_importance(
                forest, X_test, y_test, metric=auc_metric, n_repeats=importance_repeats,
                seed=derive_seed(cfg.seed, split_index), feature_names=table.feature_names,
            )
            importance = [{"feature": name, "drop": drop} for name, drop in ranked]
        except (SingleClass, NoPositives) as exc:
            logger.warning(f"split {split_index}: importance unavailable: {exc}")

    return {
        "index": split_index,
        "n_train_patients": len(train),
        "n_test_patients": len(test),
        "n_train_swallows": int(train_mask.sum()),
        "n_test_swallows": int(test_mask.sum()),
        "unscored_test_patients": unscored,
        "swallow_level": swallow,
        "patient_level": patient,
        "importance": importance,
    }


def mean_importance(splits: Sequence[Dict[str, Any]], feature_names: Sequence[str]) -> Optional[List[Dict[str, Any]]]:
    """Per-feature drop averaged over splits, descending, ties by column order"""
    drops: Dict[str, List[float]] = {}
    for split in splits:
        for entry in split["importance"] or []:
            drops.setdefault(entry["feature"], []).append(entry["drop"])
    if not drops:
        return None
    position = {name: i for i, name in enumerate(feature_names)}
    ranked = sorted(drops, key=lambda name: (-float(np.mean(drops[name])), position[name]))
    return [{"feature": name, "drop": float(np.mean(drops[name]))} for name in ranked]


def run_evaluation(
    table: SwallowTable,
    records: Sequence[PatientRecord],
    scheme: LabelScheme,
    plan: SplitPlan,
    cfg: ForestConfig,
    aggregate: Strategy = Strategy.MEAN,
    importance_repeats: int = 0,
) -> Dict[str, Any]:
    """Every split of the plan plus mean and std summaries; aborts on patient leakage"""
    assert_no_leakage(plan)
    labels = {r.patient_id: scheme.label(r.pas) for r in records}
    n_classes = len(scheme.classes)

    splits = []
    for index, split in enumerate(plan.splits):
        splits.append(evaluate_split(table, labels, split.train, split.test, cfg, n_classes, index, importance_repeats))
        logger.info(f"split {index + 1}/{len(plan.splits)} done")

    patient_summary = {
        strategy.value: summarise([s["patient_level"][strategy.value] for s in splits])
        for strategy in Strategy
    }
    return {
        "splits": splits,
        "summary": {
            "swallow_level": summarise([s["swallow_level"] for s in splits]),
            "patient_level": patient_summary,
            "headline": {"aggregate": Strategy(aggregate).value, "metrics": patient_summary[Strategy(aggregate).value]},
        },
        "importance": mean_importance(splits, table.feature_names) if importance_repeats > 0 else None,
    }


def patient_swallow_counts(table: SwallowTable) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for patient_id in table.patient_ids:
        counts[patient_id] = counts.get(patient_id, 0) + 1
    return counts


def resolve_plan(
    records: Sequence[PatientRecord],
    scheme: LabelScheme,
    table: SwallowTable,
    n_splits: int,
    test_fraction: float,
    seed: int,
    plan_path: Optional[str] = None,
) -> SplitPlan:
    """Stored plan when given (its patients must exist in the manifest), else a fresh stratified one"""
    if plan_path is None:
        return make_splits(records, scheme, n_splits, test_fraction, seed, patient_swallow_counts(table))
    plan = load_split_plan(plan_path)
    known = {r.patient_id for r in records}
    for split in plan.splits:
        unknown = sorted((set(split.train) | set(split.test)) - known)
        if unknown:
            raise DatasetError(f"{plan_path}: patients not in the manifest {unknown}")
    return plan


def provenance(params: Dict[str, Any], seed: int) -> Dict[str, Any]:
    return {
        "resolved_config": params,
        "seed": seed,
        "clinical_reference": CLINICAL_REFERENCE,
        "note": "clinical_reference values come from a private clinical cohort; they are context, not targets of this run",
    }


class EvaluateTool(Tool):
    name = "evaluate"
    description = "Patient-level repeated train/test evaluation with mean, max and mode aggregation"

    def execute(self, params: EvaluateParams) -> Dict[str, Any]:
        n_jobs = params.n_jobs if params.n_jobs is not None else get_settings().n_jobs
        records = load_manifest(params.manifest, defaults=params.segmentation_params())
        table = pipeline.table(records, params.mode, params.segmentation_params(), n_jobs=n_jobs)
        table = select_features(table, params.feature_set, params.external_features)

        plan = resolve_plan(
            records, params.label_scheme, table, params.n_splits, params.test_fraction, params.seed, params.split_plan
        )
        cfg = params.forest_config(seed=params.seed, n_jobs=n_jobs)
        results = run_evaluation(table, records, params.label_scheme, plan, cfg, params.aggregate, params.importance)

        config = params.model_dump(mode="json", exclude={"n_jobs"})
        report = {
            "command": self.name,
            "config": config,
            "feature_names": table.feature_names,
            "split_plan": plan.model_dump(),
            **results,
            "provenance": provenance(config, params.seed),
        }
        if params.out:
            write_report(report, params.out)
        headline = results["summary"]["headline"]["metrics"]
        if headline:
            logger.info(
                f"{params.aggregate.value} aggregation: patient AUC-ROC {headline['auc_roc']['mean']:.4f} "
                f"± {headline['auc_roc']['std']:.4f}"
            )
        return report
