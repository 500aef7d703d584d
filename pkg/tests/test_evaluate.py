import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from cohort import LabelScheme, Split, SplitPlan, load_manifest
from cohort.synth import ABNORMAL, NORMAL, ClassProfile, SynthConfig, generate_cohort, write_cohort
from errors import PatientLeakage
from model import ForestConfig, Strategy
from segmentation import default_params
from services.pipeline import SegmentationMode, build_swallow_table
from tools.base import dump_report
from tools.evaluate_tools import EvaluateParams, EvaluateTool, run_evaluation, summarise
from tools.report_tools import ReportParams, ReportTool

pytestmark = pytest.mark.slow


def _evaluate(manifest, **overrides):
    values = {"manifest": str(manifest), "n_trees": 30, "n_splits": 5, "seed": 1, "n_jobs": 1}
    values.update(overrides)
    return EvaluateTool().execute(EvaluateParams(**values))


def test_human_segmentation_separates_strict_cohort(cohort_dir):
    report = _evaluate(cohort_dir / "manifest.csv")
    assert len(report["splits"]) == 5
    headline = report["summary"]["headline"]
    assert headline["aggregate"] == "mean"
    assert headline["metrics"]["auc_roc"]["mean"] >= 0.95
    assert headline["metrics"]["balanced_accuracy"]["mean"] >= 0.85
    assert report["summary"]["swallow_level"]["auc_roc"]["mean"] >= 0.95
    for split in report["splits"]:
        assert split["unscored_test_patients"] == []
        assert set(split["patient_level"]) == {"mean", "max", "mode"}
    assert report["provenance"]["seed"] == 1
    assert "clinical_reference" in report["provenance"]


def test_fixed_segmentation_degrades_gracefully(cohort_dir):
    human = _evaluate(cohort_dir / "manifest.csv")
    fixed = _evaluate(cohort_dir / "manifest.csv", mode="fixed", aggregate="max")
    assert fixed["summary"]["headline"]["aggregate"] == "max"
    human_auc = human["summary"]["patient_level"]["max"]["auc_roc"]["mean"]
    fixed_auc = fixed["summary"]["headline"]["metrics"]["auc_roc"]["mean"]
    assert human_auc - fixed_auc < 0.10
    human_mean = human["summary"]["patient_level"]["mean"]["auc_roc"]["mean"]
    fixed_mean = fixed["summary"]["patient_level"]["mean"]["auc_roc"]["mean"]
    assert human_mean - fixed_mean < 0.10


def test_auc_rises_as_abnormal_swallows_weaken(tmp_path):
    # classes share pitch and length so only amplitude separates them
    normal = ClassProfile(amplitude=(0.5, 0.9), dominant_freq=(500.0, 800.0), duration=(0.5, 0.78), noise_floor=0.003)
    aucs = []
    for scale in (1.0, 0.5, 0.25):
        abnormal = normal.model_copy(update={"amplitude": (0.35 * scale, 0.7 * scale), "noise_floor": 0.0008})
        cfg = SynthConfig(
            n_patients=20,
            separability="overlap",
            class_profiles={NORMAL: normal, ABNORMAL: abnormal},
            seed=11,
        )
        manifest = write_cohort(generate_cohort(cfg), tmp_path / f"scale_{scale}")
        report = _evaluate(manifest, n_trees=30, n_splits=3)
        aucs.append(report["summary"]["headline"]["metrics"]["auc_roc"]["mean"])
    assert aucs[0] <= aucs[1] <= aucs[2]
    assert aucs[2] >= 0.95


def test_reports_are_byte_identical(small_cohort_dir, tmp_path):
    manifest = small_cohort_dir / "manifest.csv"
    out = tmp_path / "metrics.json"
    first = _evaluate(manifest, n_trees=10, n_splits=2, out=str(out))
    written = out.read_bytes()
    second = _evaluate(manifest, n_trees=10, n_splits=2, out=str(out))
    parallel = _evaluate(manifest, n_trees=10, n_splits=2, n_jobs=4, out=str(out))
    assert dump_report(first) == dump_report(second) == dump_report(parallel)
    assert out.read_bytes() == written


def test_severity_scheme_runs(cohort_dir):
    report = _evaluate(cohort_dir / "manifest.csv", label_scheme="severity", n_splits=1, n_trees=10)
    assert report["config"]["label_scheme"] == "severity"
    assert len(report["splits"]) == 1
    mean_metrics = report["splits"][0]["patient_level"]["mean"]
    assert mean_metrics is None or 0.0 <= mean_metrics["auc_roc"] <= 1.0


def test_importance_ranking(small_cohort_dir):
    report = _evaluate(small_cohort_dir / "manifest.csv", n_trees=10, n_splits=1, importance=2)
    ranked = report["importance"]
    assert {entry["feature"] for entry in ranked} == set(report["feature_names"])
    drops = [entry["drop"] for entry in ranked]
    assert drops == sorted(drops, reverse=True)


def test_external_and_combined_feature_sets(small_cohort_dir, tmp_path):
    manifest = small_cohort_dir / "manifest.csv"
    base = _evaluate(manifest, n_trees=5, n_splits=1)
    assert len(base["feature_names"]) == 13

    table = build_swallow_table(load_manifest(manifest), SegmentationMode.HUMAN, default_params())
    frame = pd.DataFrame({
        "source_id": table.source_ids,
        "segment_index": table.segment_indices,
        "emb_0": table.X[:, 8],
        "emb_1": np.arange(table.n_rows, dtype=float),
    })
    path = tmp_path / "external.csv"
    frame.iloc[::-1].to_csv(path, index=False)

    external = _evaluate(manifest, n_trees=5, n_splits=1, feature_set="external", external_features=str(path))
    assert external["feature_names"] == ["emb_0", "emb_1"]
    combined = _evaluate(manifest, n_trees=5, n_splits=1, feature_set="combined", external_features=str(path))
    assert combined["feature_names"] == [*base["feature_names"], "emb_0", "emb_1"]


def test_external_feature_set_needs_a_file(small_cohort_dir):
    with pytest.raises(ValidationError):
        EvaluateParams(manifest=str(small_cohort_dir / "manifest.csv"), feature_set="external")


def test_leaking_plan_aborts(cohort_records, human_table):
    patient = cohort_records[0].patient_id
    plan = SplitPlan(n_splits=1, test_fraction=0.2, seed=0, splits=[Split(train=[patient], test=[patient])])
    with pytest.raises(PatientLeakage):
        run_evaluation(human_table, cohort_records, LabelScheme.ABNORMALITY, plan, ForestConfig(n_trees=2))


def test_single_class_test_side_reports_no_metrics(cohort_records, human_table):
    scheme = LabelScheme.ABNORMALITY
    normal = [r.patient_id for r in cohort_records if scheme.label(r.pas) == 0]
    abnormal = [r.patient_id for r in cohort_records if scheme.label(r.pas) == 1]
    plan = SplitPlan(
        n_splits=1, test_fraction=0.2, seed=0,
        splits=[Split(train=sorted(normal[1:] + abnormal), test=[normal[0]])],
    )
    results = run_evaluation(human_table, cohort_records, scheme, plan, ForestConfig(n_trees=5), Strategy.MAX)
    assert results["splits"][0]["patient_level"]["max"] is None
    assert results["summary"]["headline"]["metrics"] is None


def test_summary_uses_population_std():
    entries = [
        {"auc_roc": 1.0, "auc_prc": 1.0, "balanced_accuracy": 1.0},
        {"auc_roc": 0.5, "auc_prc": 0.5, "balanced_accuracy": 0.5},
        None,
    ]
    summary = summarise(entries)
    assert summary["n_splits"] == 2
    assert summary["auc_roc"] == {"mean": 0.75, "std": 0.25}
    assert summarise([None]) is None


def test_report_table(small_cohort_dir, tmp_path):
    params = ReportParams(
        manifest=str(small_cohort_dir / "manifest.csv"), out=str(tmp_path / "report"),
        n_trees=5, n_splits=2, seed=3, n_jobs=1,
    )
    report = ReportTool().execute(params)
    assert [row["mode"] for row in report["rows"]] == ["human", "fixed", "sliding"]
    assert report["skipped_modes"] == []
    lines = report["text"].splitlines()
    assert lines[0].split() == ["segmentation", "mean", "max", "mode"]
    assert [line.split()[0] for line in lines[1:]] == ["human", "fixed", "sliding"]
    assert "±" in report["text"]
    assert (tmp_path / "report" / "report.txt").read_text(encoding="utf-8") == report["text"]
    assert (tmp_path / "report" / "report.json").exists()


def test_report_skips_human_mode_without_annotations(small_cohort_dir, tmp_path):
    manifest = pd.read_csv(small_cohort_dir / "manifest.csv")
    manifest["wav_path"] = [str(small_cohort_dir / p) for p in manifest["wav_path"]]
    manifest = manifest.drop(columns=["annotation_path"])
    path = tmp_path / "manifest.csv"
    manifest.to_csv(path, index=False)
    report = ReportTool().execute(ReportParams(
        manifest=str(path), modes=["human", "fixed"], n_trees=5, n_splits=1, seed=0, n_jobs=1,
    ))
    assert [row["mode"] for row in report["rows"]] == ["fixed"]
    assert report["skipped_modes"][0]["mode"] == "human"
