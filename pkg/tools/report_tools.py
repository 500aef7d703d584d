"""
Report tool: segmentation mode x aggregation table of patient-level AUC-ROC
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import Field

from cohort.manifest import LabelScheme, load_manifest
from model.aggregation import Strategy
from services.pipeline import SegmentationMode, SwallowTable, pipeline
from settings import get_settings

from .base import ForestOptions, SegmentationOptions, Tool, write_report
from .evaluate_tools import provenance, resolve_plan, run_evaluation

logger = logging.getLogger(__name__)


class ReportParams(SegmentationOptions, ForestOptions):
    """Report command parameters"""

    manifest: str = Field(..., description="Manifest CSV")
    out: Optional[str] = Field(default=None, description="Directory for report.json and report.txt")
    label_scheme: LabelScheme = Field(default=LabelScheme.ABNORMALITY)
    modes: List[SegmentationMode] = Field(default_factory=lambda: list(SegmentationMode))
    n_splits: int = Field(default=5, ge=1)
    test_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    seed: int = Field(default=0)
    n_jobs: Optional[int] = Field(default=None)


def _cell(metrics: Optional[Dict[str, Any]]) -> str:
    if not metrics:
        return "n/a"
    return f"{metrics['auc_roc']['mean']:.3f} ± {metrics['auc_roc']['std']:.3f}"


def render_table(rows: List[Dict[str, Any]]) -> str:
    """Plain-text table, one row per segmentation mode, one column per aggregation"""
    frame = pd.DataFrame(
        [{"segmentation": row["mode"], **{s.value: _cell(row["patient_level"][s.value]) for s in Strategy}} for row in rows],
        columns=["segmentation", *(s.value for s in Strategy)],
    )
    return frame.to_string(index=False) + "\n"


class ReportTool(Tool):
    name = "report"
    description = "Evaluate every segmentation mode on one shared split plan and tabulate patient AUC-ROC"

    def execute(self, params: ReportParams) -> Dict[str, Any]:
        n_jobs = params.n_jobs if params.n_jobs is not None else get_settings().n_jobs
        records = load_manifest(params.manifest, defaults=params.segmentation_params())

        tables: Dict[SegmentationMode, SwallowTable] = {}
        skipped: List[Dict[str, str]] = []
        for mode in params.modes:
            if mode is SegmentationMode.HUMAN and any(
                rec.annotation_path is None or not Path(rec.annotation_path).exists()
                for record in records for rec in record.recordings
            ):
                skipped.append({"mode": mode.value, "reason": "not every recording is annotated"})
                continue
            tables[mode] = pipeline.table(records, mode, params.segmentation_params(), n_jobs=n_jobs)

        rows: List[Dict[str, Any]] = []
        plan = None
        if tables:
            # One plan for every mode, balanced on the first available mode's swallow counts
            plan = resolve_plan(
                records, params.label_scheme, next(iter(tables.values())),
                params.n_splits, params.test_fraction, params.seed,
            )
            cfg = params.forest_config(seed=params.seed, n_jobs=n_jobs)
            for mode, table in tables.items():
                results = run_evaluation(table, records, params.label_scheme, plan, cfg)
                rows.append({"mode": mode.value, "patient_level": results["summary"]["patient_level"]})

        text = render_table(rows)
        config = params.model_dump(mode="json", exclude={"n_jobs"})
        report = {
            "command": self.name,
            "config": config,
            "split_plan": plan.model_dump() if plan else None,
            "rows": rows,
            "skipped_modes": skipped,
            "provenance": provenance(config, params.seed),
        }
        if params.out:
            out_dir = Path(params.out)
            write_report(report, out_dir / "report.json")
            (out_dir / "report.txt").write_text(text, encoding="utf-8")
        report["text"] = text
        return report
