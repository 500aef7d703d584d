#!/usr/bin/env python3
"""
SwallowSense command line
Sub-commands: segment, extract, gridsearch, train, predict, evaluate, report, synth.

Exit codes: 0 success, 2 input error, 3 internal assertion failure (e.g. patient leakage).
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel

from cohort.manifest import LabelScheme
from errors import SwallowSenseError
from model.aggregation import Strategy
from services.pipeline import SegmentationMode
from settings import get_settings
from tools.base import Tool, dump_report
from tools.evaluate_tools import EvaluateParams, EvaluateTool
from tools.extract_tools import ExtractParams, ExtractTool
from tools.gridsearch_tools import GridSearchParams, GridSearchTool
from tools.predict_tools import PredictParams, PredictTool
from tools.report_tools import ReportParams, ReportTool
from tools.segment_tools import SegmentParams, SegmentTool
from tools.synth_tools import SynthParams, SynthTool
from tools.train_tools import TrainParams, TrainTool

logger = logging.getLogger("swallowsense")

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_ASSERTION = 3

COMMANDS: Dict[str, Tuple[Tool, type]] = {
    "segment": (SegmentTool(), SegmentParams),
    "extract": (ExtractTool(), ExtractParams),
    "gridsearch": (GridSearchTool(), GridSearchParams),
    "train": (TrainTool(), TrainParams),
    "predict": (PredictTool(), PredictParams),
    "evaluate": (EvaluateTool(), EvaluateParams),
    "report": (ReportTool(), ReportParams),
    "synth": (SynthTool(), SynthParams),
}


def _label_scheme(value: str) -> LabelScheme:
    try:
        return LabelScheme.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"unknown label scheme {value!r} (abn, sev)") from exc


def _add_segmentation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--top-db", dest="top_db", type=float, default=20.0)
    parser.add_argument("--gap-time", dest="gap_time", type=float, default=0.6)
    parser.add_argument("--min-amplitude", dest="min_amplitude", type=float, default=0.0)
    parser.add_argument("--max-amplitude", dest="max_amplitude", type=float, default=2.0)


def _add_forest_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-trees", dest="n_trees", type=int, default=100)
    parser.add_argument("--max-depth", dest="max_depth", type=int, default=None)
    parser.add_argument("--min-samples-leaf", dest="min_samples_leaf", type=int, default=1)
    parser.add_argument("--features-per-split", dest="features_per_split", default="sqrt",
                        help="'sqrt', 'all' or a feature count")
    parser.add_argument("--no-bootstrap", dest="bootstrap", action="store_false")


def _add_mode_flag(parser: argparse.ArgumentParser, default: SegmentationMode) -> None:
    parser.add_argument("--mode", choices=[m.value for m in SegmentationMode], default=default.value)


def _add_split_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--label-scheme", dest="label_scheme", type=_label_scheme, default=LabelScheme.ABNORMALITY)
    parser.add_argument("--splits", dest="n_splits", type=int, default=5)
    parser.add_argument("--test-fraction", dest="test_fraction", type=float, default=0.2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Defaults to SWALLOWSENSE_SEED")
    common.add_argument("--n-jobs", dest="n_jobs", type=int, default=None, help="Defaults to SWALLOWSENSE_N_JOBS")

    parser = argparse.ArgumentParser(prog="swallowsense", description="Swallow-sound dysphagia screening toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", parents=[common], help="Segment recordings and score them against annotations")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    _add_mode_flag(p, SegmentationMode.FIXED)
    _add_segmentation_flags(p)

    p = sub.add_parser("extract", parents=[common], help="Write the per-swallow feature CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    _add_mode_flag(p, SegmentationMode.HUMAN)
    _add_segmentation_flags(p)

    p = sub.add_parser("gridsearch", parents=[common], help="Search segmentation thresholds by mean IoU")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    p.add_argument("--top-db", dest="top_db", type=float, nargs="+", default=[20.0])
    p.add_argument("--gap-time", dest="gap_time", type=float, nargs="+", default=[0.6])
    p.add_argument("--min-amplitude", dest="min_amplitude", type=float, nargs="+", default=[0.0])
    p.add_argument("--max-amplitude", dest="max_amplitude", type=float, nargs="+", default=[2.0])

    p = sub.add_parser("train", parents=[common], help="Train a forest on every manifest swallow")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="Forest JSON path")
    p.add_argument("--label-scheme", dest="label_scheme", type=_label_scheme, default=LabelScheme.ABNORMALITY)
    _add_mode_flag(p, SegmentationMode.HUMAN)
    _add_segmentation_flags(p)
    _add_forest_flags(p)

    p = sub.add_parser("predict", parents=[common], help="Per-patient risk reports from a saved forest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    _add_mode_flag(p, SegmentationMode.FIXED)
    _add_segmentation_flags(p)

    p = sub.add_parser("evaluate", parents=[common], help="Patient-level repeated train/test evaluation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    _add_mode_flag(p, SegmentationMode.HUMAN)
    _add_split_flags(p)
    p.add_argument("--aggregate", choices=[s.value for s in Strategy], default=Strategy.MEAN.value)
    p.add_argument("--feature-set", dest="feature_set", choices=["domain", "external", "combined"], default="domain")
    p.add_argument("--external-features", dest="external_features")
    p.add_argument("--split-plan", dest="split_plan")
    p.add_argument("--importance", type=int, default=0, metavar="N", help="Permutation repeats per feature")
    _add_segmentation_flags(p)
    _add_forest_flags(p)

    p = sub.add_parser("report", parents=[common], help="Segmentation mode x aggregation AUC-ROC table")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    p.add_argument("--modes", nargs="+", choices=[m.value for m in SegmentationMode],
                   default=[m.value for m in SegmentationMode])
    _add_split_flags(p)
    _add_segmentation_flags(p)
    _add_forest_flags(p)

    p = sub.add_parser("synth", parents=[common], help="Generate a synthetic cohort")
    p.add_argument("--out", required=True)
    p.add_argument("--n-patients", dest="n_patients", type=int, default=40)
    p.add_argument("--swallows", dest="swallows_per_patient", type=int, nargs=2, default=[10, 15], metavar=("MIN", "MAX"))
    p.add_argument("--abnormal-fraction", dest="abnormal_fraction", type=float, default=0.5)
    p.add_argument("--sample-rate", dest="sample_rate", type=int, default=16000)
    p.add_argument("--separability", choices=["strict", "overlap"], default="strict")
    return parser


def resolve_params(args: argparse.Namespace, model: type) -> BaseModel:
    """Validate parsed flags against the command's parameter model"""
    values: Dict[str, Any] = {k: v for k, v in vars(args).items() if k != "command" and v is not None}
    settings = get_settings()
    # unset SWALLOWSENSE_SEED leaves each command on its own default seed
    if settings.seed is not None:
        values.setdefault("seed", settings.seed)
    accepted = {k: v for k, v in values.items() if k in model.model_fields}
    return model(**accepted)


def _summary(command: str, result: Dict[str, Any]) -> Dict[str, Any]:
    """Short stdout view; full reports go to --out"""
    if command == "report":
        return {"text": result["text"]}
    if command == "evaluate":
        return {"summary": result["summary"], "importance": result["importance"]}
    if command == "segment":
        return {"mean_score": result["mean_score"], "failures": result["failures"], "n_recordings": len(result["recordings"])}
    if command == "predict":
        return {"reports": result["reports"], "unscored_patients": result["unscored_patients"]}
    if command == "gridsearch":
        return {"best": result["best"], "best_iou": result["best_iou"], "n_points": result["n_points"]}
    return result


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )
    args = build_parser().parse_args(argv)

    try:
        tool, model = COMMANDS[args.command]
        params = resolve_params(args, model)
        result = tool.execute(params)
    except AssertionError as exc:
        logger.error(f"internal assertion failed: {type(exc).__name__}: {exc}")
        return EXIT_ASSERTION
    except (SwallowSenseError, ValueError, OSError) as exc:
        logger.error(f"{args.command} failed: {type(exc).__name__}: {exc}")
        return EXIT_INPUT_ERROR

    if args.command == "report":
        sys.stdout.write(result["text"])
    else:
        sys.stdout.write(dump_report(_summary(args.command, result)))
    if args.command == "segment" and result["failures"]:
        logger.error(f"{len(result['failures'])} recording(s) failed")
        return EXIT_INPUT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
