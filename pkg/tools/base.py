"""
Shared pieces of the command tools: the Tool base class, option groups and report writing
"""

import json
import re
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

from pydantic import BaseModel, Field

from model.forest import ForestConfig
from segmentation.detector import SegmentationParams


class Tool:
    """A named command with a pydantic parameter model"""

    name: str = ""
    description: str = ""

    def execute(self, params: BaseModel) -> Dict[str, Any]:
        raise NotImplementedError


class SegmentationOptions(BaseModel):
    """Global thresholds for fixed-parameter segmentation"""

    top_db: float = Field(default=20.0, description="dB below the peak RMS treated as silence")
    gap_time: float = Field(default=0.6, description="Merge segments closer than this many seconds")
    min_amplitude: float = Field(default=0.0, description="Drop segments whose peak is below this")
    max_amplitude: float = Field(default=2.0, description="Drop segments whose peak is above this")

    def segmentation_params(self) -> SegmentationParams:
        return SegmentationParams(
            top_db=self.top_db,
            gap_time=self.gap_time,
            min_amplitude=self.min_amplitude,
            max_amplitude=self.max_amplitude,
        )


class ForestOptions(BaseModel):
    """Random forest hyperparameters exposed on the command line"""

    n_trees: int = Field(default=100, description="Trees per forest")
    max_depth: Optional[int] = Field(default=None, description="Depth limit, unlimited when omitted")
    min_samples_leaf: int = Field(default=1, description="Minimum rows per leaf")
    features_per_split: Union[Literal["sqrt", "all"], int] = Field(default="sqrt", description="'sqrt', 'all' or a count")
    bootstrap: bool = Field(default=True, description="Resample rows per tree")

    def forest_config(self, seed: int, n_jobs: int = 1) -> ForestConfig:
        return ForestConfig(
            n_trees=self.n_trees,
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
            features_per_split=self.features_per_split,
            bootstrap=self.bootstrap,
            seed=seed,
            n_jobs=n_jobs,
        )


def dump_report(payload: Dict[str, Any]) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline"""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_report(payload: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_report(payload), encoding="utf-8")
    return path


def source_stem(source_id: str) -> str:
    """File-name-safe form of a recording's source_id"""
    stem = Path(source_id).with_suffix("").as_posix().lstrip("/")
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", stem)
