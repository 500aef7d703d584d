"""
Ground-truth annotation files
Format: {"source_id": str, "segments": [{"start_s": float, "end_s": float}]}
"""

import json
from pathlib import Path
from typing import List, Union

from pydantic import BaseModel, Field

from .detector import Segment


class Annotation(BaseModel):
    """Swallow extents for one recording"""

    source_id: str = Field(..., description="Recording the segments belong to")
    segments: List[Segment] = Field(default_factory=list)


def load_annotation(path: Union[str, Path]) -> Annotation:
    """Read an annotation JSON file"""
    return Annotation.model_validate_json(Path(path).read_text(encoding="utf-8"))


def dump_annotation(annotation: Annotation) -> str:
    """Deterministic JSON text for an annotation"""
    payload = {
        "source_id": annotation.source_id,
        "segments": [
            {"start_s": seg.start_s, "end_s": seg.end_s}
            for seg in annotation.segments
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def write_annotation(source_id: str, segments: List[Segment], path: Union[str, Path]) -> Path:
    """Write segments as an annotation JSON file"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_annotation(Annotation(source_id=source_id, segments=list(segments))), encoding="utf-8")
    return path
