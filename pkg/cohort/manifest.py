"""
Recording manifest ingestion and PAS label mapping
CSV header: patient_id,age,gender,pas,wav_path[,annotation_path][,top_db,gap_time,min_amplitude,max_amplitude]
"""

import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel, Field

from errors import DatasetError, InconsistentPatient, InvalidDemographics, InvalidPAS, MissingColumn
from segmentation.detector import Segment, SegmentationParams

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("patient_id", "age", "gender", "pas", "wav_path")
OVERRIDE_COLUMNS = ("top_db", "gap_time", "min_amplitude", "max_amplitude")

_GENDER_ALIASES = {"female": 0, "f": 0, "0": 0, "male": 1, "m": 1, "1": 1}


class LabelScheme(str, Enum):
    """PAS to class mapping"""

    ABNORMALITY = "abnormality"
    SEVERITY = "severity"

    @classmethod
    def parse(cls, value: str) -> "LabelScheme":
        aliases = {"abn": cls.ABNORMALITY, "sev": cls.SEVERITY}
        return aliases[value] if value in aliases else cls(value)

    @property
    def classes(self) -> List[int]:
        return [0, 1] if self is LabelScheme.ABNORMALITY else [0, 1, 2]

    def label(self, pas: int) -> int:
        """abnormality: 1-2 -> 0, 3-8 -> 1; severity: 1-2 -> 0, 3-5 -> 1, 6-8 -> 2"""
        if not 1 <= pas <= 8:
            raise InvalidPAS(f"PAS must lie in 1..8, got {pas}")
        if pas <= 2:
            return 0
        if self is LabelScheme.ABNORMALITY or pas <= 5:
            return 1
        return 2


class Recording(BaseModel):
    """One WAV file of a patient"""

    source_id: str = Field(..., description="wav_path exactly as written in the manifest")
    wav_path: Path
    annotation_path: Optional[Path] = None
    params: Optional[SegmentationParams] = Field(default=None, description="Per-clip threshold overrides")


class PatientRecord(BaseModel):
    """Demographics, PAS rating and recordings of one patient"""

    patient_id: str
    age: float = Field(..., gt=0)
    gender: int = Field(..., ge=0, le=1, description="0 female, 1 male")
    pas: int = Field(..., ge=1, le=8)
    recordings: List[Recording] = Field(default_factory=list)

    @property
    def demographics(self):
        return self.age, self.gender


def parse_gender(value: str) -> int:
    code = _GENDER_ALIASES.get(str(value).strip().lower())
    if code is None:
        raise InvalidDemographics(f"unrecognised gender {value!r}")
    return code


def _parse_age(value: str, patient_id: str) -> float:
    try:
        age = float(value)
    except ValueError as exc:
        raise InvalidDemographics(f"patient {patient_id}: age {value!r} is not a number") from exc
    if not age > 0:
        raise InvalidDemographics(f"patient {patient_id}: age must be positive, got {age}")
    return age


def _parse_pas(value: str, patient_id: str) -> int:
    try:
        pas = int(value)
    except ValueError as exc:
        raise InvalidPAS(f"patient {patient_id}: PAS {value!r} is not an integer") from exc
    if not 1 <= pas <= 8:
        raise InvalidPAS(f"patient {patient_id}: PAS must lie in 1..8, got {pas}")
    return pas


def _parse_overrides(row: Mapping[str, str], defaults: SegmentationParams) -> Optional[SegmentationParams]:
    given = {col: row[col] for col in OVERRIDE_COLUMNS if str(row.get(col, "")).strip()}
    if not given:
        return None
    merged = defaults.model_dump()
    try:
        merged.update({col: float(value) for col, value in given.items()})
    except ValueError as exc:
        raise DatasetError(f"row for {row['patient_id']}: non-numeric segmentation override ({exc})") from exc
    return SegmentationParams(**merged)


def _resolve(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else base / path


def load_manifest(path: Union[str, Path], defaults: Optional[SegmentationParams] = None) -> List[PatientRecord]:
    """Read the manifest CSV and group rows by patient in first-appearance order"""
    path = Path(path)
    defaults = defaults or SegmentationParams()
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    frame.columns = [col.strip() for col in frame.columns]
    missing = [col for col in REQUIRED_COLUMNS if col not in frame.columns]
    if missing:
        raise MissingColumn(f"{path}: missing columns {missing}")

    patients: Dict[str, PatientRecord] = {}
    for row in frame.to_dict(orient="records"):
        patient_id = row["patient_id"].strip()
        age = _parse_age(row["age"], patient_id)
        gender = parse_gender(row["gender"])
        pas = _parse_pas(row["pas"], patient_id)

        record = patients.get(patient_id)
        if record is None:
            record = PatientRecord(patient_id=patient_id, age=age, gender=gender, pas=pas)
            patients[patient_id] = record
        elif (record.age, record.gender, record.pas) != (age, gender, pas):
            raise InconsistentPatient(
                f"patient {patient_id}: rows disagree on demographics or PAS "
                f"({record.age}, {record.gender}, {record.pas}) vs ({age}, {gender}, {pas})"
            )

        annotation = str(row.get("annotation_path", "")).strip()
        record.recordings.append(Recording(
            source_id=row["wav_path"].strip(),
            wav_path=_resolve(path.parent, row["wav_path"].strip()),
            annotation_path=_resolve(path.parent, annotation) if annotation else None,
            params=_parse_overrides(row, defaults),
        ))

    logger.info(f"loaded {len(patients)} patients / {len(frame)} recordings from {path}")
    return list(patients.values())


def swallow_count(record: PatientRecord, segments: Mapping[str, Sequence[Segment]]) -> int:
    """Total swallows across a patient's recordings, keyed by recording source_id"""
    return sum(len(segments.get(rec.source_id, ())) for rec in record.recordings)
