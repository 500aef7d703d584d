"""
Patient-level stratified train/test split plans
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

from pydantic import BaseModel, Field

from errors import ClassTooSmall, PatientLeakage
from model.rng import SplitMix64

from .manifest import LabelScheme, PatientRecord

logger = logging.getLogger(__name__)

# Shuffles tried per class before settling for the closest swallow share
MAX_SHUFFLE_ATTEMPTS = 64
SWALLOW_SHARE_TOLERANCE = 0.10


class Split(BaseModel):
    train: List[str]
    test: List[str]


class SplitPlan(BaseModel):
    """Independent patient-level train/test resamples"""

    n_splits: int = Field(..., ge=1)
    test_fraction: float = Field(..., gt=0.0, lt=1.0)
    seed: int
    splits: List[Split]


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _pick_test(
    patients: List[str],
    counts: Mapping[str, int],
    n_test: int,
    test_fraction: float,
    rng: SplitMix64,
) -> List[str]:
    """Seeded shuffle whose test swallow share lands within the tolerance band, else the closest one tried"""
    total = sum(counts[p] for p in patients)
    best: Optional[List[str]] = None
    best_gap = math.inf
    for _ in range(MAX_SHUFFLE_ATTEMPTS):
        order = list(patients)
        rng.shuffle(order)
        chosen = order[:n_test]
        if total == 0:
            return chosen
        share = sum(counts[p] for p in chosen) / total
        gap = abs(share - test_fraction)
        if gap <= SWALLOW_SHARE_TOLERANCE * test_fraction:
            return chosen
        if gap < best_gap:
            best, best_gap = chosen, gap
    return best


def make_splits(
    records: Sequence[PatientRecord],
    scheme: LabelScheme,
    n_splits: int = 5,
    test_fraction: float = 0.2,
    seed: int = 0,
    swallow_counts: Optional[Mapping[str, int]] = None,
) -> SplitPlan:
    """
    Draw n_splits independent stratified patient-level splits

    Within every class, patients are ordered by swallow count and a seeded shuffle picks
    round(test_fraction * class size) test patients (at least one, leaving at least one for
    training), preferring draws whose test swallow share is within 10% of test_fraction.
    """
    counts = {r.patient_id: (swallow_counts or {}).get(r.patient_id, 0) for r in records}
    by_class: Dict[int, List[str]] = {}
    for record in records:
        by_class.setdefault(scheme.label(record.pas), []).append(record.patient_id)
    for label, members in sorted(by_class.items()):
        if len(members) < 2:
            raise ClassTooSmall(f"class {label} has {len(members)} patient(s); need at least 2")

    splits = []
    for split_index in range(n_splits):
        rng = SplitMix64.stream(seed, split_index)
        test: List[str] = []
        for label in sorted(by_class):
            members = sorted(by_class[label], key=lambda p: (counts[p], p))
            n_test = min(len(members) - 1, max(1, _round_half_up(test_fraction * len(members))))
            test.extend(_pick_test(members, counts, n_test, test_fraction, rng))
        test_set = set(test)
        train = sorted(r.patient_id for r in records if r.patient_id not in test_set)
        splits.append(Split(train=train, test=sorted(test_set)))

    plan = SplitPlan(n_splits=n_splits, test_fraction=test_fraction, seed=seed, splits=splits)
    logger.info(f"built {n_splits} patient-level splits over {len(records)} patients ({len(by_class)} classes)")
    return plan


def assert_no_leakage(plan: SplitPlan) -> None:
    """Hard check that no patient sits on both sides of any split"""
    for index, split in enumerate(plan.splits):
        overlap = set(split.train) & set(split.test)
        if overlap:
            raise PatientLeakage(f"split {index}: patients in both train and test: {sorted(overlap)}")


def save_split_plan(plan: SplitPlan, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(plan.model_dump(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_split_plan(path: Union[str, Path]) -> SplitPlan:
    return SplitPlan.model_validate_json(Path(path).read_text(encoding="utf-8"))
