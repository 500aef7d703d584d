import numpy as np
import pytest

from cohort import (
    LabelScheme,
    PatientRecord,
    Split,
    SplitPlan,
    assert_no_leakage,
    load_split_plan,
    make_splits,
    save_split_plan,
)
from errors import ClassTooSmall, PatientLeakage


def _patients(pas_values):
    return [PatientRecord(patient_id=f"P{i:03d}", age=60, gender=i % 2, pas=pas) for i, pas in enumerate(pas_values)]


def test_one_test_patient_per_class():
    records = _patients([1] * 5 + [5] * 5)
    counts = {r.patient_id: 10 for r in records}
    pas_of = {r.patient_id: r.pas for r in records}
    plan = make_splits(records, LabelScheme.ABNORMALITY, n_splits=5, test_fraction=0.2, seed=11, swallow_counts=counts)
    assert len(plan.splits) == 5
    for split in plan.splits:
        assert len(split.test) == 2
        assert len(split.train) == 8
        assert sorted(LabelScheme.ABNORMALITY.label(pas_of[p]) for p in split.test) == [0, 1]


def test_plans_are_deterministic():
    records = _patients([1, 2, 1, 2, 4, 6, 7, 8, 3, 1])
    a = make_splits(records, LabelScheme.SEVERITY, n_splits=3, seed=5)
    b = make_splits(records, LabelScheme.SEVERITY, n_splits=3, seed=5)
    assert a == b


def test_random_plans_keep_patients_apart():
    gen = np.random.default_rng(2024)
    for trial in range(1000):
        sizes = gen.integers(2, 10, size=2)
        pas_values = [1] * sizes[0] + [int(gen.integers(3, 9)) for _ in range(sizes[1])]
        records = _patients(pas_values)
        counts = {r.patient_id: int(gen.integers(0, 20)) for r in records}
        scheme = LabelScheme.ABNORMALITY
        plan = make_splits(
            records, scheme, n_splits=2, test_fraction=float(gen.uniform(0.1, 0.5)),
            seed=trial, swallow_counts=counts,
        )
        assert_no_leakage(plan)
        all_ids = {r.patient_id for r in records}
        label_of = {r.patient_id: scheme.label(r.pas) for r in records}
        for split in plan.splits:
            assert set(split.train) | set(split.test) == all_ids
            assert not set(split.train) & set(split.test)
            assert {label_of[p] for p in split.test} == {0, 1}
            assert {label_of[p] for p in split.train} == {0, 1}


def test_swallow_share_prefers_matching_draws():
    records = _patients([1] * 10 + [6] * 10)
    # Only a 4 + 6 pair out of each class of ten hits a 20% swallow share
    counts = {r.patient_id: (4 if i % 10 < 5 else 6) for i, r in enumerate(records)}
    plan = make_splits(records, LabelScheme.ABNORMALITY, n_splits=4, test_fraction=0.2, seed=3, swallow_counts=counts)
    total = sum(counts.values())
    for split in plan.splits:
        assert sum(counts[p] for p in split.test) / total == pytest.approx(0.2)
        assert sorted(counts[p] for p in split.test) == [4, 4, 6, 6]


def test_class_too_small():
    with pytest.raises(ClassTooSmall):
        make_splits(_patients([1, 1, 1, 5]), LabelScheme.ABNORMALITY)


def test_leakage_is_an_assertion():
    plan = SplitPlan(n_splits=1, test_fraction=0.5, seed=0, splits=[Split(train=["P1", "P2"], test=["P2"])])
    with pytest.raises(PatientLeakage):
        assert_no_leakage(plan)
    with pytest.raises(AssertionError):
        assert_no_leakage(plan)


def test_plan_file_round_trip(tmp_path):
    plan = make_splits(_patients([1, 2, 3, 4, 1, 5]), LabelScheme.ABNORMALITY, n_splits=2, seed=9)
    path = save_split_plan(plan, tmp_path / "plans" / "plan.json")
    assert load_split_plan(path) == plan
    assert path.read_text(encoding="utf-8").endswith("}\n")
