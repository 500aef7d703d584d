import pytest
from pydantic import ValidationError

from errors import EmptyPredictionList
from model import Prediction, RiskReport, Strategy, aggregate_patient, build_risk_report


def _binary(*risks):
    return [Prediction(class_probs=(1.0 - r, r)) for r in risks]


def test_worked_example():
    preds = _binary(0.2, 0.8, 0.9)
    assert aggregate_patient(preds, Strategy.MEAN).score == pytest.approx(1.9 / 3)
    assert aggregate_patient(preds, Strategy.MAX).score == 0.9
    mode = aggregate_patient(preds, Strategy.MODE)
    assert mode.predicted_class == 1
    assert mode.score == pytest.approx(2 / 3)
    assert mode.class_scores == pytest.approx([1 / 3, 2 / 3])


def test_single_low_risk_swallow():
    mode = aggregate_patient(_binary(0.4), Strategy.MODE)
    assert mode.predicted_class == 0
    assert mode.score == 0.0
    assert aggregate_patient(_binary(0.4), Strategy.MAX).predicted_class == 0


def test_mode_ties_go_to_higher_risk():
    mode = aggregate_patient(_binary(0.1, 0.2, 0.7, 0.9), Strategy.MODE)
    assert mode.predicted_class == 1
    assert mode.score == 0.5


def test_mean_never_exceeds_max(rng):
    for _ in range(500):
        preds = _binary(*rng.uniform(size=int(rng.integers(1, 20))))
        assert aggregate_patient(preds, Strategy.MEAN).score <= aggregate_patient(preds, Strategy.MAX).score


def test_constant_predictions():
    preds = _binary(0.25, 0.25, 0.25)
    assert aggregate_patient(preds, Strategy.MEAN).score == aggregate_patient(preds, Strategy.MAX).score


def test_empty_predictions():
    with pytest.raises(EmptyPredictionList):
        aggregate_patient([], Strategy.MEAN)


def test_multiclass_risk_is_non_normal_probability():
    preds = [Prediction(class_probs=(0.6, 0.3, 0.1)), Prediction(class_probs=(0.2, 0.2, 0.6))]
    mean = aggregate_patient(preds, Strategy.MEAN)
    assert mean.score == pytest.approx(0.6)
    assert mean.class_scores == pytest.approx([0.4, 0.25, 0.35])
    assert mean.predicted_class == 0
    worst = aggregate_patient(preds, Strategy.MAX)
    assert worst.score == pytest.approx(0.8)
    assert worst.predicted_class == 2
    mode = aggregate_patient(preds, Strategy.MODE)
    assert mode.predicted_class == 2
    assert mode.score == 0.5


def test_strategy_accepts_strings():
    assert aggregate_patient(_binary(0.2, 0.6), "max").score == 0.6


def test_risk_report():
    report = build_risk_report("P007", _binary(0.2, 0.8, 0.9))
    assert report.patient_id == "P007"
    assert report.per_swallow == [[0.8, 0.2], [pytest.approx(0.2), 0.8], [pytest.approx(0.1), 0.9]]
    assert report.max_risk == 0.9
    assert report.mode_risk == 1
    assert report.mean_risk == pytest.approx(1.9 / 3)
    with pytest.raises(ValidationError):
        RiskReport(patient_id="x", per_swallow=[], mean_risk=0.9, max_risk=0.5, mode_risk=0, mode_score=0.0)
