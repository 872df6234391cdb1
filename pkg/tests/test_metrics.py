import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ocdesc.evaluation.metrics import aggregate, compute_metrics, metrics_from_counts


def test_perfect():
    y = np.array([1, 1, 0, 0], bool)
    m = compute_metrics(y, y)
    assert m.means() == (1.0,) * 6


def test_gm_table_value():
    # 100 targets, 100 outliers: tpr 0.82, tnr 0.81
    m = metrics_from_counts(82, 81, 19, 18)
    assert m.gm == pytest.approx(0.8150, abs=5e-5)
    assert f"{m.gm:.2f}" == "0.81"


def test_balanced_accuracy_equals_rates():
    m = metrics_from_counts(39, 39, 11, 11)
    assert m.tpr == m.tnr == m.accu == 0.78


def test_missing_class_flagged():
    m = compute_metrics(np.array([True, False]), np.array([True, True]))
    assert math.isnan(m.tnr) and math.isnan(m.gm)
    assert set(m.undefined) == {"tnr", "gm"}
    assert m.tpr == 0.5


def test_no_positive_predictions():
    m = compute_metrics(np.zeros(4, bool), np.array([1, 1, 0, 0], bool))
    assert "pre" in m.undefined and math.isnan(m.f1)
    assert m.tpr == 0.0 and m.gm == 0.0


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_metric_algebra(tp, tn, fp, fn):
    if tp + fn == 0 or tn + fp == 0:
        return
    m = metrics_from_counts(tp, tn, fp, fn)
    assert m.gm == math.sqrt(m.tpr * m.tnr)
    assert abs(m.gm ** 2 - m.tpr * m.tnr) <= 1e-12
    assert m.accu == (tp + tn) / (tp + tn + fp + fn)
    if not math.isnan(m.pre) and m.pre + m.tpr > 0:
        assert m.f1 == 2 * m.pre * m.tpr / (m.pre + m.tpr)


def test_aggregate_single_has_zero_std():
    m = metrics_from_counts(8, 7, 3, 2)
    a = aggregate([m])
    assert a.means() == m.means()
    assert a.stds() == (0.0,) * 6


def test_aggregate_mean_std():
    a = aggregate([metrics_from_counts(10, 10, 0, 0), metrics_from_counts(5, 10, 0, 5)])
    assert a.tpr == 0.75 and a.s_tpr == 0.25
