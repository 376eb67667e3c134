import numpy as np
import pytest

from detect_harness.metrics import auprc_normal, classification_metrics


def test_constant_scorer_auprc_equals_prevalence():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = rng.integers(10, 400)
        y = (rng.uniform(size=n) < rng.uniform(0.1, 0.9)).astype(int)
        if y.min() == y.max():
            continue
        prevalence = float((y == 0).mean())
        assert auprc_normal(y, np.full(n, 0.5)) == pytest.approx(prevalence)


def test_oracle_scorer_auprc_is_one():
    y = np.array([0, 0, 1, 1, 1])
    scores = np.where(y == 0, 0.99, 0.01)  # normal probability
    assert auprc_normal(y, scores) == pytest.approx(1.0)


def test_normal_class_is_positive():
    # a scorer that ranks normals above highs must beat one that does the
    # opposite (scores distinct so ties don't flatten the curve)
    y = np.array([0, 0, 0, 1, 1, 1, 1, 1, 1, 1])
    ranks = np.arange(10) / 1000.0
    good = np.where(y == 0, 0.9 + ranks, 0.1 + ranks)
    bad = np.where(y == 0, 0.1 + ranks, 0.9 + ranks)
    assert auprc_normal(y, good) == pytest.approx(1.0)
    assert auprc_normal(y, bad) < (y == 0).mean()


def test_macro_is_unweighted_mean_of_class_metrics():
    rng = np.random.default_rng(3)
    y = (rng.uniform(size=200) < 0.7).astype(int)
    scores = rng.uniform(size=200)
    _, normal, high, macro = classification_metrics(y, scores)
    assert macro.f1 == pytest.approx((normal.f1 + high.f1) / 2)
    assert macro.precision == pytest.approx((normal.precision + high.precision) / 2)
    assert macro.recall == pytest.approx((normal.recall + high.recall) / 2)


def test_threshold_direction():
    y = np.array([0, 1])
    _, normal, high, _ = classification_metrics(y, np.array([0.9, 0.1]))
    assert normal.recall == 1.0 and high.recall == 1.0
