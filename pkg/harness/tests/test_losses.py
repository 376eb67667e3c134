import math

import numpy as np
import pytest

from detect_harness.losses import class_weights, weighted_bce


def test_balanced_classes_reduce_to_standard_bce():
    w0, w1 = class_weights({0: 50, 1: 50})
    assert (w0, w1) == (1.0, 1.0)
    p = np.array([0.9, 0.2, 0.7])
    y = np.array([1, 0, 1])
    expected = -(math.log(0.9) + math.log(0.8) + math.log(0.7))
    assert weighted_bce(p, y, {0: 50, 1: 50}) == pytest.approx(expected)


def test_weight_formula():
    w0, w1 = class_weights({0: 2, 1: 8})
    assert w1 == pytest.approx(0.625)
    assert w0 == pytest.approx(2.5)


def test_perfect_predictions_drive_loss_to_zero():
    y = np.array([1, 0, 1, 0])
    losses = [
        weighted_bce(np.where(y == 1, 1 - eps, eps), y, {0: 2, 1: 2})
        for eps in (1e-2, 1e-4, 1e-6)
    ]
    assert losses[0] > losses[1] > losses[2]
    assert losses[2] < 1e-4


def test_zero_count_class_rejected():
    with pytest.raises(ValueError):
        weighted_bce(np.array([0.5]), np.array([1]), {0: 0, 1: 5})


def test_predictions_must_be_strict_probabilities():
    with pytest.raises(ValueError):
        weighted_bce(np.array([1.0]), np.array([1]), {0: 1, 1: 1})


def test_minority_class_upweighted():
    p = np.array([0.5, 0.5])
    y = np.array([1, 0])
    skewed = weighted_bce(p, y, {0: 90, 1: 10})
    w0, w1 = class_weights({0: 90, 1: 10})
    assert w1 > 1.0 > w0
    assert skewed == pytest.approx(-(w1 * math.log(0.5) + w0 * math.log(0.5)))
